#include "delayop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "delayop/errors.hpp"
#include "delayop/phase.hpp"

namespace delayop {

DelayOperator build_delay_operator(const Network& net, const DelayMatrix& tau, double omega,
                                   double epsilon) {
  const Eigen::Index n = net.size();
  if (net.weights.cols() != n || tau.tau.rows() != n || tau.tau.cols() != n)
    throw StructuralError("build_delay_operator: network is " + std::to_string(n) + " nodes but "
                          "delay matrix is " + std::to_string(tau.tau.rows()) + "x" +
                          std::to_string(tau.tau.cols()));
  if (!(epsilon > 0.0)) throw ParameterError("build_delay_operator: epsilon must be positive");
  if (!(omega > 0.0)) throw ParameterError("build_delay_operator: omega must be positive");

  DelayOperator op;
  op.epsilon = epsilon;
  op.eta = omega * tau.tau;
  op.w.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      op.w(i, j) = epsilon * net.weights(i, j) * std::polar(1.0, -op.eta(i, j));
  op.is_circulant = net.is_circulant && is_circulant_matrix(tau.tau);
  return op;
}

namespace {

// exp(-2*pi*i*m/n) for m in [0, n), with table[n-m] == conj(table[m])
// exactly so symmetric generating rows give exactly paired eigenvalues.
std::vector<cplx> dft_roots(Eigen::Index n) {
  std::vector<cplx> roots(static_cast<std::size_t>(n));
  for (Eigen::Index m = 0; 2 * m <= n; ++m) {
    const double angle = -kTwoPi * static_cast<double>(m) / static_cast<double>(n);
    roots[static_cast<std::size_t>(m)] =
        2 * m == n ? cplx{-1.0, 0.0} : cplx{std::cos(angle), std::sin(angle)};
    if (m > 0 && 2 * m != n) roots[static_cast<std::size_t>(n - m)] = std::conj(roots[static_cast<std::size_t>(m)]);
  }
  return roots;
}

}  // namespace

Spectrum cdt_spectrum(const DelayOperator& op) {
  if (!op.is_circulant)
    throw ContractError("cdt_spectrum: operator is not circulant; use numeric_spectrum");
  const Eigen::Index n = op.size();
  const auto roots = dft_roots(n);
  const auto root = [&](Eigen::Index a, Eigen::Index b) {
    return roots[static_cast<std::size_t>((a * b) % n)];
  };

  Spectrum spec;
  spec.ordering = ModeOrdering::Cdt;
  spec.eigenvalues.resize(n);
  spec.eigenvectors.resize(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    cplx sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) sum += op.w(0, j) * root(k, j);
    spec.eigenvalues(k) = sum;
    for (Eigen::Index s = 0; s < n; ++s) spec.eigenvectors(s, k) = norm * root(k, s);
  }
  return spec;
}

namespace {

// Order labels by descending real part. Runs of neighbors whose real parts
// differ by less than the tie tolerance are re-sorted by descending
// imaginary part, then by their original position.
std::vector<Eigen::Index> rank_by_real_part(const Eigen::VectorXcd& lambda) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return lambda(a).real() > lambda(b).real();
  });
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           lambda(order[hi - 1]).real() - lambda(order[hi]).real() < kModeTieTolerance)
      ++hi;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
              order.begin() + static_cast<std::ptrdiff_t>(hi), [&](Eigen::Index a, Eigen::Index b) {
                if (lambda(a).imag() != lambda(b).imag()) return lambda(a).imag() > lambda(b).imag();
                return a < b;
              });
    lo = hi;
  }
  return order;
}

}  // namespace

Spectrum numeric_spectrum(const DelayOperator& op) {
  if (!op.w.allFinite()) throw ParameterError("numeric_spectrum: operator has non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
  // Eigen's default budget is a fixed number of QR sweeps per row.
  solver.compute(op.w, true);
  if (solver.info() != Eigen::Success)
    throw NumericError("numeric_spectrum: complex Schur iteration failed to converge for N=" +
                       std::to_string(op.size()) + " within " +
                       std::to_string(Eigen::ComplexSchur<Eigen::MatrixXcd>::m_maxIterationsPerRow *
                                      op.size()) +
                       " iterations");

  const auto order = rank_by_real_part(solver.eigenvalues());
  const Eigen::Index n = op.size();
  Spectrum spec;
  spec.ordering = ModeOrdering::DescendingRealPart;
  spec.eigenvalues.resize(n);
  spec.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    spec.eigenvalues(k) = solver.eigenvalues()(src);
    Eigen::VectorXcd v = solver.eigenvectors().col(src);
    v.normalize();
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    v *= std::polar(1.0, -std::arg(v(peak)));
    v(peak) = std::abs(v(peak));
    spec.eigenvectors.col(k) = v;
  }
  return spec;
}

Spectrum spectrum_of(const DelayOperator& op) {
  return op.is_circulant ? cdt_spectrum(op) : numeric_spectrum(op);
}

std::vector<int> leading_modes(const Spectrum& spec, int m) {
  if (m < 1 || m > spec.size())
    throw ParameterError("leading_modes: m must lie in [1, " + std::to_string(spec.size()) + "]");
  const auto order = rank_by_real_part(spec.eigenvalues);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) labels.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]) + 1);
  return labels;
}

Eigen::VectorXd predicted_pattern(const Spectrum& spec, int k) {
  if (k < 1 || k > spec.size())
    throw ParameterError("predicted_pattern: mode " + std::to_string(k) + " out of range");
  const auto v = spec.eigenvector(k);
  Eigen::VectorXd phase(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) phase(i) = wrapped_arg(v(i));
  return phase;
}

double max_residual(const Eigen::MatrixXcd& w, const Spectrum& spec) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < spec.size(); ++k) {
    const Eigen::VectorXcd r =
        w * spec.eigenvectors.col(k) - spec.eigenvalues(k) * spec.eigenvectors.col(k);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace delayop
