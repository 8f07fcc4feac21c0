#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "delayop/network.hpp"

namespace delayop {

using cplx = std::complex<double>;

/// Complex coupling operator W = epsilon * exp(-i * eta) ∘ A with
/// eta = omega * tau. Entries have units of 1/s.
struct DelayOperator {
  Eigen::MatrixXcd w;
  Eigen::MatrixXd eta;
  double epsilon = 0.0;
  bool is_circulant = false;

  Eigen::Index size() const noexcept { return w.rows(); }
};

enum class ModeOrdering {
  /// Label k is the k-th DFT frequency (k = 1 is the constant mode).
  Cdt,
  /// Label k is the k-th largest real part.
  DescendingRealPart,
};

/// Eigenpairs of a DelayOperator. Column k-1 of `eigenvectors` belongs to
/// mode label k; every column has unit Euclidean norm.
struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  ModeOrdering ordering = ModeOrdering::DescendingRealPart;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }
  /// CDT bases are unitary; numeric bases are only guaranteed invertible.
  bool orthonormal() const noexcept { return ordering == ModeOrdering::Cdt; }
  /// 1-based mode accessors.
  cplx eigenvalue(int k) const { return eigenvalues(k - 1); }
  auto eigenvector(int k) const { return eigenvectors.col(k - 1); }
};

/// Real parts closer than this are treated as tied when ranking modes.
inline constexpr double kModeTieTolerance = 1e-12;

/// W from a network, its delays, the common angular frequency omega
/// (rad/s) and coupling epsilon (1/s). Throws StructuralError on
/// mismatched sizes and ParameterError on non-positive omega/epsilon.
DelayOperator build_delay_operator(const Network& net, const DelayMatrix& tau, double omega,
                                   double epsilon);

/// Closed-form eigenpairs of a circulant operator from the DFT of its
/// first row. Throws ContractError when `op` is not circulant.
Spectrum cdt_spectrum(const DelayOperator& op);

/// Dense eigendecomposition, modes ranked by descending real part (ties
/// broken by descending imaginary part, then solver order). Each vector is
/// gauged so its largest-modulus entry is real and positive.
Spectrum numeric_spectrum(const DelayOperator& op);

/// cdt_spectrum for circulant operators, numeric_spectrum otherwise.
Spectrum spectrum_of(const DelayOperator& op);

/// The `m` mode labels (1-based) with the largest real eigenvalue part.
std::vector<int> leading_modes(const Spectrum& spec, int m);

/// Elementwise argument of eigenvector `k` (1-based), in [-pi, pi).
Eigen::VectorXd predicted_pattern(const Spectrum& spec, int k);

/// max_k ||W v_k - lambda_k v_k||.
double max_residual(const Eigen::MatrixXcd& w, const Spectrum& spec);

}  // namespace delayop
