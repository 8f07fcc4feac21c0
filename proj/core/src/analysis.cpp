#include "delayop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "delayop/errors.hpp"
#include "delayop/phase.hpp"

namespace delayop {

double order_parameter(const Eigen::VectorXd& theta) {
  if (theta.size() == 0) throw ParameterError("order_parameter: empty phase vector");
  // Relative to theta_0, so identical phases sum to exactly N.
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double d = theta(j) - theta(0);
    re += std::cos(d);
    im += std::sin(d);
  }
  return std::min(1.0, std::hypot(re, im) / static_cast<double>(theta.size()));
}

std::vector<double> order_parameter_series(const PhaseTrajectory& traj) {
  std::vector<double> r(static_cast<std::size_t>(traj.steps()));
  for (Eigen::Index k = 0; k < traj.steps(); ++k)
    r[static_cast<std::size_t>(k)] = order_parameter(traj.at(k));
  return r;
}

double mean_order_parameter(const PhaseTrajectory& traj, double t_begin, double t_end) {
  if (!(t_begin <= t_end)) throw ParameterError("mean_order_parameter: inverted window");
  // Grid times are k * dt, so allow rounding slack at the window edges.
  const double slack = traj.times.size() > 1 ? 1e-6 * (traj.times[1] - traj.times[0]) : 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < t_begin - slack || t > t_end + slack) continue;
    sum += order_parameter(traj.at(static_cast<Eigen::Index>(k)));
    ++count;
  }
  if (count == 0)
    throw ParameterError("mean_order_parameter: no samples in [" + std::to_string(t_begin) +
                         ", " + std::to_string(t_end) + "]");
  return sum / static_cast<double>(count);
}

ModeContributions mode_contributions(const ComplexState& x, const Spectrum& spec) {
  if (x.x.size() != spec.eigenvectors.rows())
    throw StructuralError("mode_contributions: state and spectrum sizes differ");
  ModeContributions out;
  out.mu = spec.eigenvectors.adjoint() * x.x;
  out.log_abs = out.mu.cwiseAbs().array().log10();
  return out;
}

double pattern_match(const Eigen::VectorXd& theta, const Eigen::VectorXd& pattern) {
  if (theta.size() != pattern.size())
    throw StructuralError("pattern_match: phase and pattern lengths differ");
  if (theta.size() == 0) throw ParameterError("pattern_match: empty phase vector");
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double d = theta(i) - pattern(i);
    re += std::cos(d);
    im += std::sin(d);
  }
  return std::min(1.0, std::hypot(re, im) / static_cast<double>(theta.size()));
}

int classify_direction(const Eigen::VectorXd& theta, const Spectrum& spec, int pos_mode,
                       int neg_mode, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ParameterError("classify_direction: threshold must lie in (0, 1)");
  const double rho_pos = pattern_match(theta, predicted_pattern(spec, pos_mode));
  const double rho_neg = pattern_match(theta, predicted_pattern(spec, neg_mode));
  if (rho_pos >= threshold && rho_pos > rho_neg) return +1;
  if (rho_neg >= threshold && rho_neg > rho_pos) return -1;
  return 0;
}

double DirectionStats::fraction(int label) const {
  if (records.empty()) return 0.0;
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [label](const DirectionRecord& r) { return r.label == label; });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

namespace {

// U[-pi, pi) from the top 53 bits of a 64-bit draw; independent of the
// standard library's distribution implementation.
double uniform_phase(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return -kPi + kTwoPi * u;
}

}  // namespace

Eigen::VectorXd random_ic(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("random_ic: n must be positive");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd theta(n);
  for (Eigen::Index i = 0; i < n; ++i) theta(i) = wrap_phase(uniform_phase(rng));
  return theta;
}

Eigen::VectorXd biased_ic(const Eigen::VectorXd& pattern, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude <= 1.0))
    throw ParameterError("biased_ic: amplitude must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd theta(pattern.size());
  for (Eigen::Index i = 0; i < pattern.size(); ++i) {
    const double u = uniform_phase(rng);
    theta(i) = amplitude == 0.0 ? pattern(i) : wrap_phase(pattern(i) + amplitude * u);
  }
  return theta;
}

}  // namespace delayop
