#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "delayop/dynamics.hpp"
#include "delayop/spectral.hpp"

namespace delayop {

// Inner products throughout are <a, b> = sum_i a_i * conj(b_i).

/// Kuramoto order parameter R = |mean_j e^{i theta_j}|, in [0, 1].
double order_parameter(const Eigen::VectorXd& theta);

/// R(t) for every recorded row of a trajectory.
std::vector<double> order_parameter_series(const PhaseTrajectory& traj);

/// Mean of R over the recorded times t with t_begin <= t <= t_end.
/// Throws ParameterError when no sample falls in the window.
double mean_order_parameter(const PhaseTrajectory& traj, double t_begin, double t_end);

/// Projections of a state onto the modes of a spectrum at one time.
struct ModeContributions {
  Eigen::VectorXcd mu;
  Eigen::VectorXd log_abs;  ///< log10 |mu_k|
};

/// mu_k = <x, v_k>.
ModeContributions mode_contributions(const ComplexState& x, const Spectrum& spec);

/// rho = |mean_i e^{i (theta_i - pattern_i)}|, in [0, 1].
double pattern_match(const Eigen::VectorXd& theta, const Eigen::VectorXd& pattern);

/// Wave direction label: +1 when theta matches the positive mode, -1 the
/// negative mode, 0 when neither clears `threshold`.
int classify_direction(const Eigen::VectorXd& theta, const Spectrum& spec, int pos_mode,
                       int neg_mode, double threshold = 0.9);

struct DirectionRecord {
  std::uint64_t seed = 0;
  double rho_pos = 0.0;
  double rho_neg = 0.0;
  int label = 0;
};

struct DirectionStats {
  std::vector<DirectionRecord> records;

  double fraction(int label) const;
};

/// i.i.d. U[-pi, pi) phases, reproducible per seed.
Eigen::VectorXd random_ic(Eigen::Index n, std::uint64_t seed);

/// wrap(pattern_i + amplitude * u_i) with u_i ~ U[-pi, pi).
Eigen::VectorXd biased_ic(const Eigen::VectorXd& pattern, double amplitude, std::uint64_t seed);

}  // namespace delayop
