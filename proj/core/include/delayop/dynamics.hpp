#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "delayop/network.hpp"
#include "delayop/spectral.hpp"

namespace delayop {

/// How a delayed model sees oscillator j before t = 0.
enum class HistoryPolicy {
  /// theta_j(s) = theta_j(0) for s <= 0.
  ConstantInitial,
  /// theta_j(s) = theta_j(0) + omega_j * s, i.e. free rotation backwards.
  LinearBackcast,
};

/// How theta_j(t - tau) is read from the sampled history.
enum class DelayLookup {
  /// Linear blend of the two samples bracketing t - tau.
  Linear,
  /// Sample at the grid point nearest t - tau.
  Nearest,
};

enum class ModelTag { KM, DKM, PhaseLag, ComplexFlow };

std::string_view to_string(ModelTag tag) noexcept;

struct SimConfig {
  /// Natural frequencies in rad/s; a single entry is broadcast to all nodes.
  Eigen::VectorXd omega = Eigen::VectorXd::Constant(1, 20.0 * 3.141592653589793);
  double epsilon = 0.5;
  double dt = 1e-4;
  double t_end = 10.0;
  /// Renormalization interval of the complex flow.
  double sigma_step = 1e-3;
  std::uint64_t seed = 0;
  HistoryPolicy history = HistoryPolicy::ConstantInitial;
  DelayLookup delay_lookup = DelayLookup::Linear;
  /// Euler integrators keep every `record_every`-th step, plus the last.
  int record_every = 1;

  /// Throws ParameterError when a field is out of range for `n` nodes.
  void validate(Eigen::Index n) const;
  /// Frequencies expanded to length n.
  Eigen::VectorXd omega_per_node(Eigen::Index n) const;
  double mean_omega() const { return omega.mean(); }
};

/// Sampled phases, one row per time point, every entry in [-pi, pi).
struct PhaseTrajectory {
  std::vector<double> times;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> phases;
  ModelTag model = ModelTag::KM;

  Eigen::Index steps() const noexcept { return phases.rows(); }
  Eigen::Index nodes() const noexcept { return phases.cols(); }
  Eigen::VectorXd at(Eigen::Index row) const { return phases.row(row).transpose(); }
  Eigen::VectorXd final_phases() const { return at(steps() - 1); }
};

/// State of the complex-valued flow, x in C^N.
struct ComplexState {
  Eigen::VectorXcd x;

  static ComplexState from_phases(const Eigen::VectorXd& theta);
  Eigen::VectorXd phases() const;
};

/// Ring buffer of past unit phasors e^{i theta_j}, one slot per time step.
///
/// Slot s holds step s modulo depth; reading a lag of L steps at step k
/// returns step k - L, which must be within depth - 1 of the newest write.
/// Depth ceil(max tau / dt) + 1 covers both delay lookup modes.
class HistoryBuffer {
 public:
  HistoryBuffer(Eigen::Index nodes, Eigen::Index depth);

  Eigen::Index depth() const noexcept { return depth_; }
  /// Stores the phasors of `theta` as step `step` (may be negative for
  /// pre-history).
  void write(long long step, const Eigen::VectorXd& theta);
  cplx lookup(long long step, Eigen::Index node) const {
    return data_[static_cast<std::size_t>(slot(step) * nodes_ + node)];
  }
  const cplx* row(long long step) const { return data_.data() + slot(step) * nodes_; }
  /// Slot-major storage, `depth() * nodes` phasors.
  const cplx* data() const noexcept { return data_.data(); }
  Eigen::Index slot(long long step) const noexcept {
    const long long d = depth_;
    return static_cast<Eigen::Index>(((step % d) + d) % d);
  }

 private:
  Eigen::Index nodes_;
  Eigen::Index depth_;
  std::vector<cplx> data_;
};

/// Explicit Euler on the delayed model
///   dtheta_i/dt = omega_i + eps * sum_j A_ij sin(theta_j(t - tau_ij) - theta_i(t)).
/// Delayed phases come from the history per cfg.delay_lookup; before t = 0
/// they follow cfg.history.
PhaseTrajectory integrate_dkm(const Network& net, const DelayMatrix& tau, const SimConfig& cfg,
                              const Eigen::VectorXd& theta0);

/// Explicit Euler on the non-delayed model.
PhaseTrajectory integrate_km(const Network& net, const SimConfig& cfg,
                             const Eigen::VectorXd& theta0);

/// Explicit Euler on the phase-lag model
///   dtheta_i/dt = omega_i + eps * sum_j A_ij sin(theta_j - theta_i - eta_ij).
PhaseTrajectory integrate_phase_lag(const Network& net, const Eigen::MatrixXd& eta,
                                    const SimConfig& cfg, const Eigen::VectorXd& theta0);

/// Elementwise renormalization to unit modulus. Throws NumericError when
/// an entry is below 1e-12 in modulus.
ComplexState unit_normalize(const Eigen::VectorXcd& y);

/// Precomputed one-interval map x -> exp(i omega sigma) exp(sigma W) x,
/// assembled from the eigendecomposition of W.
class FlowPropagator {
 public:
  FlowPropagator(const Spectrum& spec, double omega, double sigma);

  /// The linear map without renormalization.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return matrix_ * x; }
  /// One renormalized step.
  ComplexState step(const ComplexState& x) const { return unit_normalize(apply(x.x)); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

 private:
  Eigen::MatrixXcd matrix_;
};

/// x(t + sigma) = unit_normalize(exp(i omega sigma) exp(sigma W) x(t)).
/// Requires |x_i| = 1 and a spectrum decomposing `op`.
ComplexState complex_step(const ComplexState& x, const DelayOperator& op, double omega,
                          double sigma, const Spectrum& spec);

/// exp(i omega t) exp(t W) x0 with no renormalization.
ComplexState closed_form_state(const ComplexState& x0, const DelayOperator& op, double omega,
                               double t, const Spectrum& spec);

using ComplexObserver = std::function<void(double t, const ComplexState& x)>;

/// Iterates complex_step on the grid 0, sigma, ..., t_end (cfg.sigma_step
/// must divide cfg.t_end) and records Arg x at each point. `observer`, if
/// set, sees every state including x0.
PhaseTrajectory complex_trajectory(const ComplexState& x0, const DelayOperator& op, double omega,
                                   const SimConfig& cfg, const Spectrum& spec,
                                   const ComplexObserver& observer = {});

/// As above, computing the spectrum of `op` first.
PhaseTrajectory complex_trajectory(const ComplexState& x0, const DelayOperator& op, double omega,
                                   const SimConfig& cfg);

}  // namespace delayop
