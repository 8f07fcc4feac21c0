#include "delayop/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "delayop/errors.hpp"
#include "delayop/phase.hpp"

namespace delayop {

std::string_view to_string(ModelTag tag) noexcept {
  switch (tag) {
    case ModelTag::KM: return "km";
    case ModelTag::DKM: return "dkm";
    case ModelTag::PhaseLag: return "phaselag";
    case ModelTag::ComplexFlow: return "complex";
  }
  return "unknown";
}

void SimConfig::validate(Eigen::Index n) const {
  if (omega.size() != 1 && omega.size() != n)
    throw ParameterError("SimConfig: omega must have 1 or " + std::to_string(n) + " entries");
  if (!omega.allFinite()) throw ParameterError("SimConfig: omega entries must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ParameterError("SimConfig: epsilon must be finite and non-negative");
  if (!(dt > 0.0)) throw ParameterError("SimConfig: dt must be positive");
  if (!(sigma_step >= dt)) throw ParameterError("SimConfig: sigma_step must be >= dt");
  if (!(t_end >= sigma_step)) throw ParameterError("SimConfig: t_end must be >= sigma_step");
  if (record_every < 1) throw ParameterError("SimConfig: record_every must be >= 1");
}

Eigen::VectorXd SimConfig::omega_per_node(Eigen::Index n) const {
  return omega.size() == 1 ? Eigen::VectorXd::Constant(n, omega(0)) : omega;
}

ComplexState ComplexState::from_phases(const Eigen::VectorXd& theta) {
  ComplexState s;
  s.x.resize(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) s.x(i) = std::polar(1.0, theta(i));
  return s;
}

Eigen::VectorXd ComplexState::phases() const {
  Eigen::VectorXd theta(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) theta(i) = wrapped_arg(x(i));
  return theta;
}

HistoryBuffer::HistoryBuffer(Eigen::Index nodes, Eigen::Index depth)
    : nodes_(nodes), depth_(depth), data_(static_cast<std::size_t>(nodes * depth)) {
  if (depth < 1) throw ParameterError("HistoryBuffer: depth must be >= 1");
}

void HistoryBuffer::write(long long step, const Eigen::VectorXd& theta) {
  cplx* dst = data_.data() + slot(step) * nodes_;
  for (Eigen::Index i = 0; i < nodes_; ++i) dst[i] = {std::cos(theta(i)), std::sin(theta(i))};
}

namespace {

// Coupling terms in compressed-row form: node i receives
// factor * e^{i theta_j(t - (lag + frac) * dt)} from every stored edge,
// the delayed phasor blended linearly between steps lag and lag + 1.
struct CouplingGraph {
  std::vector<Eigen::Index> row_start;
  std::vector<Eigen::Index> source;
  std::vector<cplx> factor;
  std::vector<long long> lag;
  std::vector<double> frac;
  long long max_lag = 0;
};

// `delay_steps` holds tau / dt (null for instantaneous coupling).
CouplingGraph make_graph(const Network& net, const Eigen::MatrixXd* eta,
                         const Eigen::MatrixXd* delay_steps, DelayLookup lookup) {
  const Eigen::Index n = net.size();
  CouplingGraph g;
  g.row_start.reserve(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    g.row_start.push_back(static_cast<Eigen::Index>(g.source.size()));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = net.weights(i, j);
      if (a == 0.0 || i == j) continue;
      g.source.push_back(j);
      g.factor.push_back(eta ? a * std::polar(1.0, -(*eta)(i, j)) : cplx{a, 0.0});
      long long l = 0;
      double f = 0.0;
      if (delay_steps) {
        const double steps = (*delay_steps)(i, j);
        if (lookup == DelayLookup::Nearest) {
          l = std::llround(steps);
        } else {
          l = static_cast<long long>(std::floor(steps));
          f = steps - static_cast<double>(l);
        }
      }
      g.lag.push_back(l);
      g.frac.push_back(f);
      g.max_lag = std::max(g.max_lag, f > 0.0 ? l + 1 : l);
    }
  }
  g.row_start.push_back(static_cast<Eigen::Index>(g.source.size()));
  return g;
}

void check_initial(const Network& net, const SimConfig& cfg, const Eigen::VectorXd& theta0) {
  if (net.weights.rows() != net.weights.cols())
    throw StructuralError("network weight matrix is not square");
  if (theta0.size() != net.size())
    throw StructuralError("initial phase vector has " + std::to_string(theta0.size()) +
                          " entries, network has " + std::to_string(net.size()));
  if (!theta0.allFinite()) throw ParameterError("initial phases must be finite");
  cfg.validate(net.size());
}

PhaseTrajectory run_euler(const CouplingGraph& g, const SimConfig& cfg,
                          const Eigen::VectorXd& theta0, ModelTag tag, Eigen::Index depth) {
  const Eigen::Index n = theta0.size();
  const Eigen::VectorXd omega = cfg.omega_per_node(n);
  const long long steps = std::llround(cfg.t_end / cfg.dt);

  HistoryBuffer history(n, depth);
  Eigen::VectorXd theta = theta0.unaryExpr([](double v) { return wrap_phase(v); });
  for (long long s = -(depth - 1); s < 0; ++s) {
    if (cfg.history == HistoryPolicy::ConstantInitial) {
      history.write(s, theta);
    } else {
      history.write(s, theta + omega * (static_cast<double>(s) * cfg.dt));
    }
  }

  PhaseTrajectory traj;
  traj.model = tag;
  const long long rows = steps / cfg.record_every + 1 + (steps % cfg.record_every != 0);
  traj.phases.resize(rows, n);
  traj.times.reserve(static_cast<std::size_t>(rows));

  Eigen::VectorXd next(n);
  for (long long k = 0;; ++k) {
    if (k % cfg.record_every == 0 || k == steps) {
      traj.phases.row(static_cast<Eigen::Index>(traj.times.size())) = theta.transpose();
      traj.times.push_back(static_cast<double>(k) * cfg.dt);
    }
    if (k == steps) break;

    history.write(k, theta);
    const cplx* ring = history.data();
    const Eigen::Index slot_now = history.slot(k);
    const cplx* now = ring + slot_now * n;
    for (Eigen::Index i = 0; i < n; ++i) {
      cplx field = 0.0;
      const auto lo = static_cast<std::size_t>(g.row_start[static_cast<std::size_t>(i)]);
      const auto hi = static_cast<std::size_t>(g.row_start[static_cast<std::size_t>(i + 1)]);
      for (auto e = lo; e < hi; ++e) {
        Eigen::Index slot = slot_now - g.lag[e];
        if (slot < 0) slot += depth;
        cplx z = ring[slot * n + g.source[e]];
        if (g.frac[e] != 0.0) {
          const Eigen::Index older = slot == 0 ? depth - 1 : slot - 1;
          z += g.frac[e] * (ring[older * n + g.source[e]] - z);
        }
        field += g.factor[e] * z;
      }
      // Im(conj(z_i) * field) = sum_j A_ij sin(theta_j - theta_i - eta_ij)
      const double coupling = now[i].real() * field.imag() - now[i].imag() * field.real();
      next(i) = theta(i) + cfg.dt * (omega(i) + cfg.epsilon * coupling);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(next(i)))
        throw NumericError("non-finite phase at node " + std::to_string(i), k + 1);
      theta(i) = wrap_phase(next(i));
    }
  }
  return traj;
}

}  // namespace

PhaseTrajectory integrate_dkm(const Network& net, const DelayMatrix& tau, const SimConfig& cfg,
                              const Eigen::VectorXd& theta0) {
  check_initial(net, cfg, theta0);
  if (tau.tau.rows() != net.size() || tau.tau.cols() != net.size())
    throw StructuralError("delay matrix does not match network size");
  if ((tau.tau.array() < 0.0).any() || !tau.tau.allFinite())
    throw ParameterError("delays must be finite and non-negative");

  const double max_steps = std::ceil(tau.max_delay() / cfg.dt);
  constexpr double kMaxBufferEntries = 2e8;
  if ((max_steps + 1.0) * static_cast<double>(net.size()) > kMaxBufferEntries)
    throw ParameterError("integrate_dkm: history buffer for max delay " +
                         std::to_string(tau.max_delay()) + " s at dt " + std::to_string(cfg.dt) +
                         " exceeds the supported size");

  const Eigen::MatrixXd delay_steps = tau.tau / cfg.dt;
  const auto g = make_graph(net, nullptr, &delay_steps, cfg.delay_lookup);
  const auto depth = static_cast<Eigen::Index>(std::max<double>(max_steps, g.max_lag)) + 1;
  return run_euler(g, cfg, theta0, ModelTag::DKM, depth);
}

PhaseTrajectory integrate_km(const Network& net, const SimConfig& cfg,
                             const Eigen::VectorXd& theta0) {
  check_initial(net, cfg, theta0);
  return run_euler(make_graph(net, nullptr, nullptr, cfg.delay_lookup), cfg, theta0, ModelTag::KM, 1);
}

PhaseTrajectory integrate_phase_lag(const Network& net, const Eigen::MatrixXd& eta,
                                    const SimConfig& cfg, const Eigen::VectorXd& theta0) {
  check_initial(net, cfg, theta0);
  if (eta.rows() != net.size() || eta.cols() != net.size())
    throw StructuralError("phase-lag matrix does not match network size");
  if (!eta.allFinite()) throw ParameterError("phase lags must be finite");
  return run_euler(make_graph(net, &eta, nullptr, cfg.delay_lookup), cfg, theta0, ModelTag::PhaseLag, 1);
}

ComplexState unit_normalize(const Eigen::VectorXcd& y) {
  constexpr double kFloor = 1e-12;
  ComplexState out;
  out.x.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double r = std::abs(y(i));
    if (!(r >= kFloor))
      throw NumericError("unit_normalize: entry " + std::to_string(i) + " has modulus " +
                         std::to_string(r) + ", renormalization undefined");
    // Entries already on the unit circle are kept bit for bit.
    out.x(i) = std::abs(r - 1.0) <= 2.0 * std::numeric_limits<double>::epsilon() ? y(i) : y(i) / r;
  }
  return out;
}

namespace {

void check_spectrum(const DelayOperator& op, const Spectrum& spec) {
  if (spec.size() != op.size() || spec.eigenvectors.rows() != op.size())
    throw StructuralError("spectrum dimension does not match operator");
}

void check_state(const ComplexState& x, const DelayOperator& op) {
  if (x.x.size() != op.size()) throw StructuralError("state dimension does not match operator");
  for (Eigen::Index i = 0; i < x.x.size(); ++i)
    if (std::abs(std::abs(x.x(i)) - 1.0) > 1e-10)
      throw ParameterError("complex state must have unit-modulus entries");
}

// V^{-1} y, using V^H for unitary bases.
Eigen::VectorXcd modal_coordinates(const Spectrum& spec, const Eigen::VectorXcd& y) {
  if (spec.orthonormal()) return spec.eigenvectors.adjoint() * y;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(spec.eigenvectors);
  if (lu.rcond() < 1e-13) throw NumericError("eigenvector matrix is numerically singular");
  return lu.solve(y);
}

Eigen::VectorXcd propagate(const Spectrum& spec, const Eigen::VectorXcd& x, double omega,
                           double t) {
  Eigen::VectorXcd c = modal_coordinates(spec, x);
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(spec.eigenvalues(k) * t);
  return std::polar(1.0, omega * t) * (spec.eigenvectors * c);
}

}  // namespace

FlowPropagator::FlowPropagator(const Spectrum& spec, double omega, double sigma) {
  const Eigen::Index n = spec.size();
  Eigen::MatrixXcd scaled = spec.eigenvectors;
  for (Eigen::Index k = 0; k < n; ++k)
    scaled.col(k) *= std::polar(1.0, omega * sigma) * std::exp(spec.eigenvalues(k) * sigma);
  if (spec.orthonormal()) {
    matrix_ = scaled * spec.eigenvectors.adjoint();
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(spec.eigenvectors);
    if (lu.rcond() < 1e-13) throw NumericError("eigenvector matrix is numerically singular");
    matrix_ = scaled * lu.inverse();
  }
}

ComplexState complex_step(const ComplexState& x, const DelayOperator& op, double omega,
                          double sigma, const Spectrum& spec) {
  check_spectrum(op, spec);
  check_state(x, op);
  return unit_normalize(propagate(spec, x.x, omega, sigma));
}

ComplexState closed_form_state(const ComplexState& x0, const DelayOperator& op, double omega,
                               double t, const Spectrum& spec) {
  check_spectrum(op, spec);
  if (x0.x.size() != op.size()) throw StructuralError("state dimension does not match operator");
  if (t == 0.0) return x0;
  return ComplexState{propagate(spec, x0.x, omega, t)};
}

PhaseTrajectory complex_trajectory(const ComplexState& x0, const DelayOperator& op, double omega,
                                   const SimConfig& cfg, const Spectrum& spec,
                                   const ComplexObserver& observer) {
  check_spectrum(op, spec);
  check_state(x0, op);
  cfg.validate(op.size());
  const long long steps = std::llround(cfg.t_end / cfg.sigma_step);
  if (std::abs(static_cast<double>(steps) * cfg.sigma_step - cfg.t_end) >
      1e-12 * std::max(1.0, cfg.t_end))
    throw ParameterError("complex_trajectory: sigma_step must divide t_end");

  const FlowPropagator prop(spec, omega, cfg.sigma_step);
  PhaseTrajectory traj;
  traj.model = ModelTag::ComplexFlow;
  traj.phases.resize(steps + 1, op.size());
  traj.times.reserve(static_cast<std::size_t>(steps + 1));

  ComplexState x = x0;
  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.sigma_step;
    traj.times.push_back(t);
    traj.phases.row(k) = x.phases().transpose();
    if (observer) observer(t, x);
    if (k == steps) break;
    try {
      x = prop.step(x);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), k + 1);
    }
  }
  return traj;
}

PhaseTrajectory complex_trajectory(const ComplexState& x0, const DelayOperator& op, double omega,
                                   const SimConfig& cfg) {
  return complex_trajectory(x0, op, omega, cfg, spectrum_of(op));
}

}  // namespace delayop
