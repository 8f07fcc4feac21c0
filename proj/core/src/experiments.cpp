#include "delayop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "delayop/errors.hpp"
#include "delayop/phase.hpp"

namespace delayop {

const char* version() noexcept { return DELAYOP_VERSION; }

double ExperimentParams::omega() const { return kTwoPi * omega_hz; }

SimConfig ExperimentParams::sim_config(double epsilon_override) const {
  SimConfig cfg;
  cfg.omega = Eigen::VectorXd::Constant(1, omega());
  cfg.epsilon = epsilon_override >= 0.0 ? epsilon_override : epsilon;
  cfg.dt = dt;
  cfg.sigma_step = sigma;
  cfg.t_end = t_end;
  cfg.history = history;
  cfg.delay_lookup = delay_lookup;
  cfg.record_every = record_every;
  return cfg;
}

Network make_network(const NetworkSpec& spec) {
  switch (spec.kind) {
    case NetworkSpec::Kind::Ring: return build_ring(spec.n, spec.k);
    case NetworkSpec::Kind::Geometric:
      return synth_geometric(spec.n, spec.density, spec.net_seed, GeometricOptions{spec.sigma});
    case NetworkSpec::Kind::File: return load_network(spec.file);
  }
  throw ParameterError("unknown network kind");
}

DelayMatrix make_delays(const Network& net, const ExperimentParams& p) {
  return p.zero_delay ? zero_delays(net) : delays_from_distances(net, p.nu);
}

void run_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  const auto threads = static_cast<std::size_t>(std::clamp<long long>(
      workers, 1, static_cast<long long>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (threads == 1) {
    drain();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
}

std::vector<SweepCell> run_sweep(const ExperimentParams& p, const std::vector<double>& epsilons,
                                 const std::vector<std::uint64_t>& seeds, int workers) {
  if (epsilons.empty() || seeds.empty())
    throw ParameterError("run_sweep: epsilon grid and seed list must be non-empty");
  const Network net = make_network(p.network);
  const DelayMatrix tau = make_delays(net, p);
  const DelayMatrix none = zero_delays(net);

  std::vector<SweepCell> cells(epsilons.size() * seeds.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e)
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      auto& c = cells[e * seeds.size() + s];
      c.epsilon = epsilons[e];
      c.seed = seeds[s];
    }

  run_parallel(cells.size(), workers, [&](std::size_t i) {
    SweepCell& c = cells[i];
    try {
      const SimConfig cfg = p.sim_config(c.epsilon);
      const Eigen::VectorXd theta0 = random_ic(net.size(), c.seed);
      const auto x0 = ComplexState::from_phases(theta0);
      const double t0 = 0.0;
      c.r_km = mean_order_parameter(integrate_km(net, cfg, theta0), t0, p.t_end);
      c.r_dkm = mean_order_parameter(integrate_dkm(net, tau, cfg, theta0), t0, p.t_end);
      const auto w = build_delay_operator(net, tau, p.omega(), c.epsilon);
      c.r_complex = mean_order_parameter(complex_trajectory(x0, w, p.omega(), cfg), t0, p.t_end);
      const auto w0 = build_delay_operator(net, none, p.omega(), c.epsilon);
      c.r_complex_nodelay =
          mean_order_parameter(complex_trajectory(x0, w0, p.omega(), cfg), t0, p.t_end);
      c.ok = true;
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = e.what();
    }
  });
  return cells;
}

SimulationResult run_simulation(const ExperimentParams& p, ModelTag model,
                                const Eigen::VectorXd& theta0, bool with_modes) {
  const Network net = make_network(p.network);
  const DelayMatrix tau = make_delays(net, p);
  const SimConfig cfg = p.sim_config();

  SimulationResult out;
  std::optional<DelayOperator> op;
  std::optional<Spectrum> spec;
  if (model == ModelTag::ComplexFlow || with_modes) {
    op = build_delay_operator(net, tau, p.omega(), p.epsilon);
    spec = spectrum_of(*op);
  }

  switch (model) {
    case ModelTag::KM: out.trajectory = integrate_km(net, cfg, theta0); break;
    case ModelTag::DKM: out.trajectory = integrate_dkm(net, tau, cfg, theta0); break;
    case ModelTag::PhaseLag:
      out.trajectory = integrate_phase_lag(net, p.omega() * tau.tau, cfg, theta0);
      break;
    case ModelTag::ComplexFlow:
      out.trajectory = complex_trajectory(ComplexState::from_phases(theta0), *op, p.omega(), cfg,
                                          *spec, [&](double, const ComplexState& x) {
                                            out.states.push_back(x);
                                          });
      break;
  }

  if (with_modes) {
    out.modes.reserve(static_cast<std::size_t>(out.trajectory.steps()));
    for (Eigen::Index r = 0; r < out.trajectory.steps(); ++r) {
      const ComplexState x = model == ModelTag::ComplexFlow
                                 ? out.states[static_cast<std::size_t>(r)]
                                 : ComplexState::from_phases(out.trajectory.at(r));
      out.modes.push_back(mode_contributions(x, *spec));
    }
  }
  return out;
}

Prediction run_predict(const ExperimentParams& p, int m) {
  const Network net = make_network(p.network);
  Prediction out;
  out.op = build_delay_operator(net, make_delays(net, p), p.omega(), p.epsilon);
  out.spectrum = spectrum_of(out.op);
  out.spectrum_nodelay = spectrum_of(build_delay_operator(net, zero_delays(net), p.omega(), p.epsilon));
  out.leading = leading_modes(out.spectrum, m);
  out.leading_nodelay = leading_modes(out.spectrum_nodelay, m);
  out.patterns.resize(net.size(), m);
  for (int j = 0; j < m; ++j)
    out.patterns.col(j) = predicted_pattern(out.spectrum, out.leading[static_cast<std::size_t>(j)]);
  return out;
}

DirectionResult run_direction(const ExperimentParams& p, const std::vector<std::uint64_t>& seeds,
                              const DirectionOptions& opts, int workers) {
  if (seeds.empty()) throw ParameterError("run_direction: seed list must be non-empty");
  const Network net = make_network(p.network);
  const DelayMatrix tau = make_delays(net, p);
  const Spectrum spec = spectrum_of(build_delay_operator(net, tau, p.omega(), p.epsilon));
  const Eigen::VectorXd pos = predicted_pattern(spec, opts.pos_mode);
  const Eigen::VectorXd neg = predicted_pattern(spec, opts.neg_mode);
  const Eigen::VectorXd bias = predicted_pattern(spec, opts.bias_mode);

  SimConfig cfg = p.sim_config();
  // Only the final phases are classified.
  cfg.record_every = std::numeric_limits<int>::max();

  std::vector<DirectionRecord> records(seeds.size());
  std::vector<std::string> errors(seeds.size());
  run_parallel(seeds.size(), workers, [&](std::size_t i) {
    auto& r = records[i];
    r.seed = seeds[i];
    try {
      const Eigen::VectorXd theta0 = opts.ic == IcMode::Random
                                         ? random_ic(net.size(), r.seed)
                                         : biased_ic(bias, opts.bias_amplitude, r.seed);
      const Eigen::VectorXd final = integrate_dkm(net, tau, cfg, theta0).final_phases();
      r.rho_pos = pattern_match(final, pos);
      r.rho_neg = pattern_match(final, neg);
      r.label = classify_direction(final, spec, opts.pos_mode, opts.neg_mode, opts.threshold);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  DirectionResult out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (errors[i].empty()) {
      out.stats.records.push_back(records[i]);
    } else {
      out.failures.push_back({seeds[i], errors[i]});
    }
  }
  return out;
}

}  // namespace delayop
