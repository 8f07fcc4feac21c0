// delayop command-line driver: simulate, predict, sweep, direction, replay.
//
// Every run writes manifest.json next to its outputs. `delayop replay
// <manifest>` re-parses the recorded arguments, so a single-worker replay
// reproduces the tables byte for byte.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "delayop/analysis.hpp"
#include "delayop/errors.hpp"
#include "delayop/experiments.hpp"
#include "delayop/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedCells = 1;
constexpr int kExitError = 2;

struct Options {
  int n = 100;
  int k = 25;
  std::vector<double> epsilons{0.5};
  double omega_hz = 10.0;
  double nu = delayop::kDefaultRingSpeed;
  double dt = 1e-4;
  double sigma = 1e-3;
  double t_end = 10.0;
  std::uint64_t seed = 0;
  int seeds = 1;
  std::string model = "dkm";
  std::string ic = "random";
  double bias_amplitude = 0.8;
  int bias_mode = 3;
  std::string network_file;
  bool geometric = false;
  double density = 0.3;
  std::uint64_t net_seed = 7;
  double length_scale = 0.3;
  bool zero_delay = false;
  std::string history = "constant";
  std::string delay_lookup = "linear";
  int record_every = 10;
  std::string out = ".";
  int workers = 1;

  // simulate
  int stride = 1;
  bool modes = false;
  // predict
  int m = 2;
  bool eigenvectors = false;
  // direction
  int pos_mode = 3;
  int neg_mode = 99;
  double threshold = 0.9;

  bool nu_given = false;
};

const std::map<std::string, delayop::ModelTag> kModels{
    {"km", delayop::ModelTag::KM},
    {"dkm", delayop::ModelTag::DKM},
    {"phaselag", delayop::ModelTag::PhaseLag},
    {"complex", delayop::ModelTag::ComplexFlow},
};

void add_network_options(CLI::App* app, Options& o) {
  app->add_option("--n", o.n, "Node count for ring or geometric networks")->capture_default_str();
  app->add_option("--k", o.k, "Ring neighbours on each side")->capture_default_str();
  app->add_option("--omega-hz", o.omega_hz, "Natural frequency in Hz")->capture_default_str();
  app->add_option("--nu", o.nu, "Propagation speed, length units per second");
  app->add_option("--network", o.network_file, "Network file (nodes/pos/edge records)");
  app->add_flag("--geometric", o.geometric, "Random geometric network in the unit ball");
  app->add_option("--density", o.density, "Geometric edge density in (0, 1]")->capture_default_str();
  app->add_option("--net-seed", o.net_seed, "Geometric network seed")->capture_default_str();
  app->add_option("--length-scale", o.length_scale, "Geometric weight decay length")
      ->capture_default_str();
  app->add_flag("--zero-delay", o.zero_delay, "Drop all delays");
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void add_dynamics_options(CLI::App* app, Options& o) {
  app->add_option("--dt", o.dt, "Euler step, s")->capture_default_str();
  app->add_option("--sigma", o.sigma, "Complex-flow renormalization interval, s")
      ->capture_default_str();
  app->add_option("--t-end", o.t_end, "Integration horizon, s")->capture_default_str();
  app->add_option("--history", o.history, "Pre-history of delayed phases")
      ->check(CLI::IsMember({"constant", "backcast"}))
      ->capture_default_str();
  app->add_option("--delay-lookup", o.delay_lookup, "Delayed-phase sampling")
      ->check(CLI::IsMember({"linear", "nearest"}))
      ->capture_default_str();
  app->add_option("--record-every", o.record_every, "Keep every n-th Euler step")
      ->capture_default_str();
}

delayop::ExperimentParams to_params(const Options& o) {
  delayop::ExperimentParams p;
  auto& net = p.network;
  net.n = o.n;
  net.k = o.k;
  net.density = o.density;
  net.net_seed = o.net_seed;
  net.sigma = o.length_scale;
  if (!o.network_file.empty()) {
    net.kind = delayop::NetworkSpec::Kind::File;
    net.file = o.network_file;
  } else if (o.geometric) {
    net.kind = delayop::NetworkSpec::Kind::Geometric;
  }

  if (o.nu_given) {
    p.nu = o.nu;
  } else if (net.kind == delayop::NetworkSpec::Kind::Geometric) {
    p.nu = delayop::kDefaultGeometricSpeed;
  } else if (net.kind == delayop::NetworkSpec::Kind::File && !o.zero_delay) {
    throw delayop::ParameterError("--nu is required with --network (distances are in file units)");
  }

  p.epsilon = o.epsilons.front();
  p.omega_hz = o.omega_hz;
  p.zero_delay = o.zero_delay;
  p.dt = o.dt;
  p.sigma = o.sigma;
  p.t_end = o.t_end;
  p.history = o.history == "backcast" ? delayop::HistoryPolicy::LinearBackcast
                                      : delayop::HistoryPolicy::ConstantInitial;
  p.delay_lookup = o.delay_lookup == "nearest" ? delayop::DelayLookup::Nearest
                                               : delayop::DelayLookup::Linear;
  p.record_every = o.record_every;
  return p;
}

json params_json(const delayop::ExperimentParams& p) {
  const auto& net = p.network;
  json j;
  switch (net.kind) {
    case delayop::NetworkSpec::Kind::Ring:
      j["network"] = {{"kind", "ring"}, {"n", net.n}, {"k", net.k}};
      break;
    case delayop::NetworkSpec::Kind::Geometric:
      j["network"] = {{"kind", "geometric"}, {"n", net.n}, {"density", net.density},
                      {"net_seed", net.net_seed}, {"length_scale", net.sigma}};
      break;
    case delayop::NetworkSpec::Kind::File:
      j["network"] = {{"kind", "file"}, {"path", net.file.string()}};
      break;
  }
  j["epsilon"] = p.epsilon;
  j["omega_hz"] = p.omega_hz;
  j["omega"] = p.omega();
  j["nu"] = p.nu;
  j["zero_delay"] = p.zero_delay;
  j["dt"] = p.dt;
  j["sigma"] = p.sigma;
  j["t_end"] = p.t_end;
  j["history"] = p.history == delayop::HistoryPolicy::LinearBackcast ? "backcast" : "constant";
  j["delay_lookup"] = p.delay_lookup == delayop::DelayLookup::Nearest ? "nearest" : "linear";
  j["record_every"] = p.record_every;
  return j;
}

std::vector<std::uint64_t> seed_list(const Options& o) {
  if (o.seeds < 1) throw delayop::ParameterError("--seeds must be >= 1");
  std::vector<std::uint64_t> s(static_cast<std::size_t>(o.seeds));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = o.seed + i;
  return s;
}

// Collects output paths and writes the manifest, including on failure.
class Run {
 public:
  Run(std::string subcommand, std::vector<std::string> argv, const Options& o)
      : subcommand_(std::move(subcommand)), argv_(std::move(argv)), out_(o.out),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_);
  }

  std::ofstream open(const std::string& name) {
    outputs_.push_back(name);
    return delayop::io::open_output(out_ / name);
  }

  void write_json(const std::string& name, const json& j) {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }

  json manifest;

  void finish(int exit_code) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest["subcommand"] = subcommand_;
    manifest["argv"] = argv_;
    manifest["version"] = delayop::version();
    manifest["outputs"] = outputs_;
    manifest["wall_clock_seconds"] = wall;
    manifest["exit_code"] = exit_code;
    std::ofstream f = delayop::io::open_output(out_ / "manifest.json");
    f << manifest.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  std::vector<std::string> argv_;
  fs::path out_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

Eigen::VectorXd initial_phases(const Options& o, const delayop::ExperimentParams& p,
                               Eigen::Index n) {
  if (o.ic == "random") return delayop::random_ic(n, o.seed);
  const auto pred = delayop::run_predict(p, 1);
  return delayop::biased_ic(delayop::predicted_pattern(pred.spectrum, o.bias_mode),
                            o.bias_amplitude, o.seed);
}

int cmd_simulate(const Options& o, Run& run) {
  const auto p = to_params(o);
  const auto model = kModels.at(o.model);
  const auto n = delayop::make_network(p.network).size();
  const Eigen::VectorXd theta0 = initial_phases(o, p, n);

  run.manifest["parameters"] = params_json(p);
  run.manifest["parameters"]["model"] = o.model;
  run.manifest["parameters"]["ic"] = o.ic;
  run.manifest["parameters"]["bias_amplitude"] = o.bias_amplitude;
  run.manifest["parameters"]["bias_mode"] = o.bias_mode;
  run.manifest["seeds"] = {o.seed};

  const auto res = delayop::run_simulation(p, model, theta0, o.modes);
  {
    auto f = run.open("trajectory.csv");
    delayop::io::write_trajectory(f, res.trajectory, o.stride);
  }
  {
    auto f = run.open("order_parameter.csv");
    delayop::io::write_order_parameter(f, res.trajectory, o.stride);
  }
  if (!res.states.empty()) {
    auto f = run.open("complex_states.csv");
    delayop::io::write_complex_states(f, res.trajectory.times, res.states);
  }
  if (o.modes) {
    auto f = run.open("mode_contributions.csv");
    delayop::io::write_mode_contributions(f, res.trajectory.times, res.modes);
  }
  const auto& traj = res.trajectory;
  run.write_json("summary.json",
                 {{"model", o.model},
                  {"steps_recorded", traj.steps()},
                  {"mean_R", delayop::mean_order_parameter(traj, 0.0, p.t_end)},
                  {"final_R", delayop::order_parameter(traj.final_phases())}});
  return kExitOk;
}

int cmd_predict(const Options& o, Run& run) {
  const auto p = to_params(o);
  run.manifest["parameters"] = params_json(p);
  run.manifest["parameters"]["m"] = o.m;
  run.manifest["seeds"] = json::array();

  const auto pred = delayop::run_predict(p, o.m);
  {
    auto f = run.open("spectrum.csv");
    delayop::io::write_spectrum(f, pred.spectrum);
  }
  {
    auto f = run.open("spectrum_nodelay.csv");
    delayop::io::write_spectrum(f, pred.spectrum_nodelay);
  }
  if (o.eigenvectors) {
    auto f = run.open("eigenvectors.csv");
    delayop::io::write_eigenvectors(f, pred.spectrum);
  }
  {
    auto f = run.open("patterns.csv");
    f.precision(17);
    f << "node";
    for (int mode : pred.leading) f << ",mode_" << mode;
    f << '\n';
    for (Eigen::Index i = 0; i < pred.patterns.rows(); ++i) {
      f << i;
      for (Eigen::Index j = 0; j < pred.patterns.cols(); ++j) f << ',' << pred.patterns(i, j);
      f << '\n';
    }
  }
  auto eig = [](const delayop::Spectrum& s, const std::vector<int>& modes) {
    json a = json::array();
    for (int k : modes)
      a.push_back({{"mode", k}, {"re", s.eigenvalue(k).real()}, {"im", s.eigenvalue(k).imag()}});
    return a;
  };
  run.write_json(
      "summary.json",
      {{"ordering", pred.spectrum.ordering == delayop::ModeOrdering::Cdt ? "cdt" : "descending_real"},
       {"is_circulant", pred.op.is_circulant},
       {"residual", delayop::max_residual(pred.op.w, pred.spectrum)},
       {"leading", eig(pred.spectrum, pred.leading)},
       {"leading_nodelay", eig(pred.spectrum_nodelay, pred.leading_nodelay)}});
  return kExitOk;
}

int cmd_sweep(const Options& o, Run& run) {
  const auto p = to_params(o);
  const auto seeds = seed_list(o);
  run.manifest["parameters"] = params_json(p);
  run.manifest["parameters"]["epsilon"] = o.epsilons;
  run.manifest["seeds"] = seeds;
  run.manifest["workers"] = o.workers;

  const auto cells = delayop::run_sweep(p, o.epsilons, seeds, o.workers);
  json failed = json::array();
  {
    auto f = run.open("sweep.csv");
    f.precision(17);
    f << "epsilon,seed,r_km,r_dkm,r_complex,r_complex_nodelay,status\n";
    for (const auto& c : cells) {
      f << c.epsilon << ',' << c.seed << ',';
      if (c.ok) {
        f << c.r_km << ',' << c.r_dkm << ',' << c.r_complex << ',' << c.r_complex_nodelay << ",ok\n";
      } else {
        f << ",,,,failed\n";
        failed.push_back({{"epsilon", c.epsilon}, {"seed", c.seed}, {"error", c.error}});
        std::cerr << "cell eps=" << c.epsilon << " seed=" << c.seed << " failed: " << c.error
                  << '\n';
      }
    }
  }
  run.manifest["failed_cells"] = failed;
  return failed.empty() ? kExitOk : kExitFailedCells;
}

int cmd_direction(const Options& o, Run& run) {
  const auto p = to_params(o);
  const auto seeds = seed_list(o);
  delayop::DirectionOptions d;
  d.ic = o.ic == "biased" ? delayop::IcMode::Biased : delayop::IcMode::Random;
  d.bias_amplitude = o.bias_amplitude;
  d.bias_mode = o.bias_mode;
  d.pos_mode = o.pos_mode;
  d.neg_mode = o.neg_mode;
  d.threshold = o.threshold;

  run.manifest["parameters"] = params_json(p);
  run.manifest["parameters"]["ic"] = o.ic;
  run.manifest["parameters"]["bias_amplitude"] = o.bias_amplitude;
  run.manifest["parameters"]["bias_mode"] = o.bias_mode;
  run.manifest["parameters"]["pos_mode"] = o.pos_mode;
  run.manifest["parameters"]["neg_mode"] = o.neg_mode;
  run.manifest["parameters"]["threshold"] = o.threshold;
  run.manifest["seeds"] = seeds;
  run.manifest["workers"] = o.workers;

  const auto res = delayop::run_direction(p, seeds, d, o.workers);
  {
    auto f = run.open("direction.csv");
    delayop::io::write_direction_records(f, res.stats);
  }
  json failed = json::array();
  for (const auto& e : res.failures) {
    failed.push_back({{"seed", e.seed}, {"error", e.error}});
    std::cerr << "seed " << e.seed << " failed: " << e.error << '\n';
  }
  run.manifest["failed_cells"] = failed;
  const auto& s = res.stats;
  run.write_json("summary.json", {{"runs", s.records.size()},
                                  {"failed", res.failures.size()},
                                  {"fraction_positive", s.fraction(+1)},
                                  {"fraction_negative", s.fraction(-1)},
                                  {"fraction_unclassified", s.fraction(0)}});
  return failed.empty() ? kExitOk : kExitFailedCells;
}

int dispatch(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, const std::string& out) {
  std::ifstream in(manifest_path);
  if (!in) throw delayop::Error("cannot read manifest '" + manifest_path + "'");
  const json m = json::parse(in);
  auto args = m.at("argv").get<std::vector<std::string>>();
  if (!out.empty()) {
    for (auto it = args.begin(); it != args.end();) {
      if (*it == "--out" && std::next(it) != args.end()) {
        it = args.erase(it, it + 2);
      } else if (it->rfind("--out=", 0) == 0) {
        it = args.erase(it);
      } else {
        ++it;
      }
    }
    args.push_back("--out");
    args.push_back(out);
  }
  return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Delay-coupled phase oscillator networks and their delay operator"};
  app.set_version_flag("--version", std::string(delayop::version()));
  app.require_subcommand(1);

  Options o;
  auto* simulate = app.add_subcommand("simulate", "Integrate one model from one initial condition");
  auto* predict = app.add_subcommand("predict", "Spectrum of the delay operator and predicted patterns");
  auto* sweep = app.add_subcommand("sweep", "Time-averaged order parameter over an (epsilon, seed) grid");
  auto* direction = app.add_subcommand("direction", "Wave direction statistics over many seeds");
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");

  for (auto* sub : {simulate, predict, sweep, direction}) add_network_options(sub, o);
  for (auto* sub : {simulate, sweep, direction}) add_dynamics_options(sub, o);

  for (auto* sub : {simulate, predict, direction})
    sub->add_option("--epsilon", o.epsilons, "Coupling strength")->expected(1)->capture_default_str();
  sweep->add_option("--epsilon", o.epsilons, "Coupling strengths (grid)")
      ->expected(1, CLI::detail::expected_max_vector_size)
      ->delimiter(',');
  o.epsilons = {0.5};

  for (auto* sub : {simulate, sweep, direction})
    sub->add_option("--seed", o.seed, "First seed")->capture_default_str();
  for (auto* sub : {sweep, direction})
    sub->add_option("--seeds", o.seeds, "Number of consecutive seeds")->capture_default_str();
  for (auto* sub : {sweep, direction})
    sub->add_option("--workers", o.workers, "Worker threads")->capture_default_str();
  for (auto* sub : {simulate, direction}) {
    sub->add_option("--ic", o.ic, "Initial condition")
        ->check(CLI::IsMember({"random", "biased"}))
        ->capture_default_str();
    sub->add_option("--bias-amplitude", o.bias_amplitude, "Noise amplitude around the biased pattern")
        ->capture_default_str();
    sub->add_option("--bias-mode", o.bias_mode, "Mode whose pattern biased ICs start near")
        ->capture_default_str();
  }

  simulate->add_option("--model", o.model, "Model to integrate")
      ->check(CLI::IsMember({"km", "dkm", "phaselag", "complex"}))
      ->capture_default_str();
  simulate->add_option("--stride", o.stride, "Write every n-th recorded row")->capture_default_str();
  simulate->add_flag("--modes", o.modes, "Also write log10 |mu_k(t)|");

  predict->add_option("--m", o.m, "Number of leading modes")->capture_default_str();
  predict->add_flag("--eigenvectors", o.eigenvectors, "Also write all eigenvectors");

  direction->add_option("--pos-mode", o.pos_mode, "Mode labelled +1")->capture_default_str();
  direction->add_option("--neg-mode", o.neg_mode, "Mode labelled -1")->capture_default_str();
  direction->add_option("--threshold", o.threshold, "Minimum rho to classify")
      ->capture_default_str();

  std::string manifest_path, replay_out;
  replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out, "Output directory (defaults to the recorded one)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  if (replay->parsed()) return cmd_replay(manifest_path, replay_out);

  CLI::App* sub = app.get_subcommands().front();
  o.nu_given = sub->count("--nu") > 0;
  if (sweep->parsed() && sweep->count("--seeds") == 0) o.seeds = 3;
  if (direction->parsed() && direction->count("--seeds") == 0) o.seeds = 20;

  Run run(sub->get_name(), args, o);
  int rc = kExitError;
  try {
    if (sub == simulate) rc = cmd_simulate(o, run);
    else if (sub == predict) rc = cmd_predict(o, run);
    else if (sub == sweep) rc = cmd_sweep(o, run);
    else rc = cmd_direction(o, run);
  } catch (const std::exception& e) {
    run.manifest["error"] = e.what();
    run.finish(kExitError);
    throw;
  }
  run.finish(rc);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "delayop: " << e.what() << '\n';
    return kExitError;
  }
}
