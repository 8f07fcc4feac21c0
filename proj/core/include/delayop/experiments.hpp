#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delayop/analysis.hpp"
#include "delayop/dynamics.hpp"
#include "delayop/network.hpp"
#include "delayop/spectral.hpp"

namespace delayop {

/// Library version, "major.minor.patch".
const char* version() noexcept;

/// Ring conduction speed in hops/s. Places the nearest-neighbour delay at
/// about 2.2 ms and the k = 25 delay at about 55 ms, splitting the relative
/// error evenly between the 2 ms and 62 ms ends of the target range.
inline constexpr double kDefaultRingSpeed = 1000.0 * (0.5 + 25.0 / 62.0) / 2.0;

/// Ring speed that puts the k = 25 delay at exactly 62 ms.
inline constexpr double kRingSpeedMaxEndpoint = 25.0 / 0.062;

/// Geometric stand-in speed: unit-ball radius read as 70 mm of cortex with
/// 5 m/s axonal conduction.
inline constexpr double kDefaultGeometricSpeed = 5.0 / 0.07;

/// Which network an experiment runs on.
struct NetworkSpec {
  enum class Kind { Ring, Geometric, File };
  Kind kind = Kind::Ring;
  int n = 100;
  int k = 25;
  double density = 0.3;
  std::uint64_t net_seed = 7;
  double sigma = 0.3;
  std::filesystem::path file;
};

/// Full parameter set shared by all experiment runners.
struct ExperimentParams {
  NetworkSpec network;
  double epsilon = 0.5;
  double omega_hz = 10.0;
  /// Propagation speed, distance units per second.
  double nu = kDefaultRingSpeed;
  /// Ignore distances and run without delays.
  bool zero_delay = false;
  double dt = 1e-4;
  double sigma = 1e-3;
  double t_end = 10.0;
  HistoryPolicy history = HistoryPolicy::ConstantInitial;
  DelayLookup delay_lookup = DelayLookup::Linear;
  /// Keep every n-th Euler step in trajectories (1 ms at the default dt).
  int record_every = 10;

  double omega() const;
  SimConfig sim_config(double epsilon_override = -1.0) const;
};

Network make_network(const NetworkSpec& spec);
DelayMatrix make_delays(const Network& net, const ExperimentParams& p);

/// Runs `count` independent jobs on at most `workers` threads. Job i must
/// only write state owned by index i; the call returns after all jobs finish.
void run_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

// ---------------------------------------------------------------- sweep

struct SweepCell {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double r_km = 0.0;
  double r_dkm = 0.0;
  double r_complex = 0.0;         ///< complex flow on W
  double r_complex_nodelay = 0.0; ///< complex flow on epsilon * A
  bool ok = false;
  std::string error;
};

/// Time-averaged order parameter for the four model variants, one cell per
/// (epsilon, seed) pair, all four started from random_ic(n, seed). Cells are
/// returned in grid order (epsilon-major) regardless of scheduling.
std::vector<SweepCell> run_sweep(const ExperimentParams& p, const std::vector<double>& epsilons,
                                 const std::vector<std::uint64_t>& seeds, int workers);

// ------------------------------------------------------------- simulate

struct SimulationResult {
  PhaseTrajectory trajectory;
  /// Filled for the complex model only.
  std::vector<ComplexState> states;
  /// Modal projections per recorded row when requested.
  std::vector<ModeContributions> modes;
};

SimulationResult run_simulation(const ExperimentParams& p, ModelTag model,
                                const Eigen::VectorXd& theta0, bool with_modes);

// -------------------------------------------------------------- predict

struct Prediction {
  DelayOperator op;
  Spectrum spectrum;
  Spectrum spectrum_nodelay;
  std::vector<int> leading;
  std::vector<int> leading_nodelay;
  /// Column j is the predicted phase pattern of leading[j].
  Eigen::MatrixXd patterns;
};

Prediction run_predict(const ExperimentParams& p, int m);

// ------------------------------------------------------------ direction

enum class IcMode { Random, Biased };

struct DirectionOptions {
  IcMode ic = IcMode::Random;
  double bias_amplitude = 0.8;
  int pos_mode = 3;
  int neg_mode = 99;
  /// Pattern that biased initial conditions are built around.
  int bias_mode = 3;
  double threshold = 0.9;
};

struct DirectionFailure {
  std::uint64_t seed = 0;
  std::string error;
};

struct DirectionResult {
  DirectionStats stats;
  std::vector<DirectionFailure> failures;
};

/// One delayed-model run per seed, classified on the final phases.
DirectionResult run_direction(const ExperimentParams& p, const std::vector<std::uint64_t>& seeds,
                              const DirectionOptions& opts, int workers);

}  // namespace delayop
