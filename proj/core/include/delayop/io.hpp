#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

#include "delayop/analysis.hpp"
#include "delayop/dynamics.hpp"
#include "delayop/spectral.hpp"

namespace delayop::io {

// All writers emit comma-separated text with a header row. Floating-point
// values use 17 significant digits so a re-read reproduces them exactly.

/// `mode_index,re_lambda,im_lambda`, mode_index 1-based.
void write_spectrum(std::ostream& out, const Spectrum& spec);

/// One row per node, columns `re_1,im_1,re_2,im_2,...` per mode.
void write_eigenvectors(std::ostream& out, const Spectrum& spec);

/// `t,theta_0,...,theta_{N-1}`, keeping every `stride`-th row.
void write_trajectory(std::ostream& out, const PhaseTrajectory& traj, int stride = 1);

/// `t,R` for every trajectory row.
void write_order_parameter(std::ostream& out, const PhaseTrajectory& traj, int stride = 1);

/// `t,re_0,im_0,...` for a sequence of complex states.
void write_complex_states(std::ostream& out, const std::vector<double>& times,
                          const std::vector<ComplexState>& states);

/// `t,log_abs_mu_1,...,log_abs_mu_N`.
void write_mode_contributions(std::ostream& out, const std::vector<double>& times,
                              const std::vector<ModeContributions>& rows);

/// `seed,rho_pos,rho_neg,label`.
void write_direction_records(std::ostream& out, const DirectionStats& stats);

/// Opens `path` for writing or throws delayop::Error.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace delayop::io
