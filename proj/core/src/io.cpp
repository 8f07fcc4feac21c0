#include "delayop/io.hpp"

#include <fstream>
#include <iomanip>

#include "delayop/errors.hpp"

namespace delayop::io {

namespace {

struct PrecisionGuard {
  explicit PrecisionGuard(std::ostream& out) : out_(out), saved_(out.precision(17)) {}
  ~PrecisionGuard() { out_.precision(saved_); }
  std::ostream& out_;
  std::streamsize saved_;
};

void check_stride(int stride) {
  if (stride < 1) throw ParameterError("output stride must be >= 1");
}

}  // namespace

void write_spectrum(std::ostream& out, const Spectrum& spec) {
  PrecisionGuard guard(out);
  out << "mode_index,re_lambda,im_lambda\n";
  for (Eigen::Index k = 0; k < spec.size(); ++k)
    out << k + 1 << ',' << spec.eigenvalues(k).real() << ',' << spec.eigenvalues(k).imag() << '\n';
}

void write_eigenvectors(std::ostream& out, const Spectrum& spec) {
  PrecisionGuard guard(out);
  const Eigen::Index n = spec.eigenvectors.rows();
  for (Eigen::Index k = 0; k < spec.size(); ++k)
    out << (k ? "," : "") << "re_" << k + 1 << ",im_" << k + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < spec.size(); ++k)
      out << (k ? "," : "") << spec.eigenvectors(i, k).real() << ','
          << spec.eigenvectors(i, k).imag();
    out << '\n';
  }
}

void write_trajectory(std::ostream& out, const PhaseTrajectory& traj, int stride) {
  check_stride(stride);
  PrecisionGuard guard(out);
  out << 't';
  for (Eigen::Index i = 0; i < traj.nodes(); ++i) out << ",theta_" << i;
  out << '\n';
  for (Eigen::Index r = 0; r < traj.steps(); r += stride) {
    out << traj.times[static_cast<std::size_t>(r)];
    for (Eigen::Index i = 0; i < traj.nodes(); ++i) out << ',' << traj.phases(r, i);
    out << '\n';
  }
}

void write_order_parameter(std::ostream& out, const PhaseTrajectory& traj, int stride) {
  check_stride(stride);
  PrecisionGuard guard(out);
  out << "t,R\n";
  for (Eigen::Index r = 0; r < traj.steps(); r += stride)
    out << traj.times[static_cast<std::size_t>(r)] << ',' << order_parameter(traj.at(r)) << '\n';
}

void write_complex_states(std::ostream& out, const std::vector<double>& times,
                          const std::vector<ComplexState>& states) {
  if (times.size() != states.size()) throw StructuralError("times and states differ in length");
  PrecisionGuard guard(out);
  out << 't';
  const Eigen::Index n = states.empty() ? 0 : states.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",re_" << i << ",im_" << i;
  out << '\n';
  for (std::size_t r = 0; r < states.size(); ++r) {
    out << times[r];
    for (Eigen::Index i = 0; i < n; ++i)
      out << ',' << states[r].x(i).real() << ',' << states[r].x(i).imag();
    out << '\n';
  }
}

void write_mode_contributions(std::ostream& out, const std::vector<double>& times,
                              const std::vector<ModeContributions>& rows) {
  if (times.size() != rows.size()) throw StructuralError("times and rows differ in length");
  PrecisionGuard guard(out);
  out << 't';
  const Eigen::Index n = rows.empty() ? 0 : rows.front().log_abs.size();
  for (Eigen::Index k = 0; k < n; ++k) out << ",log_abs_mu_" << k + 1;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << times[r];
    for (Eigen::Index k = 0; k < n; ++k) out << ',' << rows[r].log_abs(k);
    out << '\n';
  }
}

void write_direction_records(std::ostream& out, const DirectionStats& stats) {
  PrecisionGuard guard(out);
  out << "seed,rho_pos,rho_neg,label\n";
  for (const auto& r : stats.records)
    out << r.seed << ',' << r.rho_pos << ',' << r.rho_neg << ',' << r.label << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace delayop::io
