#include "delayop/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "delayop/errors.hpp"

namespace delayop {

Network build_ring(int n, int k) {
  if (n < 3) throw ParameterError("build_ring: n must be >= 3, got " + std::to_string(n));
  if (k < 1 || 2 * k >= n)
    throw ParameterError("build_ring: neighbor radius k must satisfy 1 <= k < n/2 (n=" +
                         std::to_string(n) + ", k=" + std::to_string(k) + ")");

  Network net;
  net.weights = Eigen::MatrixXd::Zero(n, n);
  net.distances = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int gap = std::abs(i - j);
      const int hops = std::min(gap, n - gap);
      net.distances(i, j) = hops;
      if (hops >= 1 && hops <= k) net.weights(i, j) = 1.0;
    }
  }
  net.is_circulant = true;
  return net;
}

DelayMatrix delays_from_distances(const Network& net, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw ParameterError("delays_from_distances: propagation speed must be positive and finite");
  DelayMatrix d;
  d.tau = net.distances / nu;
  d.tau.diagonal().setZero();
  return d;
}

DelayMatrix zero_delays(const Network& net) {
  return DelayMatrix{Eigen::MatrixXd::Zero(net.size(), net.size())};
}

Network synth_geometric(int n, double density, std::uint64_t seed, const GeometricOptions& opts) {
  if (n < 10) throw ParameterError("synth_geometric: n must be >= 10");
  if (!(density > 0.0 && density <= 1.0))
    throw ParameterError("synth_geometric: density must lie in (0, 1]");
  if (!(opts.sigma > 0.0)) throw ParameterError("synth_geometric: sigma must be positive");

  // Rejection sampling from the enclosing cube. Uses raw engine output
  // rather than std::uniform_real_distribution so the stream is identical
  // across standard library implementations.
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  Network net;
  net.positions.resize(n, 3);
  for (int i = 0; i < n;) {
    const Eigen::RowVector3d p(2.0 * unit() - 1.0, 2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
    if (p.squaredNorm() <= 1.0) net.positions.row(i++) = p;
  }

  net.distances = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> pair_dist;
  pair_dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = (net.positions.row(i) - net.positions.row(j)).norm();
      net.distances(i, j) = net.distances(j, i) = d;
      pair_dist.push_back(d);
    }
  }

  // Keep the shortest `density` fraction of pairs.
  const std::size_t keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(density * static_cast<double>(pair_dist.size()))), 1,
      pair_dist.size());
  std::vector<double> sorted = pair_dist;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                   sorted.end());
  const double cutoff = sorted[keep - 1];

  net.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = net.distances(i, j);
      if (d <= cutoff) net.weights(i, j) = net.weights(j, i) = std::exp(-d / opts.sigma);
    }
  }
  net.is_circulant = false;
  return net;
}

namespace {

// Strips a trailing `#` comment and splits on whitespace.
std::vector<std::string> tokenize(const std::string& line) {
  const auto hash = line.find('#');
  std::istringstream in(hash == std::string::npos ? line : line.substr(0, hash));
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line, const char* field) {
  std::istringstream in(tok);
  T value{};
  if (!(in >> value) || !in.eof())
    throw ParseError(std::string("cannot parse ") + field + " from '" + tok + "'", line);
  return value;
}

}  // namespace

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path.string() + "'", 0);

  constexpr double kSymmetryTol = 1e-9;
  Network net;
  Eigen::Index n = -1;
  std::vector<bool> have_pos;
  // Line where each pair was first defined, to reject duplicate pairs
  // that disagree.
  Eigen::MatrixXi defined_on;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto tok = tokenize(raw);
    if (tok.empty()) continue;

    if (n < 0) {
      if (tok[0] != "nodes" || tok.size() != 2)
        throw ParseError("expected header 'nodes <n>'", lineno);
      const auto count = parse_number<long long>(tok[1], lineno, "node count");
      if (count <= 0) throw ValidationError("node count must be positive", lineno);
      n = static_cast<Eigen::Index>(count);
      net.weights = Eigen::MatrixXd::Zero(n, n);
      net.distances = Eigen::MatrixXd::Zero(n, n);
      net.positions = Eigen::MatrixX3d::Zero(n, 3);
      have_pos.assign(static_cast<std::size_t>(n), false);
      defined_on = Eigen::MatrixXi::Zero(n, n);
      continue;
    }

    auto index = [&](const std::string& t) {
      const auto v = parse_number<long long>(t, lineno, "node index");
      if (v < 0 || v >= n)
        throw ValidationError("node index " + t + " out of range [0, " + std::to_string(n) + ")",
                              lineno);
      return static_cast<Eigen::Index>(v);
    };

    if (tok[0] == "pos") {
      if (tok.size() != 5) throw ParseError("expected 'pos <i> <x> <y> <z>'", lineno);
      const auto i = index(tok[1]);
      if (have_pos[static_cast<std::size_t>(i)])
        throw ValidationError("duplicate position for node " + tok[1], lineno);
      have_pos[static_cast<std::size_t>(i)] = true;
      for (int c = 0; c < 3; ++c)
        net.positions(i, c) = parse_number<double>(tok[static_cast<std::size_t>(2 + c)], lineno,
                                                   "coordinate");
    } else if (tok[0] == "edge") {
      if (tok.size() != 5) throw ParseError("expected 'edge <i> <j> <weight> <length>'", lineno);
      const auto i = index(tok[1]);
      const auto j = index(tok[2]);
      const auto w = parse_number<double>(tok[3], lineno, "weight");
      const auto len = parse_number<double>(tok[4], lineno, "length");
      if (i == j) throw ValidationError("self-loop on node " + tok[1], lineno);
      if (!std::isfinite(w) || w < 0.0) throw ValidationError("negative weight " + tok[3], lineno);
      if (!std::isfinite(len) || len < 0.0)
        throw ValidationError("negative length " + tok[4], lineno);
      if (w > 0.0 && len <= 0.0)
        throw ValidationError("connected pair must have positive length", lineno);
      if (defined_on(i, j) != 0) {
        if (std::abs(net.weights(i, j) - w) > kSymmetryTol ||
            std::abs(net.distances(i, j) - len) > kSymmetryTol)
          throw ValidationError("asymmetric entry for pair (" + tok[1] + ", " + tok[2] +
                                    "), first given on line " + std::to_string(defined_on(i, j)),
                                lineno);
        continue;
      }
      net.weights(i, j) = net.weights(j, i) = w;
      net.distances(i, j) = net.distances(j, i) = len;
      defined_on(i, j) = defined_on(j, i) = static_cast<int>(lineno);
    } else {
      throw ParseError("unknown record '" + tok[0] + "'", lineno);
    }
  }

  if (n < 0) throw ParseError("missing header 'nodes <n>'", lineno ? 1 : 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!have_pos[static_cast<std::size_t>(i)])
      throw ValidationError("no position given for node " + std::to_string(i), 0);

  net.is_circulant = n >= 3 && is_circulant_matrix(net.weights) &&
                     is_circulant_matrix(net.distances);
  return net;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write network file '" + path.string() + "'", 0);
  const Eigen::Index n = net.size();
  out << "nodes " << n << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool has = net.positions.rows() == n;
    out << "pos " << i << ' ' << (has ? net.positions(i, 0) : 0.0) << ' '
        << (has ? net.positions(i, 1) : 0.0) << ' ' << (has ? net.positions(i, 2) : 0.0) << '\n';
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (net.weights(i, j) > 0.0 || net.distances(i, j) > 0.0)
        out << "edge " << i << ' ' << j << ' ' << net.weights(i, j) << ' ' << net.distances(i, j)
            << '\n';
}

}  // namespace delayop
