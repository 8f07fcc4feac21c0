#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace delayop {

/// Undirected weighted network embedded in some metric space.
///
/// `weights` gates coupling (A_ij), `distances` sets conduction delays.
/// Both are symmetric with a zero diagonal. Node indices are 0-based.
struct Network {
  Eigen::MatrixXd weights;
  Eigen::MatrixXd distances;
  /// One row per node (x, y, z). Empty for networks without an embedding.
  Eigen::MatrixX3d positions;
  bool is_circulant = false;

  Eigen::Index size() const noexcept { return weights.rows(); }
};

/// Conduction delays in seconds, tau = distances / nu.
struct DelayMatrix {
  Eigen::MatrixXd tau;

  Eigen::Index size() const noexcept { return tau.rows(); }
  double max_delay() const noexcept { return tau.size() ? tau.maxCoeff() : 0.0; }
};

/// Ring of `n` nodes, each linked to its `k` nearest neighbors on both
/// sides. Distances are hop counts min(|i-j|, n-|i-j|). Requires n >= 3
/// and 1 <= k < n/2.
Network build_ring(int n, int k);

/// Divides every distance by `nu` (length units per second).
DelayMatrix delays_from_distances(const Network& net, double nu);

/// Zero-delay matrix of matching size.
DelayMatrix zero_delays(const Network& net);

/// Tuning knobs for the geometric stand-in network.
struct GeometricOptions {
  /// Length scale of the exponential weight decay exp(-d / sigma).
  double sigma = 0.3;
};

/// Random geometric network: `n` points uniform in the unit ball, weight
/// exp(-d/sigma) on the `density` fraction of pairs with the shortest
/// Euclidean distance (density = 1 keeps every pair). Bit-for-bit
/// reproducible for a fixed (n, density, seed).
Network synth_geometric(int n, double density, std::uint64_t seed,
                        const GeometricOptions& opts = {});

/// Reads the text network format:
///
///     nodes <n>
///     pos <i> <x> <y> <z>        (n lines, any order)
///     edge <i> <j> <weight> <length>
///
/// Indices are 0-based, each undirected pair appears once (a repeated pair
/// must agree with the first occurrence to 1e-9). `#` starts a comment.
/// Throws ParseError for I/O and syntax problems and ValidationError for
/// inconsistent content; both carry the 1-based offending line.
Network load_network(const std::filesystem::path& path);

/// Writes `net` in the format accepted by load_network.
void save_network(const Network& net, const std::filesystem::path& path);

/// True when every row of `m` is the cyclic right-shift of the row above.
template <typename Derived>
bool is_circulant_matrix(const Eigen::MatrixBase<Derived>& m, double tol = 0.0) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) return false;
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(m(i, j) - m(i - 1, (j + n - 1) % n)) > tol) return false;
  return true;
}

}  // namespace delayop
