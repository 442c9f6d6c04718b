#pragma once

// Structural diagnostics: hop distances within and between the labeled
// clusters, closeness centrality and eigenvector centrality.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "guiltnet/graph.hpp"

namespace guiltnet {

inline constexpr std::int32_t kUnreachable = -1;

/// BFS hop counts from every node of g to all nodes (flat indexing).
std::vector<std::int32_t> bfs_distances(const BipartiteGraph& g, NodeRef source);

/// Pairwise hop distances among a subset of nodes.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<NodeRef> nodes, std::vector<std::int32_t> dist)
      : nodes_(std::move(nodes)), dist_(std::move(dist)) {}

  std::span<const NodeRef> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  // Distance between nodes()[i] and nodes()[j]; kUnreachable when disconnected.
  std::int32_t at(std::size_t i, std::size_t j) const { return dist_[i * nodes_.size() + j]; }
  // Position of n in nodes(), or npos.
  std::size_t position(NodeRef n) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<NodeRef> nodes_;
  std::vector<std::int32_t> dist_;
};

/// One BFS per source, parallel over sources. The matrix is restricted to
/// the (deduplicated, sorted) source set.
DistanceMatrix shortest_paths(const BipartiteGraph& g, std::span<const NodeRef> sources,
                              unsigned threads = 1);

enum class PairClass { GoodGood, BadBad, BadGood };
std::string_view to_string(PairClass c);

struct CdfPoint {
  std::int32_t length;
  double cum_fraction;
};

struct PairClassStats {
  double mean = 0.0;
  std::size_t pairs = 0;        // reachable pairs
  std::size_t unreachable = 0;  // excluded from mean and CDF
  std::vector<CdfPoint> cdf;    // sorted by length
};

struct ClusterDistanceStats {
  PairClassStats good_good;
  PairClassStats bad_bad;
  PairClassStats bad_good;

  const PairClassStats& get(PairClass c) const;
};

/// Distinct unordered pairs within cb, within cg, and across. Throws
/// std::invalid_argument if either set is empty, they overlap, or a member is
/// not in dm.
ClusterDistanceStats cluster_distance_stats(const DistanceMatrix& dm, std::span<const NodeRef> cb,
                                            std::span<const NodeRef> cg);

/// CC_u = (N - 1) / sum_v l(v, u) over u's connected component of size N.
/// A node alone in its component scores 0.
std::map<NodeRef, double> closeness_centrality(const BipartiteGraph& g,
                                               std::span<const NodeRef> nodes,
                                               unsigned threads = 1);

struct EigenvectorCentrality {
  std::vector<double> scores;  // flat node index, unit L2 norm, non-negative
  double kappa = 0.0;          // dominant adjacency eigenvalue
  std::uint32_t iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max_u |(A x)_u - kappa x_u|

  double at(const BipartiteGraph& g, NodeRef n) const { return scores.at(g.flat(n)); }
};

/// Power iteration from a uniform start. A bipartite adjacency has spectrum
/// symmetric about zero, so plain iteration on A oscillates between +kappa and
/// -kappa; iterating on A + I keeps the eigenvectors and makes the top one
/// strictly dominant. Throws std::invalid_argument on an empty graph.
EigenvectorCentrality eigenvector_centrality(const BipartiteGraph& g, double tol = 1e-10,
                                             std::uint32_t max_iter = 100000,
                                             unsigned threads = 1);

struct CentralityReport {
  std::map<NodeRef, double> closeness;
  EigenvectorCentrality eigenvector;
};

// CSV node_id,cc,ec for the given nodes.
void write_centrality(const std::filesystem::path& path, const BipartiteGraph& g,
                      std::span<const NodeRef> nodes, const CentralityReport& report);
// CSV pair_class,length,cum_fraction
void write_cdfs(const std::filesystem::path& path, const ClusterDistanceStats& stats);
// CSV src,dst,length (unreachable pairs written with an empty length)
void write_heatmap(const std::filesystem::path& path, const BipartiteGraph& g,
                   const DistanceMatrix& dm);

}  // namespace guiltnet
