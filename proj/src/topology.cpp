#include "guiltnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "guiltnet/util.hpp"

namespace guiltnet {

namespace {

// Neighbors of flat node k, also flat.
template <typename Fn>
void for_each_neighbor(const BipartiteGraph& g, std::size_t k, Fn&& fn) {
  const std::size_t nd = g.device_count();
  if (k < nd) {
    for (auto a : g.apps_of(static_cast<std::uint32_t>(k))) fn(nd + a);
  } else {
    for (auto d : g.devices_of(static_cast<std::uint32_t>(k - nd))) fn(static_cast<std::size_t>(d));
  }
}

void bfs_into(const BipartiteGraph& g, std::size_t source, std::vector<std::int32_t>& dist,
              std::vector<std::size_t>& queue) {
  std::fill(dist.begin(), dist.end(), kUnreachable);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t u = queue[head];
    std::int32_t du = dist[u];
    for_each_neighbor(g, u, [&](std::size_t v) {
      if (dist[v] == kUnreachable) {
        dist[v] = du + 1;
        queue.push_back(v);
      }
    });
  }
}

PairClassStats summarize(std::vector<std::int32_t>& lengths, std::size_t unreachable) {
  PairClassStats s;
  s.pairs = lengths.size();
  s.unreachable = unreachable;
  if (lengths.empty()) return s;
  std::sort(lengths.begin(), lengths.end());
  double total = 0.0;
  for (auto l : lengths) total += l;
  s.mean = total / static_cast<double>(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i + 1 < lengths.size() && lengths[i + 1] == lengths[i]) continue;
    s.cdf.push_back({lengths[i], static_cast<double>(i + 1) / static_cast<double>(lengths.size())});
  }
  return s;
}

}  // namespace

std::vector<std::int32_t> bfs_distances(const BipartiteGraph& g, NodeRef source) {
  if (!g.valid(source)) throw std::out_of_range("node reference out of range");
  std::vector<std::int32_t> dist(g.node_count());
  std::vector<std::size_t> queue;
  bfs_into(g, g.flat(source), dist, queue);
  return dist;
}

std::size_t DistanceMatrix::position(NodeRef n) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
  if (it == nodes_.end() || *it != n) return npos;
  return static_cast<std::size_t>(it - nodes_.begin());
}

DistanceMatrix shortest_paths(const BipartiteGraph& g, std::span<const NodeRef> sources,
                              unsigned threads) {
  std::vector<NodeRef> nodes(sources.begin(), sources.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (const auto& n : nodes)
    if (!g.valid(n)) throw std::out_of_range("node reference out of range");

  const std::size_t m = nodes.size();
  std::vector<std::int32_t> dist(m * m, kUnreachable);
  parallel_for(m, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> row(g.node_count());
    std::vector<std::size_t> queue;
    for (std::size_t i = begin; i < end; ++i) {
      bfs_into(g, g.flat(nodes[i]), row, queue);
      for (std::size_t j = 0; j < m; ++j) dist[i * m + j] = row[g.flat(nodes[j])];
    }
  });
  return DistanceMatrix(std::move(nodes), std::move(dist));
}

std::string_view to_string(PairClass c) {
  switch (c) {
    case PairClass::GoodGood: return "GG";
    case PairClass::BadBad: return "BB";
    case PairClass::BadGood: return "BG";
  }
  return "?";
}

const PairClassStats& ClusterDistanceStats::get(PairClass c) const {
  switch (c) {
    case PairClass::GoodGood: return good_good;
    case PairClass::BadBad: return bad_bad;
    case PairClass::BadGood: return bad_good;
  }
  return bad_good;
}

ClusterDistanceStats cluster_distance_stats(const DistanceMatrix& dm, std::span<const NodeRef> cb,
                                            std::span<const NodeRef> cg) {
  if (cb.empty() || cg.empty()) throw std::invalid_argument("cluster sets must be non-empty");
  auto positions = [&dm](std::span<const NodeRef> set) {
    std::vector<std::size_t> pos;
    for (const auto& n : set) {
      auto p = dm.position(n);
      if (p == DistanceMatrix::npos)
        throw std::invalid_argument("cluster node missing from distance matrix");
      pos.push_back(p);
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    return pos;
  };
  auto pb = positions(cb), pg = positions(cg);
  for (auto p : pb)
    if (std::binary_search(pg.begin(), pg.end(), p))
      throw std::invalid_argument("bad and good clusters overlap");

  auto within = [&dm](const std::vector<std::size_t>& pos) {
    std::vector<std::int32_t> lengths;
    std::size_t unreachable = 0;
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = i + 1; j < pos.size(); ++j) {
        auto l = dm.at(pos[i], pos[j]);
        if (l == kUnreachable)
          ++unreachable;
        else
          lengths.push_back(l);
      }
    return summarize(lengths, unreachable);
  };

  ClusterDistanceStats out;
  out.bad_bad = within(pb);
  out.good_good = within(pg);
  std::vector<std::int32_t> cross;
  std::size_t unreachable = 0;
  for (auto i : pb)
    for (auto j : pg) {
      auto l = dm.at(i, j);
      if (l == kUnreachable)
        ++unreachable;
      else
        cross.push_back(l);
    }
  out.bad_good = summarize(cross, unreachable);
  return out;
}

std::map<NodeRef, double> closeness_centrality(const BipartiteGraph& g,
                                               std::span<const NodeRef> nodes, unsigned threads) {
  std::vector<NodeRef> list(nodes.begin(), nodes.end());
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
  for (const auto& n : list)
    if (!g.valid(n)) throw std::out_of_range("node reference out of range");

  std::vector<double> cc(list.size(), 0.0);
  parallel_for(list.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> dist(g.node_count());
    std::vector<std::size_t> queue;
    for (std::size_t i = begin; i < end; ++i) {
      bfs_into(g, g.flat(list[i]), dist, queue);
      // queue holds exactly the component of the source.
      double total = 0.0;
      for (auto v : queue) total += dist[v];
      cc[i] = queue.size() > 1 ? static_cast<double>(queue.size() - 1) / total : 0.0;
    }
  });
  std::map<NodeRef, double> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.emplace_hint(out.end(), list[i], cc[i]);
  return out;
}

EigenvectorCentrality eigenvector_centrality(const BipartiteGraph& g, double tol,
                                             std::uint32_t max_iter, unsigned threads) {
  const std::size_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("eigenvector centrality of an empty graph");

  EigenvectorCentrality out;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(n);

  auto multiply = [&](const std::vector<double>& in, std::vector<double>& res) {
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        double s = 0.0;
        for_each_neighbor(g, k, [&](std::size_t v) { s += in[v]; });
        res[k] = s;
      }
    });
  };

  for (std::uint32_t it = 1; it <= max_iter; ++it) {
    multiply(x, ax);
    double kappa = 0.0;
    for (std::size_t k = 0; k < n; ++k) kappa += x[k] * ax[k];
    double residual = 0.0;
    for (std::size_t k = 0; k < n; ++k) residual = std::max(residual, std::fabs(ax[k] - kappa * x[k]));
    out.kappa = kappa;
    out.residual = residual;
    out.iterations = it;
    if (residual < tol) {
      out.converged = true;
      break;
    }
    // Shifted step: x <- (A + I) x / ||(A + I) x||.
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      ax[k] += x[k];
      norm += ax[k] * ax[k];
    }
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < n; ++k) x[k] = ax[k] / norm;
  }
  for (auto& v : x) v = std::max(v, 0.0);
  out.scores = std::move(x);
  return out;
}

void write_centrality(const std::filesystem::path& path, const BipartiteGraph& g,
                      std::span<const NodeRef> nodes, const CentralityReport& report) {
  std::string buf = "node_id,cc,ec\n";
  for (const auto& n : nodes) {
    auto it = report.closeness.find(n);
    buf += g.id(n) + "," + (it == report.closeness.end() ? std::string() : format_double(it->second)) +
           "," + format_double(report.eigenvector.at(g, n)) + "\n";
  }
  write_file(path, buf);
}

void write_cdfs(const std::filesystem::path& path, const ClusterDistanceStats& stats) {
  std::string buf = "pair_class,length,cum_fraction\n";
  for (auto c : {PairClass::GoodGood, PairClass::BadBad, PairClass::BadGood})
    for (const auto& p : stats.get(c).cdf)
      buf += std::string(to_string(c)) + "," + std::to_string(p.length) + "," +
             format_double(p.cum_fraction) + "\n";
  write_file(path, buf);
}

void write_heatmap(const std::filesystem::path& path, const BipartiteGraph& g,
                   const DistanceMatrix& dm) {
  std::string buf = "src,dst,length\n";
  auto nodes = dm.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      auto l = dm.at(i, j);
      buf += g.id(nodes[i]) + "," + g.id(nodes[j]) + "," +
             (l == kUnreachable ? std::string() : std::to_string(l)) + "\n";
    }
  write_file(path, buf);
}

}  // namespace guiltnet
