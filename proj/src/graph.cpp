#include "guiltnet/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "guiltnet/util.hpp"

namespace guiltnet {

namespace {

// Sorts ids and returns old-index -> new-index.
std::vector<std::uint32_t> sort_ids(std::vector<std::string>& ids, const char* what) {
  std::vector<std::uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&ids](std::uint32_t a, std::uint32_t b) { return ids[a] < ids[b]; });
  std::vector<std::uint32_t> remap(ids.size());
  std::vector<std::string> sorted(ids.size());
  for (std::uint32_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = k;
    sorted[k] = std::move(ids[order[k]]);
    if (k > 0 && sorted[k] == sorted[k - 1])
      throw std::invalid_argument(std::string("duplicate ") + what + " id '" + sorted[k] + "'");
  }
  ids = std::move(sorted);
  return remap;
}

std::optional<std::uint32_t> find_sorted(std::span<const std::string> ids, std::string_view id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == ids.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - ids.begin());
}

}  // namespace

BipartiteGraph BipartiteGraph::from_indexed(
    std::vector<DeviceId> devices, std::vector<AppId> apps,
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  BipartiteGraph g;
  auto dev_remap = sort_ids(devices, "device");
  auto app_remap = sort_ids(apps, "app");
  for (auto& [d, a] : edges) {
    if (d >= devices.size() || a >= apps.size())
      throw std::invalid_argument("edge endpoint out of range");
    d = dev_remap[d];
    a = app_remap[a];
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  g.device_ids_ = std::move(devices);
  g.app_ids_ = std::move(apps);
  const std::size_t nd = g.device_ids_.size(), na = g.app_ids_.size(), ne = edges.size();

  g.device_off_.assign(nd + 1, 0);
  g.app_off_.assign(na + 1, 0);
  g.device_adj_.resize(ne);
  g.app_adj_.resize(ne);
  for (const auto& [d, a] : edges) {
    ++g.device_off_[d + 1];
    ++g.app_off_[a + 1];
  }
  std::partial_sum(g.device_off_.begin(), g.device_off_.end(), g.device_off_.begin());
  std::partial_sum(g.app_off_.begin(), g.app_off_.end(), g.app_off_.begin());

  g.dev_to_app_slot_.resize(ne);
  g.app_to_dev_slot_.resize(ne);
  std::vector<std::uint64_t> cursor(g.app_off_.begin(), g.app_off_.end() - 1);
  // Edges are sorted by (device, app): device slots fill in order, and each
  // app's device list receives ascending device indices.
  for (std::size_t s = 0; s < ne; ++s) {
    auto [d, a] = edges[s];
    g.device_adj_[s] = a;
    std::uint64_t t = cursor[a]++;
    g.app_adj_[t] = d;
    g.dev_to_app_slot_[s] = t;
    g.app_to_dev_slot_[t] = s;
  }
  return g;
}

const std::string& BipartiteGraph::id(NodeRef n) const {
  return n.side == Side::Device ? device_id(n.index) : app_id(n.index);
}

std::optional<std::uint32_t> BipartiteGraph::find_device(std::string_view id) const {
  return find_sorted(device_ids_, id);
}

std::optional<std::uint32_t> BipartiteGraph::find_app(std::string_view id) const {
  return find_sorted(app_ids_, id);
}

std::span<const std::uint32_t> BipartiteGraph::apps_of(std::uint32_t device) const {
  return std::span<const std::uint32_t>(device_adj_).subspan(
      device_off_[device], device_off_[device + 1] - device_off_[device]);
}

std::span<const std::uint32_t> BipartiteGraph::devices_of(std::uint32_t app) const {
  return std::span<const std::uint32_t>(app_adj_).subspan(app_off_[app],
                                                          app_off_[app + 1] - app_off_[app]);
}

bool BipartiteGraph::valid(NodeRef n) const {
  return n.side == Side::Device ? n.index < device_count() : n.index < app_count();
}

std::vector<NodeRef> BipartiteGraph::neighbors(NodeRef n) const {
  if (!valid(n)) throw std::out_of_range("node reference out of range");
  std::vector<NodeRef> out;
  if (n.side == Side::Device) {
    for (auto a : apps_of(n.index)) out.push_back({Side::App, a});
  } else {
    for (auto d : devices_of(n.index)) out.push_back({Side::Device, d});
  }
  return out;
}

std::size_t BipartiteGraph::degree(NodeRef n) const {
  if (!valid(n)) throw std::out_of_range("node reference out of range");
  return n.side == Side::Device ? apps_of(n.index).size() : devices_of(n.index).size();
}

EdgeList BipartiteGraph::edges() const {
  EdgeList out;
  out.reserve(edge_count());
  for (std::uint32_t d = 0; d < device_count(); ++d)
    for (auto a : apps_of(d)) out.push_back({device_ids_[d], app_ids_[a]});
  return out;
}

BipartiteGraph build_graph(const EdgeList& edges) {
  std::vector<DeviceId> devices;
  std::vector<AppId> apps;
  for (const auto& e : edges) {
    devices.push_back(e.device);
    apps.push_back(e.app);
  }
  std::sort(devices.begin(), devices.end());
  devices.erase(std::unique(devices.begin(), devices.end()), devices.end());
  std::sort(apps.begin(), apps.end());
  apps.erase(std::unique(apps.begin(), apps.end()), apps.end());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> idx;
  idx.reserve(edges.size());
  for (const auto& e : edges)
    idx.emplace_back(*find_sorted(devices, e.device), *find_sorted(apps, e.app));
  return BipartiteGraph::from_indexed(std::move(devices), std::move(apps), std::move(idx));
}

BipartiteGraph remove_popular_apps(const BipartiteGraph& g, std::uint32_t n_p) {
  if (n_p == 0) throw ConfigError("popularity threshold n_p must be >= 1");
  std::vector<std::uint32_t> keep_index(g.app_count(), UINT32_MAX);
  std::vector<AppId> apps;
  for (std::uint32_t a = 0; a < g.app_count(); ++a) {
    if (g.devices_of(a).size() > n_p) continue;
    keep_index[a] = static_cast<std::uint32_t>(apps.size());
    apps.push_back(g.app_id(a));
  }
  std::vector<DeviceId> devices(g.device_ids().begin(), g.device_ids().end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> idx;
  idx.reserve(g.edge_count());
  for (std::uint32_t d = 0; d < g.device_count(); ++d)
    for (auto a : g.apps_of(d))
      if (keep_index[a] != UINT32_MAX) idx.emplace_back(d, keep_index[a]);
  return BipartiteGraph::from_indexed(std::move(devices), std::move(apps), std::move(idx));
}

}  // namespace guiltnet
