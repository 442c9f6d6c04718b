#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "guiltnet/ingest.hpp"

namespace guiltnet {

enum class Side : std::uint8_t { Device, App };

struct NodeRef {
  Side side = Side::Device;
  std::uint32_t index = 0;
  auto operator<=>(const NodeRef&) const = default;
};

/// Undirected device-app bipartite graph in CSR form, immutable after
/// construction. Devices and apps are indexed densely in lexicographic id
/// order. Both sides keep sorted adjacency, and every device-side slot knows
/// the matching app-side slot of the same edge (used for message passing).
///
/// A flat node index is also provided: devices occupy [0, device_count()),
/// apps follow at device_count() + app index.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  /// Builds from explicit id lists and index edges. Ids need not be sorted;
  /// they are reordered lexicographically and edges remapped. Duplicate
  /// edges are collapsed. Throws std::invalid_argument on duplicate ids or
  /// out-of-range indices.
  static BipartiteGraph from_indexed(std::vector<DeviceId> devices, std::vector<AppId> apps,
                                     std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  std::size_t device_count() const { return device_ids_.size(); }
  std::size_t app_count() const { return app_ids_.size(); }
  std::size_t node_count() const { return device_count() + app_count(); }
  std::size_t edge_count() const { return device_adj_.size(); }
  bool empty() const { return node_count() == 0; }

  const DeviceId& device_id(std::uint32_t i) const { return device_ids_.at(i); }
  const AppId& app_id(std::uint32_t i) const { return app_ids_.at(i); }
  const std::string& id(NodeRef n) const;
  std::span<const DeviceId> device_ids() const { return device_ids_; }
  std::span<const AppId> app_ids() const { return app_ids_; }

  std::optional<std::uint32_t> find_device(std::string_view id) const;
  std::optional<std::uint32_t> find_app(std::string_view id) const;

  // Sorted app indices adjacent to device i.
  std::span<const std::uint32_t> apps_of(std::uint32_t device) const;
  // Sorted device indices adjacent to app j.
  std::span<const std::uint32_t> devices_of(std::uint32_t app) const;

  /// Neighbors as NodeRefs. Throws std::out_of_range for an invalid ref.
  std::vector<NodeRef> neighbors(NodeRef n) const;
  std::size_t degree(NodeRef n) const;
  bool valid(NodeRef n) const;

  std::size_t flat(NodeRef n) const {
    return n.side == Side::Device ? n.index : device_count() + n.index;
  }
  NodeRef from_flat(std::size_t k) const {
    return k < device_count() ? NodeRef{Side::Device, static_cast<std::uint32_t>(k)}
                              : NodeRef{Side::App, static_cast<std::uint32_t>(k - device_count())};
  }

  // Raw CSR access for message passing. Slot s in [device_offsets()[i],
  // device_offsets()[i+1]) is edge (i, device_adj()[s]); its app-side slot is
  // device_to_app_slot()[s], and vice versa.
  std::span<const std::uint64_t> device_offsets() const { return device_off_; }
  std::span<const std::uint32_t> device_adj() const { return device_adj_; }
  std::span<const std::uint64_t> app_offsets() const { return app_off_; }
  std::span<const std::uint32_t> app_adj() const { return app_adj_; }
  std::span<const std::uint64_t> device_to_app_slot() const { return dev_to_app_slot_; }
  std::span<const std::uint64_t> app_to_device_slot() const { return app_to_dev_slot_; }

  /// Canonical edge list, sorted by (device_id, app_id).
  EdgeList edges() const;

 private:
  std::vector<DeviceId> device_ids_;
  std::vector<AppId> app_ids_;
  std::vector<std::uint64_t> device_off_{0};
  std::vector<std::uint32_t> device_adj_;
  std::vector<std::uint64_t> app_off_{0};
  std::vector<std::uint32_t> app_adj_;
  std::vector<std::uint64_t> dev_to_app_slot_;
  std::vector<std::uint64_t> app_to_dev_slot_;
};

/// Node sets are exactly the edge endpoints.
BipartiteGraph build_graph(const EdgeList& edges);

/// Drops every app used by more than n_p devices, along with its edges.
/// Devices are all kept, possibly isolated. Throws ConfigError if n_p == 0.
BipartiteGraph remove_popular_apps(const BipartiteGraph& g, std::uint32_t n_p);

}  // namespace guiltnet
