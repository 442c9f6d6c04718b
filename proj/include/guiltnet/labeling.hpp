#pragma once

// Ground truth from offline scanner verdicts.
//
// Apps (or destination IPs) are labeled from the number of engines that flag
// them; devices are then labeled from the labels of the apps they use.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "guiltnet/graph.hpp"

namespace guiltnet {

struct VerdictRecord {
  std::string entity_id;
  std::uint32_t positives = 0;
  std::uint32_t total_engines = 1;
};

enum class AppLabel { Bad, Suspicious, Good, NoInfo };

std::string_view to_string(AppLabel label);

struct LabelingConfig {
  std::uint32_t vt = 5;
  std::uint32_t n_p = 1000;
  std::uint32_t n_ab = 2;
  EntityMode mode = EntityMode::AppString;

  void validate() const;
};

struct GroundTruth {
  std::set<DeviceId> bad_devices;
  std::set<DeviceId> good_devices;
  std::map<AppId, AppLabel> app_labels;

  bool is_bad(const DeviceId& d) const { return bad_devices.count(d) != 0; }
  bool is_good(const DeviceId& d) const { return good_devices.count(d) != 0; }
};

/// Source of verdicts. The bundled implementation is a static snapshot;
/// a live lookup client would implement the same interface.
class VerdictProvider {
 public:
  virtual ~VerdictProvider() = default;
  virtual std::optional<VerdictRecord> lookup(std::string_view entity_id) const = 0;
};

class StaticVerdicts : public VerdictProvider {
 public:
  StaticVerdicts() = default;
  explicit StaticVerdicts(std::vector<VerdictRecord> records);

  /// CSV with header: entity_id,positives,total_engines
  static StaticVerdicts load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<VerdictRecord> lookup(std::string_view entity_id) const override;
  std::size_t size() const { return records_.size(); }
  const std::map<std::string, VerdictRecord, std::less<>>& records() const { return records_; }

 private:
  std::map<std::string, VerdictRecord, std::less<>> records_;
};

// positives >= vt -> Bad; 1..vt-1 -> Suspicious; 0 -> Good; absent -> NoInfo.
AppLabel label_app(const std::optional<VerdictRecord>& v, const LabelingConfig& cfg);

// Destination-IP rule: >= 2 engines -> Bad; exactly 1 -> Suspicious.
AppLabel label_ip(const std::optional<VerdictRecord>& v);

/// Labels every app node of g with the rule for cfg.mode.
std::map<AppId, AppLabel> label_apps(const BipartiteGraph& g, const VerdictProvider& verdicts,
                                     const LabelingConfig& cfg);

/// Devices with >= n_ab Bad neighbors are bad; devices with no Bad and no
/// Suspicious neighbor are good. Isolated devices count as good. g should
/// already be popularity-filtered.
GroundTruth label_devices(const BipartiteGraph& g, const std::map<AppId, AppLabel>& app_labels,
                          const LabelingConfig& cfg);

/// Filter by popularity, label apps, label devices.
GroundTruth build_ground_truth(const BipartiteGraph& raw, const VerdictProvider& verdicts,
                               const LabelingConfig& cfg, BipartiteGraph* filtered_out = nullptr);

/// Throws std::logic_error if D_B and D_G intersect or a device is missing from g.
void check_ground_truth(const GroundTruth& gt, const BipartiteGraph& g);

// CSV device_id,label with label in {bad,good}.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);
GroundTruth read_ground_truth(const std::filesystem::path& path);
// CSV app_id,label
void write_app_labels(const std::filesystem::path& path, const std::map<AppId, AppLabel>& labels);

}  // namespace guiltnet
