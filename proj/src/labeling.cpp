#include "guiltnet/labeling.hpp"

#include <stdexcept>

#include "guiltnet/util.hpp"

namespace guiltnet {

std::string_view to_string(AppLabel label) {
  switch (label) {
    case AppLabel::Bad: return "bad";
    case AppLabel::Suspicious: return "suspicious";
    case AppLabel::Good: return "good";
    case AppLabel::NoInfo: return "no-info";
  }
  return "?";
}

void LabelingConfig::validate() const {
  if (vt < 1) throw ConfigError("vt must be >= 1");
  if (n_p < 1) throw ConfigError("np must be >= 1");
  if (n_ab < 1) throw ConfigError("nab must be >= 1");
}

StaticVerdicts::StaticVerdicts(std::vector<VerdictRecord> records) {
  for (auto& r : records) {
    if (r.total_engines == 0 || r.positives > r.total_engines)
      throw ConfigError("verdict for '" + r.entity_id + "' violates 0 <= positives <= total");
    std::string key = r.entity_id;
    records_[key] = std::move(r);
  }
}

StaticVerdicts StaticVerdicts::load(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::vector<VerdictRecord> recs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 3) throw ParseError("expected entity_id,positives,total_engines", i + 1);
    if (trim(cols[0]) == "entity_id") continue;
    VerdictRecord r;
    r.entity_id = std::string(trim(cols[0]));
    try {
      auto pos = parse_int(cols[1]);
      auto total = parse_int(cols[2]);
      if (pos < 0 || total < 1 || pos > total)
        throw ParseError("verdict counts out of range", i + 1);
      r.positives = static_cast<std::uint32_t>(pos);
      r.total_engines = static_cast<std::uint32_t>(total);
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), i + 1);
    }
    recs.push_back(std::move(r));
  }
  return StaticVerdicts(std::move(recs));
}

void StaticVerdicts::save(const std::filesystem::path& path) const {
  std::string buf = "entity_id,positives,total_engines\n";
  for (const auto& [id, r] : records_)
    buf += id + "," + std::to_string(r.positives) + "," + std::to_string(r.total_engines) + "\n";
  write_file(path, buf);
}

std::optional<VerdictRecord> StaticVerdicts::lookup(std::string_view entity_id) const {
  auto it = records_.find(entity_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

AppLabel label_app(const std::optional<VerdictRecord>& v, const LabelingConfig& cfg) {
  if (!v) return AppLabel::NoInfo;
  if (v->positives >= cfg.vt) return AppLabel::Bad;
  if (v->positives >= 1) return AppLabel::Suspicious;
  return AppLabel::Good;
}

AppLabel label_ip(const std::optional<VerdictRecord>& v) {
  if (!v) return AppLabel::NoInfo;
  if (v->positives >= 2) return AppLabel::Bad;
  if (v->positives == 1) return AppLabel::Suspicious;
  return AppLabel::Good;
}

std::map<AppId, AppLabel> label_apps(const BipartiteGraph& g, const VerdictProvider& verdicts,
                                     const LabelingConfig& cfg) {
  std::map<AppId, AppLabel> out;
  for (const auto& id : g.app_ids()) {
    auto v = verdicts.lookup(id);
    out.emplace_hint(out.end(), id,
                     cfg.mode == EntityMode::AppString ? label_app(v, cfg) : label_ip(v));
  }
  return out;
}

GroundTruth label_devices(const BipartiteGraph& g, const std::map<AppId, AppLabel>& app_labels,
                          const LabelingConfig& cfg) {
  GroundTruth gt;
  gt.app_labels = app_labels;
  std::vector<AppLabel> by_index(g.app_count(), AppLabel::NoInfo);
  for (std::uint32_t a = 0; a < g.app_count(); ++a) {
    auto it = app_labels.find(g.app_id(a));
    if (it != app_labels.end()) by_index[a] = it->second;
  }
  for (std::uint32_t d = 0; d < g.device_count(); ++d) {
    std::uint32_t bad = 0, suspicious = 0;
    for (auto a : g.apps_of(d)) {
      if (by_index[a] == AppLabel::Bad) ++bad;
      if (by_index[a] == AppLabel::Suspicious) ++suspicious;
    }
    if (bad >= cfg.n_ab)
      gt.bad_devices.insert(gt.bad_devices.end(), g.device_id(d));
    else if (bad == 0 && suspicious == 0)
      gt.good_devices.insert(gt.good_devices.end(), g.device_id(d));
  }
  check_ground_truth(gt, g);
  return gt;
}

GroundTruth build_ground_truth(const BipartiteGraph& raw, const VerdictProvider& verdicts,
                               const LabelingConfig& cfg, BipartiteGraph* filtered_out) {
  cfg.validate();
  BipartiteGraph g = remove_popular_apps(raw, cfg.n_p);
  auto labels = label_apps(g, verdicts, cfg);
  GroundTruth gt = label_devices(g, labels, cfg);
  if (filtered_out) *filtered_out = std::move(g);
  return gt;
}

void check_ground_truth(const GroundTruth& gt, const BipartiteGraph& g) {
  for (const auto& d : gt.bad_devices) {
    if (gt.good_devices.count(d)) throw std::logic_error("device '" + d + "' is both bad and good");
    if (!g.find_device(d)) throw std::logic_error("labeled device '" + d + "' not in graph");
  }
  for (const auto& d : gt.good_devices)
    if (!g.find_device(d)) throw std::logic_error("labeled device '" + d + "' not in graph");
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  // Merge the two sorted sets so the file is sorted by device id.
  std::map<std::string, std::string_view> rows;
  for (const auto& d : gt.bad_devices) rows[d] = "bad";
  for (const auto& d : gt.good_devices) rows[d] = "good";
  std::string buf = "device_id,label\n";
  for (const auto& [d, l] : rows) {
    buf += d;
    buf += ',';
    buf += l;
    buf += '\n';
  }
  write_file(path, buf);
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  GroundTruth gt;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 2) throw ParseError("expected device_id,label", i + 1);
    auto label = trim(cols[1]);
    std::string id(trim(cols[0]));
    if (id == "device_id") continue;
    if (label == "bad")
      gt.bad_devices.insert(id);
    else if (label == "good")
      gt.good_devices.insert(id);
    else
      throw ParseError("label must be bad or good", i + 1);
  }
  for (const auto& d : gt.bad_devices)
    if (gt.good_devices.count(d)) throw ParseError("device '" + d + "' labeled both bad and good");
  return gt;
}

void write_app_labels(const std::filesystem::path& path, const std::map<AppId, AppLabel>& labels) {
  std::string buf = "app_id,label\n";
  for (const auto& [a, l] : labels) {
    buf += a;
    buf += ',';
    buf += to_string(l);
    buf += '\n';
  }
  write_file(path, buf);
}

}  // namespace guiltnet
