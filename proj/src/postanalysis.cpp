#include "guiltnet/postanalysis.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "guiltnet/util.hpp"

namespace guiltnet {

LeakCatalog::LeakCatalog(std::vector<LeakCategory> categories)
    : categories_(std::move(categories)) {
  for (const auto& c : categories_)
    for (const auto& k : c.keywords) {
      if (k.empty() || to_lower(k) != k)
        throw ConfigError("catalog keyword '" + k + "' must be non-empty lowercase");
      auto [it, inserted] = by_keyword_.emplace(k, c.type);
      if (!inserted && it->second != c.type)
        throw ConfigError("catalog keyword '" + k + "' listed under both " + it->second + " and " +
                          c.type);
    }
}

LeakCatalog LeakCatalog::load(const std::filesystem::path& path) {
  std::vector<LeakCategory> cats;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 3) throw ParseError("expected category,type,keyword", i + 1);
    if (trim(cols[0]) == "category" && trim(cols[2]) == "keyword") continue;
    std::string cat(trim(cols[0])), type(trim(cols[1])), kw(trim(cols[2]));
    auto it = std::find_if(cats.begin(), cats.end(),
                           [&](const LeakCategory& c) { return c.category == cat && c.type == type; });
    if (it == cats.end()) {
      cats.push_back({cat, type, {}});
      it = cats.end() - 1;
    }
    it->keywords.push_back(kw);
  }
  return LeakCatalog(std::move(cats));
}

void LeakCatalog::save(const std::filesystem::path& path) const {
  std::string buf = "category,type,keyword\n";
  for (const auto& c : categories_)
    for (const auto& k : c.keywords) buf += c.category + "," + c.type + "," + k + "\n";
  write_file(path, buf);
}

std::optional<std::string> LeakCatalog::type_for_key(std::string_view key) const {
  auto it = by_keyword_.find(to_lower(key));
  if (it == by_keyword_.end()) return std::nullopt;
  return it->second;
}

LeakCatalog default_leak_catalog() {
  return LeakCatalog({
      {"Phone", "Sim card number", {"iccid", "simserialnumber", "simno", "simnumber", "sim"}},
      {"Phone", "IMSI", {"imsi", "mobileimsi", "user-imsi", "imsi1", "imsi_no", "x-imsi", "client-imsi"}},
      {"Phone", "Phone number",
       {"phone_num", "phone", "tel_num", "mobile_no", "cellphonenumber", "cellphone", "userphone",
        "tel_number", "usrphonenum"}},
      {"User", "User ID",
       {"user_nick", "user_id", "user_name", "userid", "x-userid", "log-user-id", "login_name",
        "client-user-id"}},
      {"User", "Email",
       {"user_email", "email", "login_email", "email_name", "contact_email", "acc_email"}},
      {"User", "Birthday", {"birthday", "user_birth", "customer_birthday", "passenger_birthday"}},
      {"User", "Gender", {"gender", "sex", "client_gender"}},
      {"Credential", "Password", {"userpwd", "password", "passwd", "user_pwd", "_password", "pwd"}},
      {"Location", "Location",
       {"longitude", "latitude", "lng_lat", "coordinate", "homeaddress", "coords", "geo_location",
        "gps_long", "geoinfo"}},
      {"Device Identifier", "UDID", {"udid", "device_udid"}},
      {"Device Identifier", "Device ID", {"devid", "device_id", "x-device-id", "deviceid"}},
      {"Device Identifier", "IMEI", {"imei", "device-imei", "phone-imei", "imei1", "mobileimei"}},
      {"Device Identifier", "GUID", {"guid", "phoneguid", "dev-guid"}},
      {"Device Identifier", "UUID", {"uuid", "device_uuid", "phoneuuid", "x-device-uuid", "uuid2"}},
      {"Device Identifier", "MAC", {"user_mac", "mac", "mac_addr", "_mac", "x-macaddress"}},
      {"Device Identifier", "Android ID", {"android_id", "androidid", "_androidid", "androidid1"}},
  });
}

std::vector<HeaderPair> packet_pairs(const TrafficRecord& rec) {
  std::vector<HeaderPair> pairs = rec.header_pairs;
  if (rec.http_path) {
    auto q = rec.http_path->find('?');
    if (q != std::string::npos) {
      std::string_view query = std::string_view(*rec.http_path).substr(q + 1);
      if (auto frag = query.find('#'); frag != std::string_view::npos) query = query.substr(0, frag);
      for (auto& p : parse_kv_string(query)) pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

std::vector<LeakEvent> packet_leaks(const TrafficRecord& rec, std::size_t index,
                                    const LeakCatalog& catalog) {
  std::vector<LeakEvent> out;
  for (const auto& p : packet_pairs(rec)) {
    if (trim(p.value).empty()) continue;
    auto type = catalog.type_for_key(trim(p.key));
    if (!type) continue;
    bool seen = std::any_of(out.begin(), out.end(), [&](const LeakEvent& e) { return e.type == *type; });
    if (!seen) out.push_back({index, rec.src_ip, *type, p.key});
  }
  std::sort(out.begin(), out.end());
  return out;
}

double DeviceLeakReport::leaking_app_ratio() const {
  return apps.empty() ? 0.0 : static_cast<double>(leaking_apps.size()) / static_cast<double>(apps.size());
}

double DeviceLeakReport::leaking_traffic_ratio() const {
  return total_packets == 0 ? 0.0
                            : static_cast<double>(leaking_packets) / static_cast<double>(total_packets);
}

void DeviceLeakReport::merge(const DeviceLeakReport& other) {
  leaked_types.insert(other.leaked_types.begin(), other.leaked_types.end());
  leaking_apps.insert(other.leaking_apps.begin(), other.leaking_apps.end());
  apps.insert(other.apps.begin(), other.apps.end());
  leaking_packets += other.leaking_packets;
  total_packets += other.total_packets;
}

void LeakScan::merge(const LeakScan& other, std::size_t index_offset) {
  for (const auto& [d, r] : other.devices) devices[d].merge(r);
  for (auto e : other.events) {
    e.record_index += index_offset;
    events.push_back(std::move(e));
  }
  std::sort(events.begin(), events.end());
}

LeakScan scan_leaks(std::span<const TrafficRecord> records, const std::set<DeviceId>& devices,
                    const LeakCatalog& catalog) {
  LeakScan scan;
  for (const auto& d : devices) scan.devices[d];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (!devices.empty() && !devices.count(rec.src_ip)) continue;
    auto& report = scan.devices[rec.src_ip];
    ++report.total_packets;
    if (rec.app_string) report.apps.insert(*rec.app_string);
    auto leaks = packet_leaks(rec, i, catalog);
    if (leaks.empty()) continue;
    ++report.leaking_packets;
    if (rec.app_string) report.leaking_apps.insert(*rec.app_string);
    for (auto& e : leaks) {
      report.leaked_types.insert(e.type);
      scan.events.push_back(std::move(e));
    }
  }
  std::sort(scan.events.begin(), scan.events.end());
  return scan;
}

double leaking_apps_outside(const LeakScan& scan, const std::set<AppId>& bad_apps) {
  std::set<AppId> leaking;
  for (const auto& [d, r] : scan.devices) leaking.insert(r.leaking_apps.begin(), r.leaking_apps.end());
  if (leaking.empty()) return 0.0;
  std::size_t outside = 0;
  for (const auto& a : leaking)
    if (!bad_apps.count(a)) ++outside;
  return static_cast<double>(outside) / static_cast<double>(leaking.size());
}

std::string format_iso_date(std::int64_t days) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

void DnsEnrichment::load_domains(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 3) throw ParseError("expected domain,first_seen,last_seen", i + 1);
    if (trim(cols[0]) == "domain") continue;
    try {
      Lifetime life{parse_iso_date(cols[1]), parse_iso_date(cols[2])};
      if (life.first_seen > life.last_seen) throw ParseError("first_seen after last_seen");
      domains[std::string(trim(cols[0]))] = life;
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), i + 1);
    }
  }
}

void DnsEnrichment::load_asns(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 2) throw ParseError("expected ip,asn", i + 1);
    if (trim(cols[0]) == "ip") continue;
    if (!is_valid_ipv4(trim(cols[0]))) throw ParseError("bad IPv4 address", i + 1);
    try {
      auto asn = parse_int(cols[1]);
      if (asn < 0 || asn > UINT32_MAX) throw ParseError("ASN out of range");
      asn_of_ip[std::string(trim(cols[0]))] = static_cast<std::uint32_t>(asn);
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), i + 1);
    }
  }
}

void DnsEnrichment::save_domains(const std::filesystem::path& path) const {
  std::string buf = "domain,first_seen,last_seen\n";
  for (const auto& [d, l] : domains)
    buf += d + "," + format_iso_date(l.first_seen) + "," + format_iso_date(l.last_seen) + "\n";
  write_file(path, buf);
}

void DnsEnrichment::save_asns(const std::filesystem::path& path) const {
  std::string buf = "ip,asn\n";
  for (const auto& [ip, asn] : asn_of_ip) buf += ip + "," + std::to_string(asn) + "\n";
  write_file(path, buf);
}

std::pair<std::vector<DeviceId>, std::vector<DeviceId>> select_extremes(
    const std::map<DeviceId, double>& scores, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (scores.size() < 2 * n)
    throw std::invalid_argument("need at least " + std::to_string(2 * n) + " scored devices, have " +
                                std::to_string(scores.size()));
  std::vector<std::pair<double, DeviceId>> ranked;
  ranked.reserve(scores.size());
  for (const auto& [d, s] : scores) ranked.emplace_back(s, d);
  // Descending score, ascending id among ties.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<DeviceId> top, bottom;
  for (std::size_t i = 0; i < n; ++i) top.push_back(ranked[i].second);
  for (std::size_t i = 0; i < n; ++i) bottom.push_back(ranked[ranked.size() - 1 - i].second);
  return {top, bottom};
}

std::map<DeviceId, std::size_t> asn_stats(std::span<const TrafficRecord> records,
                                          const std::set<DeviceId>& devices,
                                          const DnsEnrichment& enrich) {
  std::map<DeviceId, std::set<std::uint32_t>> seen;
  for (const auto& d : devices) seen[d];
  for (const auto& rec : records) {
    auto dev = seen.find(rec.src_ip);
    if (dev == seen.end()) continue;
    auto it = enrich.asn_of_ip.find(rec.dst_ip);
    if (it != enrich.asn_of_ip.end()) dev->second.insert(it->second);
  }
  std::map<DeviceId, std::size_t> out;
  for (const auto& [d, s] : seen) out.emplace_hint(out.end(), d, s.size());
  return out;
}

std::map<DeviceId, std::size_t> short_lived_domains(std::span<const TrafficRecord> records,
                                                    const std::set<DeviceId>& devices,
                                                    const DnsEnrichment& enrich,
                                                    std::int64_t window_days) {
  std::map<DeviceId, std::set<std::string>> seen;
  for (const auto& d : devices) seen[d];
  for (const auto& rec : records) {
    if (!rec.dst_domain) continue;
    auto dev = seen.find(rec.src_ip);
    if (dev == seen.end()) continue;
    auto it = enrich.domains.find(*rec.dst_domain);
    if (it == enrich.domains.end()) continue;
    if (it->second.last_seen - it->second.first_seen < window_days) dev->second.insert(it->first);
  }
  std::map<DeviceId, std::size_t> out;
  for (const auto& [d, s] : seen) out.emplace_hint(out.end(), d, s.size());
  return out;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  std::vector<std::pair<double, double>> out;
  std::sort(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / static_cast<double>(values.size()));
  }
  return out;
}

double fraction_above(const std::map<DeviceId, std::size_t>& counts, double threshold) {
  if (counts.empty()) return 0.0;
  std::size_t above = 0;
  for (const auto& [d, c] : counts)
    if (static_cast<double>(c) > threshold) ++above;
  return static_cast<double>(above) / static_cast<double>(counts.size());
}

void write_leak_report(const std::filesystem::path& path, const LeakScan& scan,
                       const std::map<DeviceId, std::string>& group_of) {
  std::string buf =
      "device_id,group,leaked_types,leaking_apps,total_apps,leaking_packets,total_packets,"
      "leaking_app_ratio,leaking_traffic_ratio\n";
  for (const auto& [d, r] : scan.devices) {
    auto g = group_of.find(d);
    buf += d + "," + (g == group_of.end() ? std::string() : g->second) + "," +
           std::to_string(r.leaked_types.size()) + "," + std::to_string(r.leaking_apps.size()) +
           "," + std::to_string(r.apps.size()) + "," + std::to_string(r.leaking_packets) + "," +
           std::to_string(r.total_packets) + "," + format_double(r.leaking_app_ratio()) + "," +
           format_double(r.leaking_traffic_ratio()) + "\n";
  }
  write_file(path, buf);
}

}  // namespace guiltnet
