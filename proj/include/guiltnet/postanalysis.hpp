#pragma once

// Post-analysis of classified devices: key-value privacy leaks in HTTP
// traffic and the network infrastructure (ASes, domain lifetimes) they reach.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "guiltnet/ingest.hpp"

namespace guiltnet {

struct LeakCategory {
  std::string category;               // e.g. "Credential"
  std::string type;                   // e.g. "Password"
  std::vector<std::string> keywords;  // lowercase keys
};

/// Keyword catalog. Keys are matched by exact equality after lowercasing.
class LeakCatalog {
 public:
  LeakCatalog() = default;
  /// Throws ConfigError if a keyword is not lowercase or appears under two types.
  explicit LeakCatalog(std::vector<LeakCategory> categories);

  /// CSV with header: category,type,keyword
  static LeakCatalog load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::span<const LeakCategory> categories() const { return categories_; }
  // Type whose keyword equals lowercase(key), if any.
  std::optional<std::string> type_for_key(std::string_view key) const;
  std::size_t keyword_count() const { return by_keyword_.size(); }

 private:
  std::vector<LeakCategory> categories_;
  std::map<std::string, std::string, std::less<>> by_keyword_;
};

/// The published keyword list (private-information categories seen leaking
/// from mobile apps).
LeakCatalog default_leak_catalog();

/// Every (key, value) pair a packet carries: header pairs plus the query
/// string of http_path.
std::vector<HeaderPair> packet_pairs(const TrafficRecord& rec);

struct LeakEvent {
  std::size_t record_index = 0;  // position in the scanned record sequence
  DeviceId device;
  std::string type;
  std::string key;  // as it appeared in the packet
  auto operator<=>(const LeakEvent&) const = default;
};

/// Types leaked by one packet: some pair has a catalog key (case-insensitive)
/// with a non-empty value.
std::vector<LeakEvent> packet_leaks(const TrafficRecord& rec, std::size_t index,
                                    const LeakCatalog& catalog);

struct DeviceLeakReport {
  std::set<std::string> leaked_types;
  std::set<AppId> leaking_apps;
  std::set<AppId> apps;
  std::uint64_t leaking_packets = 0;
  std::uint64_t total_packets = 0;

  double leaking_app_ratio() const;
  double leaking_traffic_ratio() const;
  // Associative merge: counters add, sets union.
  void merge(const DeviceLeakReport& other);
};

struct LeakScan {
  std::map<DeviceId, DeviceLeakReport> devices;
  std::vector<LeakEvent> events;  // sorted by (record_index, type, key)

  void merge(const LeakScan& other, std::size_t index_offset);
};

/// Scans records of the given devices (all devices when `devices` is empty).
LeakScan scan_leaks(std::span<const TrafficRecord> records, const std::set<DeviceId>& devices,
                    const LeakCatalog& catalog);

/// Fraction of leaking apps (across the report) that are not in bad_apps.
double leaking_apps_outside(const LeakScan& scan, const std::set<AppId>& bad_apps);

struct DnsEnrichment {
  struct Lifetime {
    std::int64_t first_seen;  // days since epoch
    std::int64_t last_seen;
  };
  std::map<std::string, Lifetime, std::less<>> domains;
  std::map<std::string, std::uint32_t, std::less<>> asn_of_ip;

  // CSV domain,first_seen,last_seen (ISO dates). Throws ParseError if first > last.
  void load_domains(const std::filesystem::path& path);
  // CSV ip,asn
  void load_asns(const std::filesystem::path& path);
  void save_domains(const std::filesystem::path& path) const;
  void save_asns(const std::filesystem::path& path) const;
};

std::string format_iso_date(std::int64_t days);

/// n highest-scoring devices (predicted bad) and n lowest (predicted good).
/// Ties are broken by device id. Throws std::invalid_argument when fewer than
/// 2n devices are scored or n == 0.
std::pair<std::vector<DeviceId>, std::vector<DeviceId>> select_extremes(
    const std::map<DeviceId, double>& scores, std::size_t n);

/// Distinct ASes behind the destination IPs each device contacted. IPs with
/// no AS record are ignored. Every requested device gets an entry.
std::map<DeviceId, std::size_t> asn_stats(std::span<const TrafficRecord> records,
                                          const std::set<DeviceId>& devices,
                                          const DnsEnrichment& enrich);

/// Distinct domains with last_seen - first_seen < window_days per device.
std::map<DeviceId, std::size_t> short_lived_domains(std::span<const TrafficRecord> records,
                                                    const std::set<DeviceId>& devices,
                                                    const DnsEnrichment& enrich,
                                                    std::int64_t window_days = 90);

/// Empirical CDF of integer counts: sorted (value, cumulative fraction).
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

/// Fraction of values strictly above a threshold.
double fraction_above(const std::map<DeviceId, std::size_t>& counts, double threshold);

// CSV device_id,group,leaked_types,leaking_apps,total_apps,leaking_packets,total_packets,leaking_app_ratio,leaking_traffic_ratio
void write_leak_report(const std::filesystem::path& path, const LeakScan& scan,
                       const std::map<DeviceId, std::string>& group_of);

}  // namespace guiltnet
