#pragma once

// Traffic-record parsing and device/app entity extraction.
//
// A traffic file holds one record per line with 8 tab-separated columns:
//   timestamp, src_ip, dst_ip, dst_domain, http_method, http_path,
//   app_string, header_pairs
// Empty columns are absent optional fields. header_pairs is "k1=v1&k2=v2".
// Lines starting with '#' and blank lines are skipped.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace guiltnet {

using DeviceId = std::string;
using AppId = std::string;

struct HeaderPair {
  std::string key;
  std::string value;
  auto operator<=>(const HeaderPair&) const = default;
};

struct TrafficRecord {
  std::int64_t timestamp = 0;
  std::string src_ip;
  std::string dst_ip;
  std::optional<std::string> dst_domain;
  std::optional<std::string> http_method;
  std::optional<std::string> http_path;
  std::optional<std::string> app_string;
  std::vector<HeaderPair> header_pairs;

  bool operator==(const TrafficRecord&) const = default;
};

enum class EntityMode { AppString, DestinationIP };

std::string_view to_string(EntityMode mode);
// Accepts "app-string" / "dst-ip".
EntityMode parse_entity_mode(std::string_view s);

struct Edge {
  DeviceId device;
  AppId app;
  auto operator<=>(const Edge&) const = default;
};

// Sorted by (device, app), duplicate-free.
using EdgeList = std::vector<Edge>;

bool is_valid_ipv4(std::string_view s);

/// Parses one traffic line. line_no is reported in ParseError.
TrafficRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Inverse of parse_record.
std::string format_record(const TrafficRecord& rec);

/// Parses a whole traffic file, chunked across threads. Output order equals
/// file order regardless of the thread count.
std::vector<TrafficRecord> read_traffic_file(const std::filesystem::path& path,
                                             unsigned threads = 1);
std::vector<TrafficRecord> parse_traffic(std::span<const std::string> lines,
                                         unsigned threads = 1);
void write_traffic_file(const std::filesystem::path& path,
                        std::span<const TrafficRecord> records);

inline DeviceId extract_device(const TrafficRecord& rec) { return rec.src_ip; }

std::optional<AppId> extract_app(const TrafficRecord& rec, EntityMode mode);

/// Deduplicated device-app co-occurrence edges.
EdgeList build_edge_stream(std::span<const TrafficRecord> records, EntityMode mode,
                           unsigned threads = 1);

// Sorts and deduplicates in place.
void normalize_edges(EdgeList& edges);

EdgeList read_edge_file(const std::filesystem::path& path);
void write_edge_file(const std::filesystem::path& path, const EdgeList& edges);

/// "k1=v1&k2=v2" -> pairs. A segment without '=' yields an empty value.
std::vector<HeaderPair> parse_kv_string(std::string_view s);
std::string format_kv_string(std::span<const HeaderPair> pairs);

}  // namespace guiltnet
