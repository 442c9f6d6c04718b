#include "guiltnet/ingest.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <mutex>

#include "guiltnet/util.hpp"

namespace guiltnet {

namespace {

constexpr std::size_t kColumns = 8;

std::optional<std::string> optional_field(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::string_view to_string(EntityMode mode) {
  return mode == EntityMode::AppString ? "app-string" : "dst-ip";
}

EntityMode parse_entity_mode(std::string_view s) {
  if (s == "app-string") return EntityMode::AppString;
  if (s == "dst-ip") return EntityMode::DestinationIP;
  throw ConfigError("unknown entity mode '" + std::string(s) + "' (expected app-string|dst-ip)");
}

bool is_valid_ipv4(std::string_view s) {
  if (s.empty() || s.size() > 15) return false;
  std::string buf(s);
  in_addr addr{};
  return inet_pton(AF_INET, buf.c_str(), &addr) == 1;
}

std::vector<HeaderPair> parse_kv_string(std::string_view s) {
  std::vector<HeaderPair> pairs;
  if (s.empty()) return pairs;
  for (auto seg : split(s, '&')) {
    if (seg.empty()) continue;
    auto eq = seg.find('=');
    if (eq == std::string_view::npos)
      pairs.push_back({std::string(seg), {}});
    else
      pairs.push_back({std::string(seg.substr(0, eq)), std::string(seg.substr(eq + 1))});
  }
  return pairs;
}

std::string format_kv_string(std::span<const HeaderPair> pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += '&';
    out += pairs[i].key;
    out += '=';
    out += pairs[i].value;
  }
  return out;
}

TrafficRecord parse_record(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto cols = split(line, '\t');
  if (cols.size() != kColumns)
    throw ParseError("expected 8 tab-separated columns, got " + std::to_string(cols.size()),
                     line_no);

  TrafficRecord rec;
  try {
    rec.timestamp = parse_int(cols[0]);
  } catch (const ParseError&) {
    throw ParseError("bad timestamp '" + std::string(cols[0]) + "'", line_no);
  }
  if (!is_valid_ipv4(cols[1]))
    throw ParseError("bad IPv4 source address '" + std::string(cols[1]) + "'", line_no);
  if (!is_valid_ipv4(cols[2]))
    throw ParseError("bad IPv4 destination address '" + std::string(cols[2]) + "'", line_no);
  rec.src_ip = std::string(cols[1]);
  rec.dst_ip = std::string(cols[2]);
  rec.dst_domain = optional_field(cols[3]);
  rec.http_method = optional_field(cols[4]);
  rec.http_path = optional_field(cols[5]);
  if (has_whitespace(cols[6]))
    throw ParseError("app string contains whitespace", line_no);
  rec.app_string = optional_field(cols[6]);
  rec.header_pairs = parse_kv_string(cols[7]);
  return rec;
}

std::string format_record(const TrafficRecord& rec) {
  std::string out = std::to_string(rec.timestamp);
  auto col = [&out](std::string_view v) {
    out += '\t';
    out += v;
  };
  col(rec.src_ip);
  col(rec.dst_ip);
  col(rec.dst_domain.value_or(""));
  col(rec.http_method.value_or(""));
  col(rec.http_path.value_or(""));
  col(rec.app_string.value_or(""));
  col(format_kv_string(rec.header_pairs));
  return out;
}

std::vector<TrafficRecord> parse_traffic(std::span<const std::string> lines, unsigned threads) {
  // Slot per line; comment and blank lines stay empty and are dropped after.
  std::vector<std::optional<TrafficRecord>> slots(lines.size());
  // First failing line per worker chunk; the earliest one in file order wins.
  std::size_t n = lines.size();
  std::vector<std::pair<std::size_t, std::string>> failures;
  std::mutex mu;
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::string_view line = lines[i];
      if (trim(line).empty() || line.front() == '#') continue;
      try {
        slots[i] = parse_record(line, i + 1);
      } catch (const ParseError& e) {
        std::lock_guard lock(mu);
        failures.emplace_back(i, e.detail());
        return;
      }
    }
  });
  if (!failures.empty()) {
    auto first = std::min_element(failures.begin(), failures.end());
    throw ParseError(first->second, first->first + 1);
  }
  std::vector<TrafficRecord> out;
  out.reserve(n);
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

std::vector<TrafficRecord> read_traffic_file(const std::filesystem::path& path, unsigned threads) {
  auto lines = read_lines(path);
  return parse_traffic(lines, threads);
}

void write_traffic_file(const std::filesystem::path& path, std::span<const TrafficRecord> records) {
  std::string buf;
  for (const auto& r : records) {
    buf += format_record(r);
    buf += '\n';
  }
  write_file(path, buf);
}

std::optional<AppId> extract_app(const TrafficRecord& rec, EntityMode mode) {
  if (mode == EntityMode::DestinationIP) return rec.dst_ip;
  return rec.app_string;
}

void normalize_edges(EdgeList& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

EdgeList build_edge_stream(std::span<const TrafficRecord> records, EntityMode mode,
                           unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  // Shard by chunk, dedup each shard, then merge. Union is associative so the
  // result is the same for any shard count.
  std::vector<EdgeList> shards(threads);
  std::size_t n = records.size();
  std::size_t chunk = (n + threads - 1) / std::max(1u, threads);
  parallel_for(threads, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        auto app = extract_app(records[i], mode);
        if (app) shards[t].push_back({extract_device(records[i]), std::move(*app)});
      }
      normalize_edges(shards[t]);
    }
  });
  EdgeList merged;
  for (auto& s : shards) merged.insert(merged.end(), std::make_move_iterator(s.begin()),
                                       std::make_move_iterator(s.end()));
  normalize_edges(merged);
  return merged;
}

EdgeList read_edge_file(const std::filesystem::path& path) {
  EdgeList edges;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (trim(line).empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw ParseError("expected device_id<TAB>app_id", i + 1);
    edges.push_back({std::string(cols[0]), std::string(cols[1])});
  }
  normalize_edges(edges);
  return edges;
}

void write_edge_file(const std::filesystem::path& path, const EdgeList& edges) {
  EdgeList sorted = edges;
  normalize_edges(sorted);
  std::string buf;
  for (const auto& e : sorted) {
    buf += e.device;
    buf += '\t';
    buf += e.app;
    buf += '\n';
  }
  write_file(path, buf);
}

}  // namespace guiltnet
