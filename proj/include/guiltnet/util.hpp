#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace guiltnet {

/// Raised for malformed input files. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }
  // Message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Raised when a file cannot be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters or configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Valid parameters, but the data cannot support the request (e.g. a class
/// with fewer devices than folds).
class InfeasibleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Worker count used when a caller asks for 0 threads.
unsigned default_thread_count();

/// Runs fn(begin, end) over a static partition of [0, n). The partition depends
/// only on n and threads, so callers that write disjoint output slots get
/// identical results for any thread count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// Seeded generator with portable bounded draws. std::uniform_int_distribution
/// and std::shuffle are implementation-defined, so sampling goes through here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound), rejection sampled.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Strict decimal parsers; throw ParseError on trailing junk or overflow.
std::int64_t parse_int(std::string_view s);
double parse_double(std::string_view s);

/// Days since 1970-01-01 for an ISO-8601 calendar date (YYYY-MM-DD).
std::int64_t parse_iso_date(std::string_view s);

// FNV-1a, stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Reads a text file into lines, stripping trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

struct KvEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Reads a "key = value" file. '#' starts a comment; blank lines are skipped.
/// Throws ParseError on a line without '=' or a repeated key.
std::vector<KvEntry> read_kv_config(const std::filesystem::path& path);

}  // namespace guiltnet
