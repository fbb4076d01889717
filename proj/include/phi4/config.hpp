#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace phi4 {

/// Plain-text key=value configuration with CLI-flag overrides. Lines starting
/// with '#' and blank lines are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Keys present here but not in the allowed set.
  std::vector<std::string> unknown_keys(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& items() const { return items_; }

 private:
  std::map<std::string, std::string> items_;
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double x);

/// CSV file with a header row; floats printed via format_g17. The file is
/// written to a temporary and atomically renamed on close.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  void close();

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string tmp_path_;
  std::string buffer_;
  bool open_ = true;
};

/// Reproducibility record for a run: resolved configuration, code version,
/// per-task seeds, wall times, and the output file list.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> seeds;
  std::map<std::string, double> wall_times_s;
  std::vector<std::string> outputs;

  void write(const std::string& path) const;
};

extern const char* kCodeVersion;

}  // namespace phi4
