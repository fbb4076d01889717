#include "phi4/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace phi4 {

const char* kCodeVersion = "phi4-spectral 1.0.0";

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not of the form key=value");
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw std::invalid_argument("config: empty key");
  items_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return items_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = items_.find(key);
  return it == items_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = items_.find(key);
  if (it == items_.end()) return fallback;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: field '" + key + "' is not a number: " + it->second);
  }
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  auto it = items_.find(key);
  if (it == items_.end()) return fallback;
  try {
    std::size_t pos = 0;
    long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: field '" + key + "' is not an integer: " + it->second);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = items_.find(key);
  if (it == items_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: field '" + key + "' is not a boolean: " + v);
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  auto it = items_.find(key);
  if (it == items_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("config: field '" + key + "' has a non-numeric entry: " + tok);
    }
  }
  if (out.empty())
    throw std::runtime_error("config: field '" + key + "' is an empty list");
  return out;
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::set<std::string>& allowed) const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : items_)
    if (allowed.count(key) == 0) unknown.push_back(key);
  return unknown;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), tmp_path_(path + ".tmp") {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_g17(v));
  row_mixed(cells);
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (!open_) throw std::runtime_error("CsvWriter: writer already closed");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += values[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (!open_) return;
  open_ = false;
  {
    std::ofstream out(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("CsvWriter: cannot open " + tmp_path_);
    out << buffer_;
    if (!out) throw std::runtime_error("CsvWriter: short write to " + tmp_path_);
  }
  std::filesystem::rename(tmp_path_, path_);
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kCodeVersion;
  j["config"] = config;
  j["seeds"] = seeds;
  j["wall_times_s"] = wall_times_s;
  j["outputs"] = outputs;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot open " + tmp);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace phi4
