#include "record.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cvscramble/types.hpp"

#ifndef CVSCRAMBLE_VERSION
#define CVSCRAMBLE_VERSION "unknown"
#endif

namespace cvscramble::cli {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw std::logic_error("table row width differs from column count");
  rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (j) out += ',';
    out += columns_[j];
  }
  out += '\n';
  char buf[32];
  for (const auto& r : rows_) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", r[j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json Table::to_json() const {
  nlohmann::ordered_json j;
  j["columns"] = columns_;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    auto row = nlohmann::ordered_json::array();
    // NaN and inf are not valid JSON numbers
    for (double v : r) row.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Table& ExperimentRecord::table(const std::string& name, std::vector<std::string> columns) {
  tables.emplace_back(name, Table(std::move(columns)));
  return tables.back().second;
}

const Table* ExperimentRecord::find(const std::string& name) const {
  for (const auto& [n, t] : tables)
    if (n == name) return &t;
  return nullptr;
}

std::string ExperimentRecord::table_csv(const Table& t) const {
  std::vector<std::pair<std::string, double>> extra{{"seed", static_cast<double>(seed)}};
  if (params.contains("samples")) extra.emplace_back("samples", params["samples"].get<double>());
  if (reports.contains("truncation")) {
    const auto& tr = reports["truncation"];
    extra.emplace_back("d_cut", tr["d_cut"].get<double>());
    extra.emplace_back("max_tail", tr["max_tail"].get<double>());
  }
  auto cols = t.columns();
  for (const auto& [name, v] : extra) cols.push_back(name);
  Table out(std::move(cols));
  for (const auto& r : t.rows()) {
    auto row = r;
    for (const auto& [name, v] : extra) row.push_back(v);
    out.add_row(std::move(row));
  }
  return out.to_csv();
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t ExperimentRecord::digest() const {
  std::uint64_t h = fnv1a(command);
  h = fnv1a(params.dump(), h);
  for (const auto& [name, t] : tables) {
    h = fnv1a(name, h);
    h = fnv1a(table_csv(t), h);
  }
  return h;
}

nlohmann::ordered_json ExperimentRecord::to_json(bool include_rows) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  j["seed"] = seed;
  j["params"] = params;
  j["reports"] = reports;
  j["wall_time_s"] = wall_time;
  j["digest"] = hex64(digest());
  auto tabs = nlohmann::ordered_json::object();
  for (const auto& [name, t] : tables) {
    if (include_rows) {
      tabs[name] = t.to_json();
    } else {
      tabs[name] = {{"columns", t.columns()}, {"rows", t.size()}};
    }
  }
  j["tables"] = std::move(tabs);
  return j;
}

void write_record(const ExperimentRecord& rec, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParameterError("cannot create output directory " + dir + ": " + ec.message());
  auto name = rec.command;
  for (char& c : name)
    if (c == ' ') c = '_';
  for (const auto& [tname, t] : rec.tables) {
    std::ofstream f(fs::path(dir) / (name + "_" + tname + ".csv"), std::ios::binary);
    if (!f) throw ParameterError("cannot write to " + dir);
    f << rec.table_csv(t);
  }
  std::ofstream f(fs::path(dir) / (name + ".json"), std::ios::binary);
  if (!f) throw ParameterError("cannot write to " + dir);
  f << rec.to_json(false).dump(2) << '\n';
}

const char* version_string() { return CVSCRAMBLE_VERSION; }

}  // namespace cvscramble::cli
