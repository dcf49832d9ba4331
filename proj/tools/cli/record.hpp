#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cvscramble::cli {

// Named columns of doubles, emitted as CSV. Column order is insertion order.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<double> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  // %.17g so the bytes pin the doubles exactly
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct ExperimentRecord {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, Table>> tables;
  nlohmann::ordered_json reports = nlohmann::ordered_json::object();
  double wall_time = 0.0;

  Table& table(const std::string& name, std::vector<std::string> columns);
  const Table* find(const std::string& name) const;
  // Table CSV with provenance columns appended: seed, samples (when the
  // command has them) and d_cut / max_tail (when a truncation report exists).
  std::string table_csv(const Table& t) const;
  // FNV-1a over command, params and every emitted CSV; wall time excluded
  std::uint64_t digest() const;
  nlohmann::ordered_json to_json(bool include_rows = true) const;
};

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// Writes <dir>/<command>_<table>.csv for each table and <dir>/<command>.json.
void write_record(const ExperimentRecord& rec, const std::string& dir);

const char* version_string();

}  // namespace cvscramble::cli
