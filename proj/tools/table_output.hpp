#ifndef PTLAME_TOOLS_TABLE_OUTPUT_HPP
#define PTLAME_TOOLS_TABLE_OUTPUT_HPP

// Column tables written as CSV (one metadata comment line, a header line,
// LF endings, 17 significant digits) or as JSON (metadata object plus one
// array per column).

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ptlame::cli {

using Cell = std::variant<std::monostate, double, long long, std::string>;
using Metadata = std::vector<std::pair<std::string, Cell>>;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

inline nlohmann::ordered_json to_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) { rows_.push_back(std::move(row)); }
  std::size_t size() const noexcept { return rows_.size(); }

  void write_csv(std::ostream& os, const Metadata& meta, const Metadata& trailer = {}) const {
    os << '#';
    for (const auto& [k, v] : meta) os << ' ' << k << '=' << format_cell(v);
    os << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
      os << '\n';
    }
    if (!trailer.empty()) {
      os << '#';
      for (const auto& [k, v] : trailer) os << ' ' << k << '=' << format_cell(v);
      os << '\n';
    }
  }

  void write_json(std::ostream& os, const Metadata& meta, const Metadata& trailer = {}) const {
    nlohmann::ordered_json doc;
    auto& md = doc["metadata"];
    md = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) md[k] = to_json(v);
    if (!trailer.empty()) {
      auto& t = doc["summary"];
      t = nlohmann::ordered_json::object();
      for (const auto& [k, v] : trailer) t[k] = to_json(v);
    }
    auto& cols = doc["columns"];
    cols = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : rows_) arr.push_back(to_json(r[i]));
      cols[columns_[i]] = std::move(arr);
    }
    os << doc.dump(2) << '\n';
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace ptlame::cli

#endif  // PTLAME_TOOLS_TABLE_OUTPUT_HPP
