#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selberg/error.hpp"
#include "selberg/numeric.hpp"

namespace selberg::output {

// Exact quantities that may outgrow 64 bits travel as decimal strings.
using Value = std::variant<bool, i64, double, std::string>;

struct OutputRecord {
  std::vector<std::pair<std::string, Value>> fields;

  OutputRecord& put(std::string key, Value v) {
    fields.emplace_back(std::move(key), std::move(v));
    return *this;
  }
  OutputRecord& add(std::string key, bool v) { return put(std::move(key), v); }
  OutputRecord& add(std::string key, int v) { return put(std::move(key), static_cast<i64>(v)); }
  OutputRecord& add(std::string key, i64 v) { return put(std::move(key), v); }
  OutputRecord& add(std::string key, double v) { return put(std::move(key), v); }
  OutputRecord& add(std::string key, std::string v) { return put(std::move(key), std::move(v)); }
  OutputRecord& add(std::string key, const char* v) { return put(std::move(key), std::string(v)); }
  OutputRecord& add(std::string key, const BigInt& v) { return put(std::move(key), to_string(v)); }
  OutputRecord& add(std::string key, const Rational& v) { return put(std::move(key), to_string(v)); }
};

enum class Format { Json, Csv };

inline std::string text(const Value& v) {
  struct {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(i64 i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_real(d); }
    std::string operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, v);
}

inline std::string json_line(const OutputRecord& rec) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rec.fields) {
    if (auto* d = std::get_if<double>(&v)) j[k] = round15(*d);
    else std::visit([&j, &k](const auto& x) { j[k] = x; }, v);
  }
  return j.dump();
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// All records of one command share the key sequence of the first.
inline void write(std::ostream& out, const std::vector<OutputRecord>& records, Format fmt) {
  if (fmt == Format::Json) {
    for (const auto& r : records) out << json_line(r) << '\n';
    return;
  }
  if (records.empty()) return;
  const auto& head = records.front().fields;
  for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << csv_cell(head[i].first);
  out << '\n';
  for (const auto& r : records) {
    ensure(r.fields.size() == head.size(), "CSV records with differing columns");
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
      ensure(r.fields[i].first == head[i].first, "CSV records with differing columns");
      out << (i ? "," : "") << csv_cell(text(r.fields[i].second));
    }
    out << '\n';
  }
}

}  // namespace selberg::output
