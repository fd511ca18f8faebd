#pragma once

// Check reports and their text and JSON renderings. Numbers are written with
// 17 significant digits in both formats.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace warpcheck {

#ifndef WARPCHECK_VERSION
#define WARPCHECK_VERSION "0.0.0"
#endif

inline constexpr const char* kVersion = WARPCHECK_VERSION;

/// How a check aggregates its per-point values.
enum class CheckKind {
  Residual,    // pass iff max value <= tolerance
  LowerBound,  // slack; pass iff min value >= -tolerance
  Strict,      // pass iff min value > tolerance
  Positive,    // pass iff min value > 0
  Outcome,     // single value: 1 pass, 0 fail
};

inline const char* check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::Residual: return "residual";
    case CheckKind::LowerBound: return "slack";
    case CheckKind::Strict: return "strict";
    case CheckKind::Positive: return "positive";
    case CheckKind::Outcome: return "outcome";
  }
  return "?";
}

struct CheckRecord {
  std::string name;
  std::string anchor;  // the statement being checked
  std::string group;
  CheckKind kind = CheckKind::Residual;
  std::string tolerance_name;
  double tolerance = 0.0;
  double worst = 0.0;       // max for residuals, min otherwise
  int worst_index = -1;     // index into the sample list
  std::vector<double> values;
  bool pass = true;
  bool informational = false;  // reported, never fails the verdict
  std::string note;
};

struct RunSettings {
  std::string target;
  std::vector<std::string> groups;
  int points = 64;
  std::uint64_t seed = 42;
  std::map<std::string, double> tolerances;
};

struct Report {
  std::string target;
  std::string kind;
  RunSettings settings;
  std::vector<std::vector<double>> samples;
  std::vector<CheckRecord> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.informational && !c.pass) return false;
    return true;
  }
  const CheckRecord* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// %.17g, with non-finite values as "null".
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

inline std::string json_numbers(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out + "]";
}

}  // namespace detail

inline std::string render_json(const Report& r) {
  using detail::json_numbers;
  using detail::json_string;
  std::string o = "{\n";
  o += "  \"version\": " + json_string(kVersion) + ",\n";
  o += "  \"config\": {\n";
  o += "    \"target\": " + json_string(r.settings.target) + ",\n";
  o += "    \"name\": " + json_string(r.target) + ",\n";
  o += "    \"kind\": " + json_string(r.kind) + ",\n";
  o += "    \"checks\": [";
  for (std::size_t i = 0; i < r.settings.groups.size(); ++i) o += (i ? ", " : "") + json_string(r.settings.groups[i]);
  o += "],\n";
  o += "    \"points\": " + std::to_string(r.settings.points) + ",\n";
  o += "    \"seed\": " + std::to_string(r.settings.seed) + ",\n";
  o += "    \"tolerances\": {";
  bool first = true;
  for (const auto& [k, v] : r.settings.tolerances) {
    o += (first ? "" : ", ") + json_string(k) + ": " + format_number(v);
    first = false;
  }
  o += "},\n";
  o += "    \"samples\": [";
  for (std::size_t i = 0; i < r.samples.size(); ++i) o += (i ? ", " : "") + json_numbers(r.samples[i]);
  o += "]\n  },\n";
  o += "  \"checks\": [";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const CheckRecord& c = r.checks[i];
    o += i ? ",\n    {" : "\n    {";
    o += "\"name\": " + json_string(c.name);
    o += ", \"anchor\": " + json_string(c.anchor);
    o += ", \"group\": " + json_string(c.group);
    o += ", \"kind\": " + json_string(check_kind_name(c.kind));
    o += ", \"tolerance_name\": " + json_string(c.tolerance_name);
    o += ", \"tolerance\": " + format_number(c.tolerance);
    o += ", \"worst\": " + format_number(c.worst);
    o += ", \"worst_index\": " + std::to_string(c.worst_index);
    o += ", \"points\": " + std::to_string(c.values.size());
    o += ", \"values\": " + json_numbers(c.values);
    o += ", \"pass\": " + std::string(c.pass ? "true" : "false");
    o += ", \"informational\": " + std::string(c.informational ? "true" : "false");
    o += ", \"note\": " + json_string(c.note) + "}";
  }
  o += r.checks.empty() ? "],\n" : "\n  ],\n";
  o += "  \"verdict\": " + json_string(r.pass() ? "pass" : "fail") + "\n}\n";
  return o;
}

/// One line per check:
///   PASS  name  group  worst=<v> tol[name]=<v> at=<index> n=<count>  # anchor
inline std::string render_text(const Report& r) {
  std::string o = "warpcheck " + std::string(kVersion) + "\n";
  o += "target: " + r.target + " (" + r.kind + ")\n";
  o += "points: " + std::to_string(r.samples.size()) + "  seed: " + std::to_string(r.settings.seed) + "\n";
  for (const CheckRecord& c : r.checks) {
    const char* status = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
    o += std::string(status) + "  " + c.name + "  " + c.group + "  " + check_kind_name(c.kind);
    o += "  worst=" + format_number(c.worst);
    o += "  tol[" + c.tolerance_name + "]=" + format_number(c.tolerance);
    o += "  at=" + std::to_string(c.worst_index);
    o += "  n=" + std::to_string(c.values.size());
    o += "  # " + c.anchor;
    if (!c.note.empty()) o += " (" + c.note + ")";
    o += "\n";
  }
  o += std::string("verdict: ") + (r.pass() ? "pass" : "fail") + "\n";
  return o;
}

}  // namespace warpcheck
