#pragma once

// Target configuration files (.wpc): a sectioned "key = value" text format.
//
//   # comment
//   [section]
//   key = value
//   key(i,j) = "expression"
//
// Expressions are double-quoted and use the expression language over the
// chart variables x1..xn and the parameters p1..pk. Numbers may be constant
// expressions. See the README for the full list of sections and keys.

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpcheck/expr.hpp"
#include "warpcheck/riemann.hpp"
#include "warpcheck/structures.hpp"
#include "warpcheck/subman.hpp"
#include "warpcheck/warped.hpp"

namespace warpcheck {

/// Configuration error located at a line (and, for expressions, a column offset
/// within the quoted text).
class ConfigSyntaxError : public ConfigError {
 public:
  ConfigSyntaxError(int line, const std::string& message) : ConfigError(locate(line, message)), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  static std::string locate(int line, const std::string& message) {
    return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
  }
  int line_;
};

// ---------------------------------------------------------------------------
// Raw document
// ---------------------------------------------------------------------------

struct ConfigEntry {
  std::string key;
  std::vector<int> indices;  // 1-based indices from key(i) or key(i,j)
  std::string value;         // raw value with comments and origin removed
  bool quoted = false;       // value was a double-quoted string
  std::string origin;        // trailing "@label", if any
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;
};

struct ConfigDocument {
  std::vector<ConfigSection> sections;
  const ConfigSection* find(std::string_view name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

/// Strips a '#' comment that is not inside a quoted string.
inline std::string_view strip_comment(std::string_view line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

inline ConfigEntry parse_entry(std::string_view text, int line_no) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigSyntaxError(line_no, "expected 'key = value'");
  std::string_view lhs = trim(text.substr(0, eq));
  std::string_view rhs = trim(text.substr(eq + 1));
  ConfigEntry e;
  e.line = line_no;
  const auto paren = lhs.find('(');
  std::string_view key = paren == std::string_view::npos ? lhs : trim(lhs.substr(0, paren));
  if (key.empty() || !std::all_of(key.begin(), key.end(), is_ident_char)) {
    throw ConfigSyntaxError(line_no, "malformed key '" + std::string(lhs) + "'");
  }
  e.key = std::string(key);
  if (paren != std::string_view::npos) {
    if (lhs.back() != ')') throw ConfigSyntaxError(line_no, "malformed index list in '" + std::string(lhs) + "'");
    std::string_view inside = lhs.substr(paren + 1, lhs.size() - paren - 2);
    while (true) {
      const auto comma = inside.find(',');
      const std::string_view tok = trim(inside.substr(0, comma));
      int v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1) {
        throw ConfigSyntaxError(line_no, "index must be a positive integer in '" + std::string(lhs) + "'");
      }
      e.indices.push_back(v);
      if (comma == std::string_view::npos) break;
      inside = inside.substr(comma + 1);
    }
  }
  if (!rhs.empty() && rhs.front() == '"') {
    const auto close = rhs.find('"', 1);
    if (close == std::string_view::npos) throw ConfigSyntaxError(line_no, "unterminated string");
    e.value = std::string(rhs.substr(1, close - 1));
    e.quoted = true;
    rhs = trim(rhs.substr(close + 1));
    if (!rhs.empty() && rhs.front() != '@') throw ConfigSyntaxError(line_no, "unexpected text after string");
  } else {
    const auto at = rhs.find('@');
    e.value = std::string(trim(rhs.substr(0, at)));
    rhs = at == std::string_view::npos ? std::string_view{} : rhs.substr(at);
  }
  if (!rhs.empty()) {
    const std::string_view label = trim(rhs.substr(1));
    if (label.empty() || !std::all_of(label.begin(), label.end(), is_ident_char)) {
      throw ConfigSyntaxError(line_no, "malformed origin label");
    }
    e.origin = std::string(label);
  }
  return e;
}

}  // namespace detail

inline ConfigDocument parse_config_document(std::string_view text) {
  ConfigDocument doc;
  int line_no = 0;
  while (!text.empty() || line_no == 0) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = detail::trim(detail::strip_comment(line));
    if (line.empty()) {
      if (text.empty()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigSyntaxError(line_no, "malformed section header");
      const std::string name(detail::trim(line.substr(1, line.size() - 2)));
      if (doc.find(name)) throw ConfigSyntaxError(line_no, "duplicate section [" + name + "]");
      doc.sections.push_back({name, line_no, {}});
    } else {
      if (doc.sections.empty()) throw ConfigSyntaxError(line_no, "entry before the first section");
      doc.sections.back().entries.push_back(detail::parse_entry(line, line_no));
    }
    if (text.empty()) break;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

enum class TargetKind { Metric, Warped, Immersion };

inline const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Metric: return "metric";
    case TargetKind::Warped: return "warped";
    case TargetKind::Immersion: return "immersion";
  }
  return "?";
}

/// Expected outcome recorded in a config; checked by the runner.
struct Expectation {
  enum class Type { Flag, Number, Field };
  std::string key;
  Type type = Type::Flag;
  bool flag = false;
  double number = 0.0;
  Expr field;  // expression over the chart variables
  std::string text;
  std::string origin;
  int line = 0;
};

/// Keys accepted in [expect] and whether they take a flag or a value.
inline bool expectation_is_flag(std::string_view key) {
  static const std::vector<std::string_view> flags = {
      "totally_geodesic", "totally_umbilical", "minimal",        "mixed_totally_geodesic", "d1_totally_geodesic",
      "d1_minimal",       "d2_minimal",        "d2_totally_umbilical", "main_equality",   "main_strict",
      "csf_equality",     "cr_warped",         "warping_identity", "contact_cr_identities"};
  return std::find(flags.begin(), flags.end(), key) != flags.end();
}

inline bool expectation_is_value(std::string_view key) {
  static const std::vector<std::string_view> values = {"sectional", "scalar", "mean_curvature", "h_norm_sq",
                                                       "main_lhs",  "main_rhs"};
  return std::find(values.begin(), values.end(), key) != values.end();
}

inline const std::vector<std::string>& origin_labels() {
  static const std::vector<std::string> labels = {"closed-form", "numerical", "identity"};
  return labels;
}

struct InequalityParams {
  double c = 0.0;
  double gamma = 0.0;
  std::optional<double> s;  // defaults to n1/2
};

struct Target {
  std::string name;
  std::string description;
  TargetKind kind = TargetKind::Metric;
  std::vector<double> params;
  DomainBox chart;
  std::vector<Point> points;  // explicit sample points, evaluated before the Halton points

  std::optional<MetricField> metric;    // metric kind
  std::optional<WarpedMetric> warped;   // warped kind
  std::optional<Immersion> immersion;   // immersion kind
  std::optional<AlmostComplexStructure> complex;
  std::optional<AlmostContactStructure> contact;
  std::optional<ContactClass> contact_class;

  InequalityParams inequality;
  std::vector<Expectation> expect;

  int chart_dim() const { return chart.dim(); }
  /// Intrinsic metric of the chart (assembled, declared or induced).
  MetricField chart_metric() const {
    if (metric) return *metric;
    if (warped) return warped->metric();
    return immersion->induced_metric();
  }
  std::optional<WarpedDecl> warped_decl() const {
    if (warped) return WarpedDecl{warped->split().n1, warped->split().n2, warped->f()};
    if (immersion && immersion->warped()) return immersion->warped();
    return std::nullopt;
  }
  const Expectation* expectation(std::string_view key) const {
    for (const auto& e : expect)
      if (e.key == key) return &e;
    return nullptr;
  }
};

namespace detail {

class TargetBuilder {
 public:
  explicit TargetBuilder(const ConfigDocument& doc) : doc_(doc) {}

  Target build() {
    static const std::vector<std::string> known = {"target", "params",    "chart",      "metric", "warped",
                                                   "ambient", "immersion", "structure", "inequality", "expect"};
    for (const auto& s : doc_.sections) {
      if (std::find(known.begin(), known.end(), s.name) == known.end()) {
        throw ConfigSyntaxError(s.line, "unknown section [" + s.name + "]");
      }
    }
    Target t;
    const ConfigSection& target = require_section("target");
    allow_keys(target, {"name", "kind", "description"});
    t.name = require(target, "name").value;
    t.description = optional_value(target, "description").value_or("");
    const ConfigEntry& kind = require(target, "kind");
    if (kind.value == "metric") t.kind = TargetKind::Metric;
    else if (kind.value == "warped") t.kind = TargetKind::Warped;
    else if (kind.value == "immersion") t.kind = TargetKind::Immersion;
    else throw ConfigSyntaxError(kind.line, "kind must be metric, warped or immersion");

    if (const ConfigSection* p = doc_.find("params")) {
      std::size_t k = 0;
      for (const auto& e : p->entries) {
        if (e.key != "p" + std::to_string(++k) || !e.indices.empty()) {
          throw ConfigSyntaxError(e.line, "parameters must be named p1, p2, ... in order");
        }
      }
    }
    t.params = params_;
    n_params_ = static_cast<int>(t.params.size());

    const ConfigSection& chart = require_section("chart");
    allow_keys(chart, {"lower", "upper", "exclude", "point"});
    const std::vector<double> lower = number_list(require(chart, "lower"));
    const std::vector<double> upper = number_list(require(chart, "upper"));
    if (lower.size() != upper.size()) throw ConfigSyntaxError(require(chart, "upper").line, "lower and upper differ in length");
    if (lower.size() > 16) throw ConfigSyntaxError(require(chart, "lower").line, "charts are limited to 16 dimensions");
    const int n = static_cast<int>(lower.size());
    std::vector<ExcludedBall> excluded;
    for (const auto& e : chart.entries)
      if (e.key == "exclude") excluded.push_back(excluded_ball(e, n));
    t.chart = wrap(chart.line, [&] { return DomainBox(lower, upper, excluded); });

    switch (t.kind) {
      case TargetKind::Metric: build_metric(t, n); break;
      case TargetKind::Warped: build_warped(t, n); break;
      case TargetKind::Immersion: build_immersion(t, n); break;
    }
    for (const auto& e : chart.entries) {
      if (e.key != "point") continue;
      const auto c = number_list(e);
      if (static_cast<int>(c.size()) != n) throw ConfigSyntaxError(e.line, "point has the wrong dimension");
      Point p(c);
      if (!t.chart.contains(p)) throw ConfigSyntaxError(e.line, "point lies outside the chart domain");
      t.points.push_back(std::move(p));
    }
    build_inequality(t);
    build_expectations(t, n);
    return t;
  }

 private:
  const ConfigSection& require_section(const std::string& name) const {
    const ConfigSection* s = doc_.find(name);
    if (!s) throw ConfigSyntaxError(0, "missing section [" + name + "]");
    return *s;
  }

  static const ConfigEntry* find(const ConfigSection& s, std::string_view key) {
    const ConfigEntry* out = nullptr;
    for (const auto& e : s.entries) {
      if (e.key != key) continue;
      if (out) throw ConfigSyntaxError(e.line, "duplicate key '" + e.key + "'");
      out = &e;
    }
    return out;
  }

  static const ConfigEntry& require(const ConfigSection& s, std::string_view key) {
    const ConfigEntry* e = find(s, key);
    if (!e) throw ConfigSyntaxError(s.line, "section [" + s.name + "] needs '" + std::string(key) + "'");
    return *e;
  }

  static std::optional<std::string> optional_value(const ConfigSection& s, std::string_view key) {
    const ConfigEntry* e = find(s, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  static void allow_keys(const ConfigSection& s, std::initializer_list<std::string_view> keys) {
    for (const auto& e : s.entries) {
      if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
        throw ConfigSyntaxError(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
      }
    }
  }

  template <class F>
  static auto wrap(int line, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigSyntaxError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigSyntaxError(line, e.what());
    }
  }

  Expr expr(const ConfigEntry& e, int dim) const {
    if (!e.quoted) throw ConfigSyntaxError(e.line, "expression for '" + e.key + "' must be double-quoted");
    try {
      return parse(e.value, dim, n_params_);
    } catch (const ParseError& err) {
      throw ConfigSyntaxError(e.line, "in \"" + e.value + "\": " + err.what());
    }
  }

  double constant(const std::string& text, int line) const {
    try {
      const Expr c = parse(text, 1, n_params_);
      if (c.uses_variable(0)) throw ConfigSyntaxError(line, "'" + text + "' must be a constant");
      return eval_value(c, std::vector<double>{0.0}, params_view());
    } catch (const ParseError& err) {
      throw ConfigSyntaxError(line, "in \"" + text + "\": " + err.what());
    } catch (const ConfigSyntaxError&) {
      throw;
    } catch (const Error& err) {
      throw ConfigSyntaxError(line, err.what());
    }
  }

  std::span<const double> params_view() const { return params_; }

  std::vector<double> split_numbers(const std::string& text, int line) const {
    std::vector<double> out;
    std::string_view rest = text;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view tok = trim(rest.substr(0, comma));
      if (tok.empty()) throw ConfigSyntaxError(line, "empty list element");
      out.push_back(constant(std::string(tok), line));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  std::vector<double> number_list(const ConfigEntry& e) const { return split_numbers(e.value, e.line); }

  int integer(const ConfigEntry& e) const {
    const double v = constant(e.value, e.line);
    if (v != static_cast<int>(v) || v < 1) throw ConfigSyntaxError(e.line, "'" + e.key + "' must be a positive integer");
    return static_cast<int>(v);
  }

  // exclude = center 0, 0; radius 0.1; axes 1, 2
  ExcludedBall excluded_ball(const ConfigEntry& e, int n) const {
    ExcludedBall b;
    std::string_view rest = e.value;
    bool have_center = false, have_radius = false;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      std::string_view part = trim(rest.substr(0, semi));
      rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
      const auto sp = part.find(' ');
      const std::string_view word = part.substr(0, sp);
      const std::string args = sp == std::string_view::npos ? "" : std::string(trim(part.substr(sp + 1)));
      if (word == "center") {
        b.center = split_numbers(args, e.line);
        have_center = true;
      } else if (word == "radius") {
        b.radius = constant(args, e.line);
        have_radius = true;
      } else if (word == "axes") {
        for (double a : split_numbers(args, e.line)) {
          if (a != static_cast<int>(a) || a < 1 || a > n) throw ConfigSyntaxError(e.line, "exclude axes out of range");
          b.axes.push_back(static_cast<int>(a) - 1);
        }
      } else {
        throw ConfigSyntaxError(e.line, "exclude expects 'center', 'radius' and optional 'axes'");
      }
    }
    if (!have_center || !have_radius) throw ConfigSyntaxError(e.line, "exclude needs a center and a radius");
    return b;
  }

  /// n*n expression matrix from key(i,j) entries; lower triangle mirrors the upper.
  std::vector<Expr> matrix(const ConfigSection& s, const std::string& key, int n, int dim, bool symmetric,
                           bool require_diagonal) const {
    std::vector<Expr> out(static_cast<std::size_t>(n * n));
    std::vector<int> seen(static_cast<std::size_t>(n * n), 0);
    for (const auto& e : s.entries) {
      if (e.key != key) continue;
      if (e.indices.size() != 2 || e.indices[0] > n || e.indices[1] > n) {
        throw ConfigSyntaxError(e.line, key + " needs two indices in 1.." + std::to_string(n));
      }
      const auto at = static_cast<std::size_t>((e.indices[0] - 1) * n + e.indices[1] - 1);
      if (seen[at]) throw ConfigSyntaxError(e.line, "duplicate entry " + key + "(" + std::to_string(e.indices[0]) + "," + std::to_string(e.indices[1]) + ")");
      seen[at] = e.line;
      out[at] = expr(e, dim);
    }
    if (require_diagonal) {
      for (int i = 0; i < n; ++i)
        if (!seen[static_cast<std::size_t>(i * n + i)]) {
          throw ConfigSyntaxError(s.line, key + "(" + std::to_string(i + 1) + "," + std::to_string(i + 1) + ") is missing");
        }
    }
    if (symmetric) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          auto& a = out[static_cast<std::size_t>(i * n + j)];
          auto& b = out[static_cast<std::size_t>(j * n + i)];
          if (!a.empty() && !b.empty() && !(a == b)) {
            throw ConfigSyntaxError(seen[static_cast<std::size_t>(j * n + i)],
                                    key + " entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                                        std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
          }
        }
    }
    return out;
  }

  std::vector<Expr> vector(const ConfigSection& s, const std::string& key, int n, int dim) const {
    std::vector<Expr> out(static_cast<std::size_t>(n));
    for (const auto& e : s.entries) {
      if (e.key != key) continue;
      if (e.indices.size() != 1 || e.indices[0] > n) {
        throw ConfigSyntaxError(e.line, key + " needs one index in 1.." + std::to_string(n));
      }
      auto& slot = out[static_cast<std::size_t>(e.indices[0] - 1)];
      if (!slot.empty()) throw ConfigSyntaxError(e.line, "duplicate entry " + key + "(" + std::to_string(e.indices[0]) + ")");
      slot = expr(e, dim);
    }
    return out;
  }

  void forbid(const char* section, TargetKind kind) const {
    if (const ConfigSection* s = doc_.find(section)) {
      throw ConfigSyntaxError(s->line, std::string("section [") + section + "] is not used by " + target_kind_name(kind) +
                                           " targets");
    }
  }

  static DomainBox sub_box(const DomainBox& box, int begin, int end, int line) {
    std::vector<double> lo, hi;
    for (int i = begin; i < end; ++i) lo.push_back(box.lower(i)), hi.push_back(box.upper(i));
    std::vector<ExcludedBall> ex;
    for (const auto& b : box.excluded()) {
      const bool inside = std::all_of(b.axes.begin(), b.axes.end(), [&](int a) { return a >= begin && a < end; });
      const bool outside = std::none_of(b.axes.begin(), b.axes.end(), [&](int a) { return a >= begin && a < end; });
      if (!inside && !outside) throw ConfigSyntaxError(line, "excluded balls of warped charts must stay within one block");
      if (inside) {
        ExcludedBall c = b;
        for (int& a : c.axes) a -= begin;
        ex.push_back(std::move(c));
      }
    }
    return DomainBox(std::move(lo), std::move(hi), std::move(ex));
  }

  void build_structure(Target& t, const MetricField& g) const {
    const ConfigSection* s = doc_.find("structure");
    if (!s) return;
    const ConfigEntry& type = require(*s, "type");
    const int m = g.dim();
    if (type.value == "kaehler") {
      allow_keys(*s, {"type", "J"});
      t.complex = wrap(type.line, [&] { return AlmostComplexStructure(g, matrix(*s, "J", m, m, false, false), t.params); });
    } else if (type.value == "contact") {
      allow_keys(*s, {"type", "phi", "xi", "eta", "class"});
      t.contact = wrap(type.line, [&] {
        return AlmostContactStructure(g, matrix(*s, "phi", m, m, false, false), vector(*s, "xi", m, m),
                                      vector(*s, "eta", m, m), t.params);
      });
      if (const ConfigEntry* c = find(*s, "class")) {
        t.contact_class = contact_class_from_name(c->value);
        if (!t.contact_class) throw ConfigSyntaxError(c->line, "unknown contact class '" + c->value + "'");
      }
    } else {
      throw ConfigSyntaxError(type.line, "structure type must be kaehler or contact");
    }
  }

  void build_metric(Target& t, int n) const {
    for (const char* s : {"warped", "ambient", "immersion"}) forbid(s, t.kind);
    const ConfigSection& m = require_section("metric");
    allow_keys(m, {"g"});
    t.metric = wrap(m.line, [&] {
      return MetricField::from_exprs(n, matrix(m, "g", n, n, true, true), t.chart, t.params, t.name);
    });
    build_structure(t, *t.metric);
  }

  void build_warped(Target& t, int n) const {
    for (const char* s : {"metric", "ambient", "immersion", "structure"}) forbid(s, t.kind);
    const ConfigSection& w = require_section("warped");
    allow_keys(w, {"n1", "n2", "f", "g1", "g2"});
    const int n1 = integer(require(w, "n1")), n2 = integer(require(w, "n2"));
    if (n1 + n2 != n) throw ConfigSyntaxError(w.line, "n1 + n2 must equal the chart dimension");
    const Expr f = expr(require(w, "f"), n1);
    const DomainBox leaf = sub_box(t.chart, 0, n1, w.line), fiber = sub_box(t.chart, n1, n, w.line);
    t.warped = wrap(w.line, [&] {
      auto g1 = MetricField::from_exprs(n1, matrix(w, "g1", n1, n1, true, true), leaf, t.params, t.name + "/leaf");
      auto g2 = MetricField::from_exprs(n2, matrix(w, "g2", n2, n2, true, true), fiber, t.params, t.name + "/fiber");
      return assemble(std::move(g1), std::move(g2), f, t.params);
    });
  }

  void build_immersion(Target& t, int n) const {
    forbid("metric", t.kind);
    const ConfigSection& a = require_section("ambient");
    allow_keys(a, {"dim", "g", "lower", "upper"});
    const int m = integer(require(a, "dim"));
    if (m < n || m > 16) throw ConfigSyntaxError(a.line, "ambient dimension must lie in chart dimension..16");
    std::vector<double> lo(static_cast<std::size_t>(m), -1e6), hi(static_cast<std::size_t>(m), 1e6);
    if (const ConfigEntry* e = find(a, "lower")) lo = number_list(*e);
    if (const ConfigEntry* e = find(a, "upper")) hi = number_list(*e);
    if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m) {
      throw ConfigSyntaxError(a.line, "ambient bounds must have dim entries");
    }
    const bool has_g = std::any_of(a.entries.begin(), a.entries.end(), [](const auto& e) { return e.key == "g"; });
    std::vector<Expr> g;
    if (has_g) {
      g = matrix(a, "g", m, m, true, true);
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g.push_back(Expr::number(i == j ? 1.0 : 0.0, m));
    }
    const MetricField ambient =
        wrap(a.line, [&] { return MetricField::from_exprs(m, g, DomainBox(lo, hi), t.params, t.name + "/ambient"); });

    const ConfigSection& im = require_section("immersion");
    allow_keys(im, {"x"});
    std::vector<Expr> comps = vector(im, "x", m, n);
    for (int a = 0; a < m; ++a)
      if (comps[static_cast<std::size_t>(a)].empty()) {
        throw ConfigSyntaxError(im.line, "immersion component x(" + std::to_string(a + 1) + ") is missing");
      }
    t.immersion = wrap(im.line, [&] { return Immersion::from_exprs(n, comps, ambient, t.chart, t.params, t.name); });

    if (const ConfigSection* w = doc_.find("warped")) {
      allow_keys(*w, {"n1", "n2", "f"});
      const int n1 = integer(require(*w, "n1")), n2 = integer(require(*w, "n2"));
      if (n1 + n2 != n) throw ConfigSyntaxError(w->line, "n1 + n2 must equal the chart dimension");
      t.immersion->set_warped({n1, n2, expr(require(*w, "f"), n1)});
    }
    build_structure(t, ambient);
    if (t.complex) t.immersion->set_complex(*t.complex);
    if (t.contact) t.immersion->set_contact(*t.contact);
  }

  void build_inequality(Target& t) const {
    const ConfigSection* s = doc_.find("inequality");
    if (!s) return;
    allow_keys(*s, {"c", "gamma", "s"});
    if (const ConfigEntry* e = find(*s, "c")) t.inequality.c = constant(e->value, e->line);
    if (const ConfigEntry* e = find(*s, "gamma")) t.inequality.gamma = constant(e->value, e->line);
    if (const ConfigEntry* e = find(*s, "s")) t.inequality.s = constant(e->value, e->line);
  }

  void build_expectations(Target& t, int n) const {
    const ConfigSection* s = doc_.find("expect");
    if (!s) return;
    for (const auto& e : s->entries) {
      Expectation x;
      x.key = e.key;
      x.line = e.line;
      x.text = e.value;
      if (e.origin.empty()) throw ConfigSyntaxError(e.line, "expectation '" + e.key + "' needs an @origin label");
      const auto& labels = origin_labels();
      if (std::find(labels.begin(), labels.end(), e.origin) == labels.end()) {
        throw ConfigSyntaxError(e.line, "unknown origin label '@" + e.origin + "'");
      }
      x.origin = e.origin;
      if (t.expectation(e.key)) throw ConfigSyntaxError(e.line, "duplicate expectation '" + e.key + "'");
      if (expectation_is_flag(e.key)) {
        x.type = Expectation::Type::Flag;
        if (e.value == "true" || e.value == "pass") x.flag = true;
        else if (e.value == "false" || e.value == "fail") x.flag = false;
        else throw ConfigSyntaxError(e.line, "'" + e.key + "' expects true/false or pass/fail");
      } else if (expectation_is_value(e.key)) {
        if (e.quoted) {
          x.type = Expectation::Type::Field;
          x.field = expr(e, n);
        } else {
          x.type = Expectation::Type::Number;
          x.number = constant(e.value, e.line);
        }
      } else {
        throw ConfigSyntaxError(e.line, "unknown expectation '" + e.key + "'");
      }
      t.expect.push_back(std::move(x));
    }
  }

  const ConfigDocument& doc_;
  std::vector<double> params_;
  int n_params_ = 0;

 public:
  TargetBuilder& with_params(std::vector<double> p) {
    params_ = std::move(p);
    return *this;
  }
};

}  // namespace detail

/// Parses and builds a target from config text.
inline Target load_config(std::string_view text) {
  const ConfigDocument doc = parse_config_document(text);
  // Parameters must be known before constant expressions that use them.
  std::vector<double> params;
  if (const ConfigSection* p = doc.find("params")) {
    for (const auto& e : p->entries) {
      try {
        const Expr c = parse(e.value, 1, static_cast<int>(params.size()));
        if (c.uses_variable(0)) throw ConfigSyntaxError(e.line, "parameter values must be constants");
        params.push_back(eval_value(c, std::vector<double>{0.0}, params));
      } catch (const ParseError& err) {
        throw ConfigSyntaxError(e.line, "in \"" + e.value + "\": " + err.what());
      }
    }
  }
  detail::TargetBuilder b(doc);
  b.with_params(params);
  return b.build();
}

}  // namespace warpcheck
