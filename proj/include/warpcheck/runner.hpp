#pragma once

// Runs the checks of a target over a deterministic sample and assembles a
// Report. Points are evaluated in parallel; results are merged in sample order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "warpcheck/config.hpp"
#include "warpcheck/ineq.hpp"
#include "warpcheck/report.hpp"
#include "warpcheck/sampling.hpp"

namespace warpcheck {

inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"structure", 1e-8}, {"identity", 1e-7}, {"warp", 1e-8}, {"fd", 1e-4},
      {"classify", 1e-7},  {"slack", 1e-8},    {"strict", 1e-3}, {"value", 1e-7},
  };
  return t;
}

inline const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> g = {"structure", "identities", "classify", "inequalities"};
  return g;
}

struct RunOptions {
  std::vector<std::string> groups = {"all"};
  int points = 64;
  std::uint64_t seed = 42;
  std::map<std::string, double> tolerances;  // overrides
  int threads = 0;                           // 0: hardware concurrency
  int fd_spot_points = 10;
};

/// Thread cap from WARPCHECK_THREADS (positive integer), else hardware concurrency.
inline int thread_cap_from_env() {
  int cap = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("WARPCHECK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<int>(std::min<long>(cap, v));
  }
  return cap;
}

/// Per-point values keyed by quantity name. NaN marks a quantity that could
/// not be evaluated; `errors` carries the reason.
struct PointValues {
  std::map<std::string, double> values;
  std::map<std::string, std::string> errors;
  double get(const std::string& key) const {
    const auto it = values.find(key);
    return it == values.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }
};

namespace detail {

class PointEvaluator {
 public:
  PointEvaluator(const Target& t, const std::map<std::string, double>& tol) : t_(t), tol_(tol) {}

  PointValues operator()(const Point& x) const {
    PointValues pv;
    intrinsic(pv, x);
    if (t_.immersion) extrinsic(pv, x);
    return pv;
  }

 private:
  template <class F>
  static void guard(PointValues& pv, std::initializer_list<const char*> keys, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      for (const char* k : keys) {
        pv.values[k] = std::numeric_limits<double>::quiet_NaN();
        pv.errors[k] = e.what();
      }
    }
  }

  void intrinsic(PointValues& pv, const Point& x) const {
    auto& v = pv.values;
    const MetricField g = t_.chart_metric();
    guard(pv, {"curvature_symmetries", "scalar", "sectional_min", "sectional_max"}, [&] {
      const MetricDerivs d = metric_derivs(g, x);
      const Curvature4 r = curvature(d, x);
      v["curvature_symmetries"] = r.symmetry_residuals().max();
      v["scalar"] = scalar_curvature(r, orthonormal_frame(d.g, x));
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      const int n = g.dim();
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double k = sectional(r, d.g, Vec::Unit(n, i), Vec::Unit(n, j));
          lo = std::min(lo, k);
          hi = std::max(hi, k);
        }
      v["sectional_min"] = n > 1 ? lo : 0.0;
      v["sectional_max"] = n > 1 ? hi : 0.0;
    });
    if (const auto w = t_.warped_decl()) {
      guard(pv, {"warping_positive"}, [&] {
        v["warping_positive"] = eval_value(w->f, x.coords().first(static_cast<std::size_t>(w->n1)), t_.params);
      });
      guard(pv, {"warped_form"}, [&] { v["warped_form"] = warped_form_residuals(g, w->split(), w->f, x, t_.params).max(); });
      guard(pv, {"warping_identity"}, [&] {
        v["warping_identity"] = warping_identity(g, w->split(), w->f, x, t_.params).residual();
      });
    }
    if (!t_.immersion) structure_values(pv, x);
  }

  void structure_values(PointValues& pv, const Point& y) const {
    auto& v = pv.values;
    if (t_.complex) {
      guard(pv, {"complex_structure"}, [&] { v["complex_structure"] = complex_residuals(*t_.complex, y).max(); });
    }
    if (t_.contact) {
      const AlmostContactStructure& s = *t_.contact;
      const int m = s.dim();
      guard(pv, {"contact_structure"}, [&] { v["contact_structure"] = contact_residuals(s.at(y)).max(); });
      guard(pv, {"normality"}, [&] {
        double worst = 0.0;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) worst = std::max(worst, normality_residual(s, Vec::Unit(m, i), Vec::Unit(m, j), y));
        v["normality"] = worst;
      });
      guard(pv, {"contact_form"}, [&] { v["contact_form"] = contact_form_residual(s, y); });
      if (t_.contact_class) {
        guard(pv, {"contact_class"}, [&] {
          double worst = 0.0;
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
              worst = std::max(worst, structure_class_residual(s, *t_.contact_class, Vec::Unit(m, i), Vec::Unit(m, j), y));
          v["contact_class"] = worst;
        });
      }
    }
  }

  void extrinsic(PointValues& pv, const Point& x) const {
    auto& v = pv.values;
    const Immersion& im = *t_.immersion;
    std::optional<SecondFundamentalForm> sff;
    guard(pv, {"immersion"}, [&] { sff = second_fundamental_form(im, x); });
    if (!sff) return;
    structure_values(pv, sff->image);
    Curvature4 amb;
    guard(pv, {"gauss", "gauss_scalar"}, [&] {
      amb = ambient_tangent_curvature(im, *sff);
      const GaussCheck gc = gauss_check(im, x, *sff, amb);
      v["gauss"] = gc.residual;
      v["gauss_scalar"] = gc.scalar_residual;
    });
    v["mean_curvature"] = sff->mean_curvature().norm();
    v["h_norm_sq"] = sff->norm_sq();
    guard(pv, {"weingarten"}, [&] {
      double worst = 0.0;
      for (int r = 0; r < sff->codim(); ++r) {
        const ShapeOperator A = shape_operator(im, x, sff->normal.col(r), *sff);
        worst = std::max({worst, A.duality_residual, A.asymmetry});
      }
      v["weingarten"] = worst;
    });
    const Classification c = classify(*sff);
    v["minimal"] = c.minimal;
    v["totally_geodesic"] = c.totally_geodesic;
    v["totally_umbilical"] = c.totally_umbilical;
    if (!sff->split) return;
    v["mixed_totally_geodesic"] = c.mixed_totally_geodesic;
    v["d1_totally_geodesic"] = c.leaf_totally_geodesic;
    v["d1_minimal"] = c.leaf_minimal;
    v["d2_minimal"] = c.fiber_minimal;
    v["d2_totally_umbilical"] = c.fiber_totally_umbilical;
    guard(pv, {"fiber_lemma"}, [&] {
      const FiberLemmaCheck f = fiber_lemma_check(im, x, *sff);
      v["fiber_lemma"] = f.hypotheses_hold(tol_.at("classify")) ? f.fiber_block : 0.0;
    });
    if (t_.complex || t_.contact) {
      guard(pv, {"cr_gate"}, [&] { v["cr_gate"] = cr_residuals(im, *sff).max(); });
    }
    if (t_.contact) {
      guard(pv, {"contact_cr"}, [&] { v["contact_cr"] = contact_cr_checks(im, *sff).max(); });
    }
    std::optional<WarpingData> wd;
    guard(pv, {"scalar_decomposition"}, [&] {
      wd = warping_data(im, x);
      v["scalar_decomposition"] = scalar_decomposition_residual(im, x, *sff, amb, *wd);
    });
    if (!t_.complex || !wd || amb.dim() == 0) return;
    guard(pv, {"main_slack", "main_lhs", "main_rhs", "main_equality"}, [&] {
      const InequalityResult r = main_inequality(im, x, *sff, amb, *wd);
      v["main_slack"] = r.slack();
      v["main_lhs"] = r.lhs;
      v["main_rhs"] = r.rhs;
      v["main_equality"] = std::max(std::abs(r.slack()), r.diag.max());
      v["leaf_geodesic_in_ambient"] = r.diag.leaf_geodesic_in_ambient;
      v["fiber_umbilical_in_ambient"] = r.diag.fiber_umbilical_in_ambient;
    });
    const InequalityParams& p = t_.inequality;
    const int n1 = sff->split->n1, n2 = sff->split->n2;
    guard(pv, {"csf_slack", "csf_equality", "csf_printed_slack"}, [&] {
      const CsfResult r = csf_inequality(im, x, *sff, p.c, *wd);
      v["csf_slack"] = r.reduced.slack();
      v["csf_equality"] = std::max(std::abs(r.reduced.slack()), r.reduced.diag.max());
      v["csf_printed_slack"] = r.reduced.lhs - r.printed_rhs;
    });
    const double h2 = sff->norm_sq();
    const double s = p.s.value_or(n1 / 2.0);
    v["generalized_slack"] = h2 - generalized_bound(p.c, p.gamma, n1, n2, *wd);
    v["dp_slack"] = h2 - dp_bound_as_printed(p.c, s, n2, *wd);
    v["nearly_kaehler_slack"] = h2 - nearly_kaehler_bound(p.c, s, n2, *wd);
  }

  const Target& t_;
  const std::map<std::string, double>& tol_;
};

struct CheckSpec {
  std::string name;
  std::string key;
  std::string group;
  std::string anchor;
  CheckKind kind = CheckKind::Residual;
  std::string tol;
  bool informational = false;
};

inline std::vector<CheckSpec> check_specs(const Target& t) {
  using K = CheckKind;
  std::vector<CheckSpec> out;
  auto add = [&](std::string name, std::string group, std::string anchor, K kind, std::string tol, bool info = false,
                 std::string key = {}) {
    if (key.empty()) key = name;
    out.push_back({std::move(name), std::move(key), std::move(group), std::move(anchor), kind, std::move(tol), info});
  };
  const bool warped = t.warped_decl().has_value();
  const bool im = t.immersion.has_value();
  const bool split = warped && im;

  // structure
  if (warped) {
    add("warping_positive", "structure", "warping function is positive", K::Positive, "structure");
    add("warped_form", "structure", "metric has warped block form g1 + f^2 g2", K::Residual, "structure");
  }
  if (t.complex) add("complex_structure", "structure", "J^2 = -I, J orthogonal, J parallel (Kaehler)", K::Residual, "structure");
  if (t.contact) {
    add("contact_structure", "structure", "almost contact metric structure equations", K::Residual, "structure");
    if (t.contact_class) {
      add("contact_class", "structure", std::string("covariant derivative of phi for the ") +
                                            contact_class_name(*t.contact_class) + " class",
          K::Residual, "structure");
    }
    add("normality", "structure", "[phi,phi] + d eta (x) xi = 0", K::Residual, "structure");
    add("contact_form", "structure", "Phi = d eta / 2", K::Residual, "structure");
  }
  if (split && (t.complex || t.contact)) {
    add("cr_gate", "structure", "CR-warped product: leaf invariant, fiber anti-invariant, xi tangent to the leaf",
        K::Residual, "structure");
  }

  // identities
  add("curvature_symmetries", "identities", "algebraic symmetries and first Bianchi identity of R", K::Residual,
      "identity");
  if (warped) {
    add("warping_identity", "identities", "sum of mixed sectional curvatures = n2 Lap f / f", K::Residual, "warp");
  }
  if (im) {
    add("gauss", "identities", "Gauss equation", K::Residual, "identity");
    add("gauss_scalar", "identities", "2 tau = 2 tau~ + n^2 |H|^2 - |h|^2", K::Residual, "identity");
    add("weingarten", "identities", "g(A_N X, Y) = g(h(X,Y), N), A_N self-adjoint", K::Residual, "identity");
  }
  if (split) {
    add("scalar_decomposition", "identities", "scalar curvature decomposition of a warped product submanifold",
        K::Residual, "identity");
  }
  if (split && t.contact) {
    add("contact_cr", "identities", "contact CR-warped product: h(xi,xi), h(D_T,xi), h(D_T,D_perp) relations",
        K::Residual, "identity");
  }
  add("fd_concordance", "identities", "jet derivatives agree with central finite differences", K::Residual, "fd");

  // classify
  if (im) {
    add("minimal", "classify", "|H|", K::Residual, "classify", true);
    add("totally_geodesic", "classify", "max |h|", K::Residual, "classify", true);
    add("totally_umbilical", "classify", "max |h - g H|", K::Residual, "classify", true);
  }
  if (split) {
    add("mixed_totally_geodesic", "classify", "max |h(D_1, D_2)|", K::Residual, "classify", true);
    add("d1_totally_geodesic", "classify", "max |h(D_1, D_1)|", K::Residual, "classify", true);
    add("d1_minimal", "classify", "|H_1|", K::Residual, "classify", true);
    add("d2_minimal", "classify", "|H_2|", K::Residual, "classify", true);
    add("d2_totally_umbilical", "classify", "max |h(D_2, D_2) - g H_2|", K::Residual, "classify", true);
    add("fiber_lemma", "classify", "D_2-minimal with umbilical fiber implies h(D_2, D_2) = 0", K::Residual, "classify");
    if (t.complex || t.contact) {
      add("d1_minimality", "classify", "CR-warped products are D_T-minimal", K::Residual, "classify", false, "d1_minimal");
    }
  }

  // inequalities
  if (split && t.complex) {
    add("main_inequality", "inequalities", "(1/2)|h|^2 >= tau~(T) - tau~(D_1) - tau~(D_2) - n2 Lap f / f",
        K::LowerBound, "slack", false, "main_slack");
    add("main_equality", "inequalities", "max(|slack|, |h(D_1,D_1)|, |h(D_2,D_2)|, |H|)", K::Residual, "slack", true);
    add("leaf_geodesic_in_ambient", "inequalities", "leaf totally geodesic in the ambient", K::Residual, "slack", true);
    add("fiber_umbilical_in_ambient", "inequalities", "fiber totally umbilical in the ambient", K::Residual, "slack",
        true);
    add("csf_bound", "inequalities", "(1/2)|h|^2 >= c n1 n2 / 4 + n2 (|grad ln f|^2 - Lap ln f)", K::LowerBound,
        "slack", false, "csf_slack");
    add("csf_bound_as_printed", "inequalities", "as-printed: (1/2)|h|^2 >= 2 n1 n2 c / 4 + n2 (|grad ln f|^2 - Lap ln f)",
        K::LowerBound, "slack", true, "csf_printed_slack");
    add("generalized_bound", "inequalities", "|h|^2 >= 2 n2 (|grad ln f|^2 - Lap ln f + n1 (c + 3 gamma) / 4)",
        K::LowerBound, "slack", false, "generalized_slack");
    add("dp_bound_as_printed", "inequalities", "as-printed: |h|^2 >= 2 n2 (|grad ln f|^2 - Lap ln f + (c + 3)/2 s + 1)",
        K::LowerBound, "slack", true, "dp_slack");
    add("nearly_kaehler_bound_as_printed", "inequalities", "as-printed: |h|^2 >= 2 n2 ((c - 3)/2 s - Lap ln f)",
        K::LowerBound, "slack", true, "nearly_kaehler_slack");
  }
  return out;
}

/// Group an expectation is reported under.
inline std::string expectation_group(std::string_view key) {
  if (key == "cr_warped") return "structure";
  if (key == "warping_identity" || key == "contact_cr_identities" || key == "sectional" || key == "scalar") {
    return "identities";
  }
  if (key.substr(0, 4) == "main" || key == "csf_equality") return "inequalities";
  return "classify";
}

inline bool passes(CheckKind kind, double worst, double tol) {
  if (std::isnan(worst)) return false;
  switch (kind) {
    case CheckKind::Residual: return worst <= tol;
    case CheckKind::LowerBound: return worst >= -tol;
    case CheckKind::Strict: return worst > tol;
    case CheckKind::Positive: return worst > 0.0;
    case CheckKind::Outcome: return worst == 1.0;
  }
  return false;
}

/// Fills worst, worst_index, pass and note from per-point values.
inline void aggregate(CheckRecord& rec, const std::vector<std::string>& errors) {
  const bool use_max = rec.kind == CheckKind::Residual;
  rec.worst = rec.values.empty() ? 0.0 : rec.values.front();
  rec.worst_index = rec.values.empty() ? -1 : 0;
  for (std::size_t i = 0; i < rec.values.size(); ++i) {
    const double v = rec.values[i];
    if (std::isnan(v)) {
      rec.worst = v;
      rec.worst_index = static_cast<int>(i);
      if (rec.note.empty()) rec.note = "point " + std::to_string(i) + ": " + (errors[i].empty() ? "not evaluated" : errors[i]);
      break;
    }
    if (use_max ? v > rec.worst : v < rec.worst) {
      rec.worst = v;
      rec.worst_index = static_cast<int>(i);
    }
  }
  rec.pass = passes(rec.kind, rec.worst, rec.tolerance);
}

/// Spot comparison of jet derivatives (orders 1 and 2) with the finite-difference
/// oracle for every field the curvature checks differentiate: the chart metric,
/// the warping function, the immersion and the ambient metric along the image.
/// Returns the worst relative mismatch per point; points whose stencils leave a
/// domain are skipped.
inline std::vector<std::pair<int, double>> fd_concordance(const Target& t, const std::vector<Point>& samples,
                                                          int spot_count) {
  std::vector<std::pair<int, double>> out;
  const MetricField g = t.chart_metric();
  const auto w = t.warped_decl();
  const int n = t.chart_dim();

  // Scalar fields as (jet evaluator at x, finite-difference field) pairs.
  struct Field {
    std::function<Jet3(const Point&)> jet;
    ScalarField fd;
    bool on_image = false;
  };
  std::vector<Field> fields;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i * n + j);
      fields.push_back({[g, idx](const Point& p) {
                          const auto v = jet_vars(p);
                          return g.jets(std::span<const Jet3>(v))[idx];
                        },
                        {[g, i, j](const Point& p) { return g.value(p)(i, j); }, t.chart},
                        false});
    }
  if (w) {
    const Expr f = w->f;
    const int n1 = w->n1;
    const std::vector<double> params = t.params;
    fields.push_back({[f, n1, params](const Point& p) { return leaf_jet(f, p, n1, params); },
                      {[f, n1, params](const Point& p) {
                         return eval_value(f, p.coords().first(static_cast<std::size_t>(n1)), params);
                       },
                       t.chart},
                      false});
  }
  if (t.immersion) {
    const Immersion im = *t.immersion;
    for (int a = 0; a < im.ambient_dim(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      fields.push_back({[im, ia](const Point& p) { return im.map_jets(p)[ia]; },
                        {[im, ia](const Point& p) { return im.image(p)[static_cast<int>(ia)]; }, t.chart},
                        false});
    }
    const MetricField amb = im.ambient();
    const int m = amb.dim();
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const auto idx = static_cast<std::size_t>(i * m + j);
        fields.push_back({[amb, idx](const Point& p) {
                            const auto v = jet_vars(p);
                            return amb.jets(std::span<const Jet3>(v))[idx];
                          },
                          {[amb, i, j](const Point& p) { return amb.value(p)(i, j); }, amb.domain()},
                          true});
      }
  }

  for (std::size_t s = 0; s < samples.size() && static_cast<int>(out.size()) < spot_count; ++s) {
    const Point& x = samples[s];
    double worst = 0.0;
    bool fits = true;
    std::optional<Point> y;
    if (t.immersion) y = t.immersion->image(x);
    for (const Field& f : fields) {
      const Point& p = f.on_image ? *y : x;
      const Jet3 j = f.jet(p);
      const int d = p.dim();
      try {
        for (int a = 0; a < d && fits; ++a) {
          worst = std::max(worst, std::abs(j.d1(a) - fd_partial(f.fd, p, {a})) / std::max(1.0, std::abs(j.d1(a))));
          for (int b = a; b < d; ++b) {
            const double e = fd_partial(f.fd, p, {a, b});
            worst = std::max(worst, std::abs(j.d2(a, b) - e) / std::max(1.0, std::abs(j.d2(a, b))));
          }
        }
      } catch (const DomainError&) {
        fits = false;
      }
      if (!fits) break;
    }
    if (fits) out.emplace_back(static_cast<int>(s), worst);
  }
  return out;
}

}  // namespace detail

/// Sample list: the target's explicit points followed by `count` Halton points.
inline std::vector<Point> sample_points(const Target& t, int count, std::uint64_t seed) {
  std::vector<Point> pts = t.points;
  for (Point& p : sample_box(t.chart, count, seed)) pts.push_back(std::move(p));
  return pts;
}

inline std::vector<std::string> normalize_groups(const std::vector<std::string>& requested) {
  std::set<std::string> s;
  for (const auto& g : requested) {
    if (g == "all") {
      s.insert(check_groups().begin(), check_groups().end());
    } else if (std::find(check_groups().begin(), check_groups().end(), g) != check_groups().end()) {
      s.insert(g);
    } else {
      throw ConfigError("unknown check group '" + g + "'");
    }
  }
  if (s.empty()) throw ConfigError("no check groups selected");
  std::vector<std::string> out;
  for (const auto& g : check_groups())
    if (s.count(g)) out.push_back(g);
  return out;
}

inline std::map<std::string, double> resolve_tolerances(const std::map<std::string, double>& overrides) {
  auto tol = default_tolerances();
  for (const auto& [k, v] : overrides) {
    if (!tol.count(k)) throw ConfigError("unknown tolerance '" + k + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance '" + k + "' must be positive");
    tol[k] = v;
  }
  return tol;
}

/// Evaluates `f` on every point with up to `threads` workers; results keep point order.
template <class F>
auto parallel_map(const std::vector<Point>& pts, int threads, F&& f) {
  using R = decltype(f(pts.front()));
  std::vector<R> out(pts.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) out[i] = f(pts[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return out;
}

inline Report run_checks(const Target& t, const std::string& target_ref, const RunOptions& opt) {
  if (opt.points < 1) throw ConfigError("points must be at least 1");
  Report rep;
  rep.target = t.name;
  rep.kind = target_kind_name(t.kind);
  rep.settings.target = target_ref;
  rep.settings.groups = normalize_groups(opt.groups);
  rep.settings.points = opt.points;
  rep.settings.seed = opt.seed;
  rep.settings.tolerances = resolve_tolerances(opt.tolerances);
  const auto& tol = rep.settings.tolerances;
  const std::set<std::string> groups(rep.settings.groups.begin(), rep.settings.groups.end());

  const std::vector<Point> pts = sample_points(t, opt.points, opt.seed);
  for (const Point& p : pts) rep.samples.emplace_back(p.coords().begin(), p.coords().end());
  const int threads = opt.threads > 0 ? opt.threads : thread_cap_from_env();
  const detail::PointEvaluator eval(t, tol);
  const std::vector<PointValues> values = parallel_map(pts, threads, eval);

  auto errors_for = [&](const std::string& key) {
    std::vector<std::string> e(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto it = values[i].errors.find(key);
      if (it != values[i].errors.end()) e[i] = it->second;
      else if (values[i].errors.count("immersion")) e[i] = values[i].errors.at("immersion");
    }
    return e;
  };

  for (const detail::CheckSpec& spec : detail::check_specs(t)) {
    if (!groups.count(spec.group)) continue;
    CheckRecord rec;
    rec.name = spec.name;
    rec.anchor = spec.anchor;
    rec.group = spec.group;
    rec.kind = spec.kind;
    rec.tolerance_name = spec.tol;
    rec.tolerance = tol.at(spec.tol);
    rec.informational = spec.informational;
    if (spec.key == "fd_concordance") {
      const auto spots = detail::fd_concordance(t, pts, opt.fd_spot_points);
      for (const auto& [index, worst] : spots) rec.values.push_back(worst);
      detail::aggregate(rec, std::vector<std::string>(rec.values.size()));
      if (rec.worst_index >= 0) rec.worst_index = spots[static_cast<std::size_t>(rec.worst_index)].first;
      if (spots.empty()) {
        rec.pass = false;
        rec.note = "no sample point admits a finite-difference stencil";
      }
    } else {
      for (const PointValues& pv : values) rec.values.push_back(pv.get(spec.key));
      detail::aggregate(rec, errors_for(spec.key));
    }
    rep.checks.push_back(std::move(rec));
  }

  // Expectations recorded in the target.
  for (const Expectation& e : t.expect) {
    const std::string group = detail::expectation_group(e.key);
    if (!groups.count(group)) continue;
    CheckRecord rec;
    rec.name = "expect." + e.key;
    rec.anchor = e.key + " = " + e.text + " @" + e.origin;
    rec.group = group;
    std::string key = e.key;
    auto linked = [&](const std::string& name) -> const CheckRecord* {
      for (const auto& c : rep.checks)
        if (c.name == name) return &c;
      return nullptr;
    };
    if (e.type == Expectation::Type::Flag &&
        (e.key == "warping_identity" || e.key == "cr_warped" || e.key == "contact_cr_identities")) {
      const std::string name = e.key == "cr_warped" ? "cr_gate" : e.key == "contact_cr_identities" ? "contact_cr" : e.key;
      const CheckRecord* c = linked(name);
      rec.kind = CheckKind::Outcome;
      rec.tolerance_name = c ? c->tolerance_name : "structure";
      rec.tolerance = c ? c->tolerance : 0.0;
      const bool outcome = c && c->pass;
      rec.values = {outcome == e.flag ? 1.0 : 0.0};
      rec.worst = rec.values[0];
      rec.worst_index = c ? c->worst_index : -1;
      rec.pass = rec.worst == 1.0;
      if (!c) rec.note = "check '" + name + "' does not apply to this target";
      rep.checks.push_back(std::move(rec));
      continue;
    }
    std::vector<std::string> errs = errors_for(key);
    if (e.type == Expectation::Type::Flag) {
      const bool strict = e.key == "main_strict";
      const std::string source = strict ? "main_slack" : e.key;
      rec.tolerance_name = strict ? "strict" : (e.key == "main_equality" || e.key == "csf_equality") ? "slack" : "classify";
      rec.tolerance = tol.at(rec.tolerance_name);
      // true: residual within tolerance everywhere; false: above it everywhere.
      rec.kind = strict || !e.flag ? CheckKind::Strict : CheckKind::Residual;
      errs = errors_for(source);
      for (const PointValues& pv : values) rec.values.push_back(pv.get(source));
      if (strict && !e.flag) {
        for (double& v : rec.values) v = -v;
        rec.kind = CheckKind::LowerBound;
      }
    } else {
      rec.kind = CheckKind::Residual;
      rec.tolerance_name = "value";
      rec.tolerance = tol.at("value");
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double expected =
            e.type == Expectation::Type::Number ? e.number : eval_value(e.field, pts[i].coords(), t.params);
        double dev;
        if (e.key == "sectional") {
          dev = std::max(std::abs(values[i].get("sectional_min") - expected),
                         std::abs(values[i].get("sectional_max") - expected));
        } else {
          dev = std::abs(values[i].get(key) - expected);
        }
        rec.values.push_back(dev / std::max(1.0, std::abs(expected)));
      }
      if (e.key == "sectional") errs = errors_for("sectional_min");
    }
    detail::aggregate(rec, errs);
    rep.checks.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace warpcheck
