#pragma once

// Curvature identities and inequalities for warped-product CR-submanifolds:
// scalar-curvature decomposition, partial minimality, the main inequality
// with its equality diagnostics and the special-case bounds.
//
// Scales: the main and complex-space-form bounds compare (1/2)|h|^2; the
// verbatim special-case bounds compare |h|^2.

#include <algorithm>
#include <cmath>
#include <optional>

#include "warpcheck/subman.hpp"

namespace warpcheck {

/// Warping function data on the leaf through a point, from the induced leaf metric.
struct WarpingData {
  double f = 0.0;
  double lap_f = 0.0;         // geometer's Laplacian of f
  double grad_ln_f_sq = 0.0;  // |grad ln f|^2
  double lap_ln_f = 0.0;      // geometer's Laplacian of ln f
};

inline WarpingData warping_data(const Immersion& im, const Point& x) {
  if (!im.warped()) throw ConfigError("warping data needs a warped declaration");
  const WarpedDecl& w = *im.warped();
  const MetricField leaf = leaf_metric(im.induced_metric(), w.split(), x);
  const Point lp = im.restricted_point(true, x);
  const MetricDerivs d = metric_derivs(leaf, lp);
  const OrthoFrame frame = orthonormal_frame(d.g, lp);
  const Jet3 f = eval_expr(w.f, lp, im.params());
  if (!(f.value() > 0.0)) throw InvalidWarping("warping function is not positive at a sample point");
  const Jet3 lnf = log(f);
  WarpingData out;
  out.f = f.value();
  out.lap_f = laplacian(d, frame, f);
  out.grad_ln_f_sq = grad_norm_sq(d, lnf);
  out.lap_ln_f = laplacian(d, frame, lnf);
  return out;
}

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

/// Residual of the scalar-curvature decomposition of a warped product:
///   tau = n2 Lap f / f + sum_r [sum_{a<b}(h_aa h_bb - h_ab^2) + sum_{A<B}(h_AA h_BB - h_AB^2)]
///         + tau~(leaf planes) + tau~(fiber planes),
/// with tau taken from the induced metric.
inline double scalar_decomposition_residual(const Immersion& im, const Point& x, const SecondFundamentalForm& sff,
                                            const Curvature4& ambient_frame, const WarpingData& wd) {
  if (!sff.split) throw ConfigError("scalar decomposition needs a warped declaration");
  const int n = sff.n(), n1 = sff.split->n1, n2 = sff.split->n2;
  const double tau = frame_scalar(curvature(im.induced_metric(), x).in_frame(sff.frame), 0, n);
  double hterms = 0.0;
  for (int r = 0; r < sff.codim(); ++r) {
    const Mat& h = sff.h[static_cast<std::size_t>(r)];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((i < n1) == (j < n1)) hterms += h(i, i) * h(j, j) - h(i, j) * h(i, j);
  }
  const double rhs = n2 * wd.lap_f / wd.f + hterms + frame_scalar(ambient_frame, 0, n1) + frame_scalar(ambient_frame, n1, n);
  return std::abs(tau - rhs);
}

/// Instance of: a D_2-minimal immersion whose fiber is totally umbilical in
/// the ambient has h(D_2, D_2) = 0.
struct FiberLemmaCheck {
  double fiber_minimal = 0.0;     // hypothesis |H_2|
  double fiber_umbilical = 0.0;   // hypothesis: fiber umbilical in the ambient
  double fiber_block = 0.0;       // conclusion max |h(D_2, D_2)|
  bool hypotheses_hold(double tol) const { return fiber_minimal < tol && fiber_umbilical < tol; }
  bool passes(double tol) const { return !hypotheses_hold(tol) || fiber_block < tol; }
};

inline double block_norm(const SecondFundamentalForm& sff, int begin, int end, int skip = -1) {
  double m = 0.0;
  for (int i = begin; i < end; ++i)
    for (int j = begin; j < end; ++j)
      if (i != skip && j != skip) m = std::max(m, sff.at(i, j).norm());
  return m;
}

inline FiberLemmaCheck fiber_lemma_check(const Immersion& im, const Point& x, const SecondFundamentalForm& sff) {
  if (!sff.split) throw ConfigError("fiber lemma needs a warped declaration");
  FiberLemmaCheck c;
  c.fiber_minimal = sff.fiber_mean_curvature().norm();
  c.fiber_umbilical = factors_in_ambient(im, x).fiber_totally_umbilical;
  c.fiber_block = block_norm(sff, sff.split->n1, sff.n());
  return c;
}

// ---------------------------------------------------------------------------
// Inequalities
// ---------------------------------------------------------------------------

struct EqualityDiagnostics {
  double leaf_block = 0.0;                  // (a) max |h(D_T, D_T)|
  double fiber_block = 0.0;                 // (b) max |h(D_perp, D_perp)|
  double mean = 0.0;                        // |H|
  double leaf_geodesic_in_ambient = 0.0;    // leaf factor totally geodesic in the ambient
  double fiber_umbilical_in_ambient = 0.0;  // fiber factor totally umbilical in the ambient
  double max() const { return std::max({leaf_block, fiber_block, mean}); }
};

struct InequalityResult {
  Point point;
  double lhs = 0.0;
  double rhs = 0.0;
  EqualityDiagnostics diag;
  double slack() const { return lhs - rhs; }
  bool holds(double tol) const { return slack() >= -tol; }
  bool equality(double tol) const { return std::abs(slack()) < tol && diag.max() < tol; }
};

inline EqualityDiagnostics equality_diagnostics(const Immersion& im, const Point& x, const SecondFundamentalForm& sff) {
  if (!sff.split) throw ConfigError("equality diagnostics need a warped declaration");
  EqualityDiagnostics d;
  d.leaf_block = block_norm(sff, 0, sff.split->n1, sff.xi_index);
  d.fiber_block = block_norm(sff, sff.split->n1, sff.n());
  d.mean = sff.mean_curvature().norm();
  const FactorsInAmbient f = factors_in_ambient(im, x);
  d.leaf_geodesic_in_ambient = f.leaf_totally_geodesic;
  d.fiber_umbilical_in_ambient = f.fiber_totally_umbilical;
  return d;
}

/// Main inequality: (1/2)|h|^2 >= tau~(T) - tau~(T N_T) - tau~(T N_perp) - n2 Lap f / f,
/// with tau~ summed over the pushed-forward frame planes of each block.
inline InequalityResult main_inequality(const Immersion& im, const Point& x, const SecondFundamentalForm& sff,
                                     const Curvature4& ambient_frame, const WarpingData& wd) {
  if (!sff.split) throw ConfigError("main inequality needs a warped declaration");
  const int n = sff.n(), n1 = sff.split->n1, n2 = sff.split->n2;
  InequalityResult r;
  r.point = x;
  r.lhs = 0.5 * sff.norm_sq();
  r.rhs = frame_scalar(ambient_frame, 0, n) - frame_scalar(ambient_frame, 0, n1) - frame_scalar(ambient_frame, n1, n) -
          n2 * wd.lap_f / wd.f;
  r.diag = equality_diagnostics(im, x, sff);
  return r;
}

inline InequalityResult main_inequality(const Immersion& im, const Point& x) {
  const auto sff = second_fundamental_form(im, x);
  return main_inequality(im, x, sff, ambient_tangent_curvature(im, sff), warping_data(im, x));
}

/// Curvature difference tau~(T) - tau~(T N_T) - tau~(T N_perp) of a complex space form of constant c.
inline double complex_space_form_difference(double c, int n1, int n2) { return c * n1 * n2 / 4.0; }

/// Complex-space-form bound on (1/2)|h|^2:
///   c n1 n2 / 4 + n2 (|grad ln f|^2 - Lap ln f).
inline double csf_bound(double c, int n1, int n2, const WarpingData& wd) {
  return complex_space_form_difference(c, n1, n2) + n2 * (wd.grad_ln_f_sq - wd.lap_ln_f);
}

/// The introductory complex-space-form bound as printed: 2 n1 n2 c/4 + n2 (|grad ln f|^2 - Lap ln f).
inline double csf_bound_as_printed(double c, int n1, int n2, const WarpingData& wd) {
  return 2.0 * n1 * n2 * c / 4.0 + n2 * (wd.grad_ln_f_sq - wd.lap_ln_f);
}

struct CsfResult {
  InequalityResult reduced;   // on (1/2)|h|^2
  double printed_rhs = 0.0;   // as-printed bound on (1/2)|h|^2
};

inline CsfResult csf_inequality(const Immersion& im, const Point& x, const SecondFundamentalForm& sff, double c,
                             const WarpingData& wd) {
  if (!sff.split) throw ConfigError("complex-space-form bound needs a warped declaration");
  CsfResult out;
  out.reduced.point = x;
  out.reduced.lhs = 0.5 * sff.norm_sq();
  out.reduced.rhs = csf_bound(c, sff.split->n1, sff.split->n2, wd);
  out.reduced.diag = equality_diagnostics(im, x, sff);
  out.printed_rhs = csf_bound_as_printed(c, sff.split->n1, sff.split->n2, wd);
  return out;
}

/// Verbatim special-case bound on |h|^2 with constants c and s:
///   2 n2 (|grad ln f|^2 - Lap ln f + (c + 3)/2 s + 1).
inline double dp_bound_as_printed(double c, double s, int n2, const WarpingData& wd) {
  return 2.0 * n2 * (wd.grad_ln_f_sq - wd.lap_ln_f + (c + 3.0) / 2.0 * s + 1.0);
}

/// Verbatim nearly-Kaehler bound on |h|^2: 2 n2 ((c - 3)/2 s - Lap ln f).
inline double nearly_kaehler_bound(double c, double s, int n2, const WarpingData& wd) {
  return 2.0 * n2 * ((c - 3.0) / 2.0 * s - wd.lap_ln_f);
}

/// Generalized-complex-space-form bound on |h|^2:
///   2 n2 (|grad ln f|^2 - Lap ln f + n1 (c + 3 gamma)/4).
inline double generalized_bound(double c, double gamma, int n1, int n2, const WarpingData& wd) {
  return 2.0 * n2 * (wd.grad_ln_f_sq - wd.lap_ln_f + n1 * (c + 3.0 * gamma) / 4.0);
}

}  // namespace warpcheck
