#pragma once

// Geometric fixtures shared by several test files.

#include <string>
#include <vector>

#include "warpcheck/subman.hpp"

namespace warpcheck::testing {

inline std::vector<Expr> parse_all(const std::vector<std::string>& texts, int dim) {
  std::vector<Expr> out;
  for (const auto& t : texts) out.push_back(t.empty() ? Expr() : parse(t, dim));
  return out;
}

inline MetricField flat_metric(int n, DomainBox box) {
  std::vector<std::string> e(static_cast<std::size_t>(n * n), "0");
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = "1";
  return MetricField::from_exprs(n, parse_all(e, n), std::move(box));
}

/// Standard Sasakian structure on R^5 with coordinates (x1, x2, y1, y2, z):
/// eta = (dz - y1 dx1 - y2 dx2)/2, xi = 2 d/dz, g = eta (x) eta + (dx^2 + dy^2)/4.
inline AlmostContactStructure standard_sasakian(double half_width = 2.0) {
  const std::vector<std::string> eta = {"-x3/2", "-x4/2", "0", "0", "1/2"};
  std::vector<std::string> g(25);  // lower triangle left empty, mirrored on parse
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) {
      std::string e = "(" + eta[static_cast<std::size_t>(i)] + ")*(" + eta[static_cast<std::size_t>(j)] + ")";
      if (i == j && i < 4) e += " + 1/4";
      g[static_cast<std::size_t>(i * 5 + j)] = e;
    }
  const std::vector<std::string> phi = {"0", "0",  "-1",  "0",   "0",   //
                                        "0", "0",  "0",   "-1",  "0",   //
                                        "1", "0",  "0",   "0",   "0",   //
                                        "0", "1",  "0",   "0",   "0",   //
                                        "0", "0",  "-x3", "-x4", "0"};
  const std::vector<double> lo(5, -half_width), hi(5, half_width);
  return AlmostContactStructure(MetricField::from_exprs(5, parse_all(g, 5), DomainBox(lo, hi), {}, "sasakian-r5"),
                                parse_all(phi, 5), parse_all({"0", "0", "0", "0", "2"}, 5), parse_all(eta, 5));
}

inline DomainBox box(std::vector<double> lo, std::vector<double> hi) { return DomainBox(std::move(lo), std::move(hi)); }

/// Unit sphere in flat R^3, chart (theta, phi), warped split with f = sin(theta).
inline Immersion sphere() {
  Immersion im = Immersion::from_exprs(2, parse_all({"sin(x1)*cos(x2)", "sin(x1)*sin(x2)", "cos(x1)"}, 2),
                                       flat_metric(3, box({-2, -2, -2}, {2, 2, 2})), box({0.1, -3}, {3.0, 3}));
  im.set_warped({1, 1, parse("sin(x1)", 1)});
  return im;
}

/// Complex structure J(a, b, c, d) = (-b, a, -d, c) on flat R^4 = C^2 (or its C^k analogue).
inline AlmostComplexStructure standard_complex(const MetricField& flat) {
  const int m = flat.dim();
  std::vector<std::string> J(static_cast<std::size_t>(m * m), "0");
  for (int k = 0; k + 1 < m; k += 2) {
    J[static_cast<std::size_t>(k * m + k + 1)] = "-1";
    J[static_cast<std::size_t>((k + 1) * m + k)] = "1";
  }
  return AlmostComplexStructure(flat, parse_all(J, m));
}

/// z (cos t, sin t) in C^2 with z = x1 + i x2, t = x3; warped with f = |z|.
/// With eps != 0 the map gains a third complex coordinate eps z^2 (ambient C^3).
inline Immersion chen_cr(double eps = 0.0) {
  std::vector<std::string> comps = {"x1*cos(x3)", "x2*cos(x3)", "x1*sin(x3)", "x2*sin(x3)"};
  if (eps != 0.0) {
    const std::string e = std::to_string(eps);
    comps.push_back(e + "*(x1^2 - x2^2)");
    comps.push_back(e + "*2*x1*x2");
  }
  const int m = static_cast<int>(comps.size());
  const MetricField flat = flat_metric(m, DomainBox(std::vector<double>(static_cast<std::size_t>(m), -9.0),
                                                    std::vector<double>(static_cast<std::size_t>(m), 9.0)));
  Immersion im = Immersion::from_exprs(3, parse_all(comps, 3), flat, box({-2, -2, 0.1}, {2, 2, 1.4}));
  im.set_warped({2, 1, parse("sqrt(x1^2 + x2^2)", 2)});
  im.set_complex(standard_complex(flat));
  return im;
}

/// Affine (u, v, t) -> (u, v, t, 0) in flat C^2 with f = 1.
inline Immersion trivial_product() {
  const MetricField flat = flat_metric(4, box({-9, -9, -9, -9}, {9, 9, 9, 9}));
  Immersion im = Immersion::from_exprs(3, parse_all({"x1", "x2", "x3", "0"}, 3), flat, box({-1, -1, -1}, {1, 1, 1}));
  im.set_warped({2, 1, parse("1", 2)});
  im.set_complex(standard_complex(flat));
  return im;
}

/// Torus of radii 2 and 1 in flat R^3, chart (theta, phi), warped with f = 2 + cos(theta).
inline Immersion torus() {
  Immersion im = Immersion::from_exprs(
      2, parse_all({"(2 + cos(x1))*cos(x2)", "(2 + cos(x1))*sin(x2)", "sin(x1)"}, 2),
      flat_metric(3, box({-4, -4, -4}, {4, 4, 4})), box({-1.2, -3}, {1.2, 3}));
  im.set_warped({1, 1, parse("2 + cos(x1)", 1)});
  return im;
}

/// Contact CR-warped product in the standard Sasakian R^5; leaf (u, v, s) contains xi.
inline Immersion sasakian_cr() {
  const AlmostContactStructure s = standard_sasakian(5.0);
  Immersion im = Immersion::from_exprs(
      4, parse_all({"x1*cos(x4)", "x1*sin(x4)", "x2*cos(x4)", "x2*sin(x4)", "x3"}, 4), s.metric(),
      box({0.2, 0.2, -1, 0.1}, {1.5, 1.5, 1, 1.4}));
  im.set_warped({3, 1, parse("sqrt(x1^2 + x2^2)/2", 3)});
  im.set_contact(s);
  return im;
}

}  // namespace warpcheck::testing
