#pragma once

// Deterministic low-discrepancy sampling of domain boxes.

#include <array>
#include <cstdint>
#include <vector>

#include "warpcheck/jets.hpp"

namespace warpcheck {

inline constexpr std::array<int, 16> kHaltonBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

/// Van der Corput radical inverse of `index` in `base`, in [0, 1).
inline double radical_inverse(std::uint64_t index, int base) {
  const auto b = static_cast<std::uint64_t>(base);
  double inv = 1.0 / static_cast<double>(base), scale = inv, r = 0.0;
  while (index > 0) {
    r += static_cast<double>(index % b) * scale;
    index /= b;
    scale *= inv;
  }
  return r;
}

/// Point `index` of the Halton sequence in [0, 1)^dim.
inline std::vector<double> halton(std::uint64_t index, int dim) {
  if (dim <= 0 || dim > static_cast<int>(kHaltonBases.size())) throw InvalidArgument("halton: unsupported dimension");
  std::vector<double> u(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) u[static_cast<std::size_t>(i)] = radical_inverse(index, kHaltonBases[static_cast<std::size_t>(i)]);
  return u;
}

/// `count` Halton points of the box, skipping excluded balls. The sequence
/// starts at index seed + 1 (index 0 is the box corner). Throws DomainError if
/// the excluded region swallows too many candidates.
inline std::vector<Point> sample_box(const DomainBox& box, int count, std::uint64_t seed) {
  if (count < 0) throw InvalidArgument("sample count must be non-negative");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::uint64_t limit = 1000ULL * static_cast<std::uint64_t>(count) + 1000ULL;
  for (std::uint64_t k = 0; static_cast<int>(out.size()) < count; ++k) {
    if (k >= limit) throw DomainError("sampling: excluded region rejects nearly every candidate");
    const auto u = halton(seed + 1 + k, box.dim());
    Point p = box.map_unit(u);
    if (box.contains(p)) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace warpcheck
