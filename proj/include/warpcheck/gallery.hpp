#pragma once

// Built-in targets: the configs under gallery/, embedded at build time.
// Each built-in is validated on load; a target whose structure checks fail
// is rejected.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "warpcheck/gallery_data.hpp"
#include "warpcheck/runner.hpp"

namespace warpcheck {

/// A built-in whose validation gate fails.
class GalleryValidationError : public Error {
 public:
  using Error::Error;
};

inline std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, body] : gallery_data::kFiles) out.emplace_back(name);
  return out;
}

inline std::optional<std::string_view> builtin_source(std::string_view name) {
  for (const auto& [n, body] : gallery_data::kFiles)
    if (n == name) return body;
  return std::nullopt;
}

/// Runs the structure group (positivity of f, warped block form, structure
/// equations, CR gate) on the default sample.
inline Report validate(const Target& t, const std::string& ref, int points = 64, std::uint64_t seed = 42) {
  RunOptions opt;
  opt.groups = {"structure"};
  opt.points = points;
  opt.seed = seed;
  return run_checks(t, ref, opt);
}

/// Loads and validates a built-in. Throws ConfigError for unknown names and
/// GalleryValidationError if the gate fails.
inline Target load_builtin(std::string_view name) {
  const auto src = builtin_source(name);
  if (!src) throw ConfigError("unknown built-in target '" + std::string(name) + "'");
  Target t = load_config(*src);
  const Report gate = validate(t, std::string(name));
  if (!gate.pass()) {
    std::string failed;
    for (const auto& c : gate.checks)
      if (!c.informational && !c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    throw GalleryValidationError("built-in '" + std::string(name) + "' fails its validation gate: " + failed);
  }
  return t;
}

/// Resolves a built-in name or a config file path.
inline Target load_target(const std::string& ref) {
  if (builtin_source(ref)) return load_builtin(ref);
  std::ifstream in(ref);
  if (!in) throw ConfigError("'" + ref + "' is neither a built-in target nor a readable config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

}  // namespace warpcheck
