// warpcheck command-line front end.
//
// Exit codes: 0 all checks pass, 1 a check fails, 2 configuration or parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warpcheck/gallery.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw warpcheck::ConfigError("--tol expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq), text = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw warpcheck::ConfigError("--tol " + name + ": '" + text + "' is not a number");
    out[name] = v;
  }
  return out;
}

std::vector<std::string> split_groups(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of warped-product CR-submanifold geometry"};
  std::string target, checks = "all", format = "text", out_path;
  int points = 64;
  std::uint64_t seed = 42;
  std::vector<std::string> tols;
  bool list = false;
  app.add_option("--target", target, "Built-in target name or path to a .wpc config");
  app.add_option("--checks", checks, "Comma-separated groups: structure, identities, classify, inequalities, all");
  app.add_option("--points", points, "Halton points per domain box")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Offset of the Halton sequence start");
  app.add_option("--tol", tols, "Tolerance override name=value (repeatable)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_path, "Write the report to this file instead of stdout");
  app.add_flag("--list", list, "List built-in targets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list) {
    for (const auto& name : warpcheck::builtin_names()) std::cout << name << "\n";
    return kExitPass;
  }
  if (target.empty()) {
    std::cerr << "error: --target is required\n";
    return kExitConfig;
  }

  try {
    warpcheck::RunOptions opt;
    opt.groups = split_groups(checks);
    opt.points = points;
    opt.seed = seed;
    opt.tolerances = parse_tolerances(tols);
    const warpcheck::Target t = warpcheck::load_target(target);
    const warpcheck::Report report = warpcheck::run_checks(t, target, opt);
    const std::string text = format == "json" ? warpcheck::render_json(report) : warpcheck::render_text(report);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out || !(out << text)) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitConfig;
      }
    }
    return report.pass() ? kExitPass : kExitFail;
  } catch (const warpcheck::GalleryValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const warpcheck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
