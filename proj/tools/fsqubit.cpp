// Command-line front end: one subcommand per study, each reading a JSON
// scenario and writing CSV data plus a metadata.json sidecar.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "fsq/cli/commands.hpp"

namespace {

namespace fs = std::filesystem;
using fsq::io::Json;

void report_error(const std::string& code, const std::string& message) {
  std::cerr << Json{{"error", {{"code", code}, {"message", message}}}}.dump(2) << "\n";
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw fsq::ConfigError("cannot open configuration " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw fsq::ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

/// Command-line overrides are applied to the document before validation, so a
/// seed given on the command line satisfies the mandatory-seed rule.
fsq::cli::ScenarioConfig load(const fs::path& path, std::optional<std::uint64_t> seed,
                              std::optional<std::size_t> trials, std::optional<unsigned> threads) {
  Json doc = read_json(path);
  if (doc.is_object() && doc.contains("config") && doc.at("config").is_object()) doc = doc.at("config");
  if (doc.is_object()) {
    if (seed) doc["seed"] = *seed;
    if (trials) doc["trials"] = *trials;
  }
  std::vector<fsq::cli::Issue> issues;
  auto cfg = fsq::cli::parse_config(doc, fs::absolute(path).parent_path(), issues);
  if (issues.empty()) fsq::cli::check_physics(cfg, issues);
  if (!issues.empty()) throw fsq::ConfigError(fsq::cli::describe(issues));
  if (threads) cfg.threads = *threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fine-structure qubit simulator: light shifts, focal fields, Monte-Carlo dynamics and fits"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;

  struct Entry {
    std::string name;
    std::string help;
  };
  const std::vector<Entry> studies = {
      {"rabi", "Rabi flopping trace"},
      {"ramsey", "Phase-reset Ramsey (or echo) fringe trace with fringe fit"},
      {"magic-scan", "Fringe contrast at fixed delay versus field angle"},
      {"t2", "Contrast decay versus delay and Gaussian-envelope T2"},
      {"phinoise", "T2 versus field-angle noise"},
      {"shiftmap", "Focal-plane differential light-shift map and thermal estimate"},
      {"magic-find", "Magic field angle and magic wavelength"},
      {"fit", "Re-analyse an existing trace CSV"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& s : studies) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "Scenario JSON (or a metadata.json from an earlier run)")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Override the configured master seed");
    sub->add_option("--trials", trials, "Override the configured trial count")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "Worker threads (0 = hardware concurrency); results do not depend on it");
    subs.push_back(sub);
  }
  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("--config", config_path, "Scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    std::vector<fsq::cli::Issue> issues;
    try {
      issues = fsq::cli::validate_config(read_json(config_path), fs::absolute(config_path).parent_path());
    } catch (const fsq::Error& e) {
      issues.push_back({"", e.what()});
    }
    Json list = Json::array();
    for (const auto& i : issues) list.push_back({{"field", i.field}, {"message", i.message}});
    std::cout << Json{{"valid", issues.empty()}, {"issues", list}}.dump(2) << "\n";
    return issues.empty() ? 0 : 1;
  }

  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    try {
      const auto cfg = load(config_path, seed, trials, threads);
      const auto bundle = fsq::cli::run_command(sub->get_name(), cfg);
      bundle.commit(out_dir);
      return 0;
    } catch (const fsq::ConfigError& e) {
      report_error(e.code(), e.what());
      return 2;
    } catch (const fsq::Error& e) {
      report_error(e.code(), e.what());
      return 1;
    } catch (const std::exception& e) {
      report_error("InternalError", e.what());
      return 1;
    }
  }
  return 1;
}
