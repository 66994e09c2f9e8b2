// Scenario runner: builds a model, runs verification suites, writes a JSON report.
// Exit status: 0 all checks pass, 1 some check fails, 2 configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hypersym/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypersym: hyper-symplectic structure verifier for integrable systems"};
  std::string config_path, scenario, output;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance_fd, fd_step;
  bool list = false;
  app.add_option("--config", config_path, "JSON scenario configuration");
  app.add_option("--scenario", scenario, "scenario name (overrides the config)");
  app.add_option("--output", output, "report path (default: standard output)");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--tolerance-fd", tolerance_fd, "tolerance for finite-difference identities");
  app.add_option("--fd-step", fd_step, "relative finite-difference step");
  app.add_flag("--list", list, "list scenarios and suites");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (list) {
    std::cout << hypersym::list_scenarios();
    return kExitPass;
  }

  hypersym::ScenarioConfig config;
  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw hypersym::ConfigError("--config", "cannot open '" + config_path + "'");
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw hypersym::ConfigError("--config", e.what());
      }
    } else if (scenario.empty()) {
      throw hypersym::ConfigError("--scenario", "either --config or --scenario is required");
    }
    config = hypersym::config_from_json(j, scenario.empty() ? std::nullopt : std::optional(scenario));
    if (seed) config.sampling.seed = *seed;
    if (tolerance_fd) config.tolerances.fd = *tolerance_fd;
    if (fd_step) config.sampling.fd_step = *fd_step;
    if (!output.empty()) config.output = output;
    hypersym::validate(config);
  } catch (const hypersym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const hypersym::ReportDocument report = hypersym::run_scenario(config);
  const std::string text = report.to_json().dump(2) + "\n";
  if (config.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(config.output);
    if (!out) {
      std::cerr << "cannot write report to '" << config.output << "'\n";
      return kExitConfig;
    }
    out << text;
    std::cerr << (report.verdict ? "PASS" : "FAIL") << ": " << report.reports.size() << " checks, report written to "
              << config.output << "\n";
  }
  return report.verdict ? kExitPass : kExitFail;
}
