#include <Eigen/Core>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "derham/experiments.hpp"
#include "derham/report.hpp"

namespace {

// Exit codes: 0 all checks pass, 1 a check failed, 2 invalid config or input,
// 3 solver failure.
constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitSolverFailure = 3;

int thread_count_from_env() {
  const char* raw = std::getenv("DERHAMLAB_THREADS");
  if (!raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1 || v > 256) return 1;
  return static_cast<int>(v);
}

int run_config(const std::string& config_path, const std::string& output_override) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file: " << config_path << "\n";
    return kExitBadConfig;
  }
  derham::Json config;
  try {
    config = derham::Json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    return kExitBadConfig;
  }

  derham::ExperimentResult result;
  try {
    result = derham::run_experiment(config);
  } catch (const derham::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }

  const std::string out_path =
      output_override.empty() ? derham::report_output_path(config) : output_override;
  derham::write_report(result.report, out_path);
  std::cout << "report: " << out_path << "\n";
  std::cout << "checks: " << result.verdict.checks_total
            << ", failed: " << result.verdict.checks_failed << "\n";
  if (!result.verdict.pass()) {
    for (const std::string& name : result.verdict.failures)
      std::cout << "check failed: " << name << "\n";
    std::cout << "verdict: FAIL\n";
    return kExitCheckFailed;
  }
  std::cout << "verdict: PASS\n";
  return kExitPass;
}

int summarize_reports(const std::vector<std::string>& paths) {
  std::vector<derham::SummaryRow> rows;
  bool all_pass = true;
  for (const std::string& path : paths) {
    derham::Json doc;
    try {
      doc = derham::read_report(path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitBadConfig;
    }
    rows.push_back(derham::summarize_report(doc, path));
    all_pass = all_pass && rows.back().pass;
  }
  std::cout << derham::format_summary(rows);
  return all_pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  Eigen::setNbThreads(thread_count_from_env());

  CLI::App app{
      "Numerical laboratory for the best constants of the discrete "
      "derivative complex on box grids"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  CLI::App* run =
      app.add_subcommand("run", "Run the experiment in a JSON config and write its report");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  run->add_option("-o,--output", output_override,
                  "Report path (overrides the config's output entry)");

  std::vector<std::string> report_paths;
  CLI::App* summarize =
      app.add_subcommand("summarize", "Summarize one or more report files");
  summarize->add_option("reports", report_paths, "Report files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_config(config_path, output_override);
    return summarize_reports(report_paths);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}
