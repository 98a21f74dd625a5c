// dehnlab: run experiments, verify filling certificates, run the acceptance suite.
//
// Exit codes: 0 success, 1 failed verification / partial results / failed
// criteria, 2 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dehn/acceptance.hpp"
#include "dehn/estimator.hpp"
#include "dehn/filling.hpp"
#include "dehn/runner.hpp"
#include "json.hpp"

namespace {

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed, const std::optional<std::int64_t>& samples,
            const std::optional<int>& workers, const std::string& out_json, const std::string& out_csv) {
  dehn::ExperimentConfig cfg;
  try {
    cfg = dehn::load_config(path);
    if (seed) cfg.seed = *seed;
    if (samples) cfg.samples = *samples;
    if (workers) cfg.workers = *workers;
    if (!out_json.empty()) cfg.output.json = out_json;
    if (!out_csv.empty()) cfg.output.csv = out_csv;
    dehn::validate(cfg);
  } catch (const dehn::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  try {
    const dehn::RunResult r = dehn::run_and_write(cfg);
    if (cfg.output.json.empty()) std::cout << r.record.dump(2) << "\n";
    for (const auto& w : r.record["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    if (r.record.contains("verified") && !r.record["verified"].get<bool>()) return 1;
    return r.partial ? 1 : 0;
  } catch (const dehn::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  } catch (const dehn::InvalidWord& e) {
    std::cerr << "invalid word: " << e.what() << "\n";
    return 2;
  }
}

int cmd_verify(const std::string& group, const std::string& word, const std::string& cert_path) {
  try {
    const dehn::GroupSpec spec = dehn::GroupSpec::from_id(group);
    const dehn::Word w = dehn::parse_word(word);
    for (dehn::Letter l : w) spec.check(l);
    std::ifstream in(cert_path);
    if (!in) {
      std::cerr << "cannot open " << cert_path << "\n";
      return 2;
    }
    dehn::FillingCertificate cert = dehn::read_certificate(in);
    for (const auto& s : cert.steps)
      if (s.relator < 0 || s.relator >= static_cast<int>(spec.relators().size())) {
        std::cerr << cert_path << ": relator index " << s.relator << " out of range for " << group << "\n";
        return 2;
      }
    cert.target = w;
    const bool ok = dehn::verify_certificate(spec, cert);
    std::cout << (ok ? "valid" : "invalid") << ": " << cert.area() << " relators for " << word << " in " << group
              << "\n";
    return ok ? 0 : 1;
  } catch (const dehn::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cmd_suite(const std::string& level, std::uint64_t seed, const std::vector<std::string>& only,
              const std::string& json_path) {
  dehn::SuiteOptions opt;
  try {
    opt.level = dehn::parse_suite_level(level);
  } catch (const dehn::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  opt.seed = seed;
  opt.only = only;
  const auto results = dehn::run_suite(opt, [](const dehn::CriterionResult& r) {
    std::cout << dehn::summary_line(r) << "\n";
    for (const auto& c : r.checks) std::cout << "    " << c << "\n";
    std::cout.flush();
  });
  nlohmann::json summary{{"level", level}, {"seed", seed}, {"version", dehn::version_string()}};
  summary["passed"] = nlohmann::json::array();
  summary["failed"] = nlohmann::json::array();
  for (const auto& r : results) {
    summary[r.pass ? "passed" : "failed"].push_back(r.id);
    summary["criteria"].push_back(
        {{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"seconds", r.seconds}, {"checks", r.checks}});
  }
  std::cout << "summary " << nlohmann::json{{"level", level}, {"passed", summary["passed"]}, {"failed", summary["failed"]}}.dump()
            << "\n";
  if (!json_path.empty()) dehn::atomic_write(json_path, summary.dump(2) + "\n");
  return summary["failed"].empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dehnlab: averaged Dehn functions of nilpotent groups"};
  app.set_version_flag("--version", std::string(dehn::version_string()));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<int> workers;
  std::string out_json, out_csv;
  run->add_option("-c,--config", config, "config file")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--samples", samples, "override samples per point");
  run->add_option("--workers", workers, "override the worker count");
  run->add_option("--json", out_json, "override output.json");
  run->add_option("--csv", out_csv, "override output.csv");

  auto* verify = app.add_subcommand("verify", "check a filling certificate for a word");
  std::string group, word, cert;
  verify->add_option("-g,--group", group, "group id")->required();
  verify->add_option("-w,--word", word, "loop word over a, A, b, B, ... and '.'")->required();
  verify->add_option("certificate", cert, "certificate TSV")->required();

  auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
  std::string level = "smoke";
  std::uint64_t suite_seed = 1;
  std::vector<std::string> only;
  std::string summary_json;
  suite->add_option("--level", level, "smoke or desk");
  suite->add_option("--seed", suite_seed, "master seed");
  suite->add_option("--only", only, "criterion ids to run");
  suite->add_option("--json", summary_json, "write the machine-readable summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(config, seed, samples, workers, out_json, out_csv);
    if (*verify) return cmd_verify(group, word, cert);
    if (*suite) return cmd_suite(level, suite_seed, only, summary_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
