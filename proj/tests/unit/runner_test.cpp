#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dehn/runner.hpp"

using namespace dehn;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json strip_times(nlohmann::json j) {
  j.erase("started");
  j.erase("finished");
  return j;
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("parse and validate") {
    const auto c = parse_config(R"({"group": "z2", "kind": "enumerate", "n": 2})");
    CHECK(c.group == "z2");
    CHECK(c.n == 2);
    CHECK(c.seed == 1);
    CHECK(c.sampler == "auto");
  }

  TEST_CASE("errors name the field and line") {
    try {
      parse_config("{\n  \"group\": \"z9\",\n  \"kind\": \"enumerate\",\n  \"n\": 2\n}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "group");
      CHECK(e.line() == 2);
    }
    try {
      parse_config("{\n  \"group\": \"z2\",\n  \"kind\": \"enumerate\",\n  \"n\": 2,\n  \"extra\": 1\n}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "extra");
      CHECK(e.line() == 5);
    }
    try {
      parse_config("{\n  \"group\": \"z2\",\n  \"kind\": \"enumerate\"\n  \"n\": 2\n}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_config(R"({"group": "z2", "kind": "moments", "n": 8, "t_list": [2, 8]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"group": "z2", "kind": "avg-area", "n_list": [8, 4]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"group": "z2", "kind": "enumerate", "n": "2"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"group": "heis3", "kind": "fill", "word": "aXb"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"group": "z2", "kind": "enumerate", "n": 2, "output": {"pdf": "x"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"group": "z2", "kind": "walk", "n": 2})"), ConfigError);
  }

  TEST_CASE("config hash ignores workers and paths") {
    auto a = parse_config(R"({"group": "z2", "kind": "enumerate", "n": 2})");
    auto b = a;
    b.workers = 7;
    b.output.json = "x.json";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
  }

  TEST_CASE("enumerate z2 n=2 reports 5 loops") {
    const auto r = run_experiment(parse_config(R"({"group": "z2", "kind": "enumerate", "n": 2})"));
    CHECK(r.record["loops"] == 5);
    CHECK(r.record["words"] == 25);
    CHECK(r.record["partial"] == false);
    CHECK(r.record.contains("config_hash"));
    CHECK(r.record["seed"] == 1);
    CHECK(r.csv.rfind("t,distance,count\n", 0) == 0);
  }

  TEST_CASE("identical config and seed reproduce the record") {
    const auto cfg = parse_config(R"({"group": "heis3", "kind": "central-moments", "n_list": [8, 16, 32],
                                      "samples": 200, "seed": 5, "workers": 3})");
    auto cfg1 = cfg;
    cfg1.workers = 1;
    const auto a = run_experiment(cfg), b = run_experiment(cfg1);
    CHECK(strip_times(a.record) == strip_times(b.record));
    CHECK(a.csv == b.csv);
  }

  TEST_CASE("central moments on heis3 land near 1.5") {
    const auto r = run_experiment(parse_config(R"({"group": "heis3", "kind": "central-moments",
                                                   "n_list": [32, 64, 128, 256], "samples": 400})"));
    REQUIRE(r.record["slope"].is_number());
    CHECK(std::fabs(r.record["slope"].get<double>() - 1.5) <= 0.3);
  }

  TEST_CASE("every kind runs") {
    const char* configs[] = {
        R"({"group": "heis3", "kind": "sample", "n": 16, "samples": 5})",
        R"({"group": "z2", "kind": "fill", "word": "aabbAABB", "area": "exact"})",
        R"({"group": "heis3", "kind": "fill", "word": "aabABAbaBA"})",
        R"({"group": "z2", "kind": "avg-area", "n_list": [8, 16, 32], "samples": 50})",
        R"({"group": "z2", "kind": "moments", "n": 32, "t_list": [0, 4, 8, 16], "m": 2, "samples": 50})",
        R"({"group": "z2", "kind": "hsc", "n_list": [8, 16, 32]})",
        R"({"group": "z2", "kind": "ratio", "x_list": ["a", "ab"], "n_list": [8, 16], "arithmetic": "exact"})",
        R"({"group": "z2", "kind": "shift-test", "n": 6, "s": 1, "t": 4, "arithmetic": "exact"})",
        R"({"group": "z3", "kind": "enumerate", "n": 4})",
    };
    for (const char* text : configs) {
      INFO(text);
      const auto r = run_experiment(parse_config(text));
      CHECK(r.record["partial"] == false);
      CHECK_FALSE(r.csv.empty());
    }
  }

  TEST_CASE("fill records a verified certificate") {
    const auto r = run_experiment(parse_config(R"({"group": "z2", "kind": "fill", "word": "abAB"})"));
    CHECK(r.record["verified"] == true);
    CHECK(r.record["winding_area"] == 1);
    CHECK(r.csv.rfind("# dehnlab-certificate group=z2", 0) == 0);
  }

  TEST_CASE("sampler failure gives a partial record") {
    const auto r = run_experiment(parse_config(
        R"({"group": "heis3", "kind": "central-moments", "n_list": [101], "sampler": "rejection", "max_attempts": 1, "samples": 3})"));
    CHECK(r.partial);
    CHECK(r.record["partial"] == true);
    CHECK_FALSE(r.record["warnings"].empty());
  }

  TEST_CASE("atomic write replaces the file and leaves no temp") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dehnlab_atomic_test";
    fs::remove_all(dir);
    const fs::path target = dir / "sub" / "out.json";
    atomic_write(target.string(), "first\n");
    atomic_write(target.string(), "second\n");
    CHECK(slurp(target) == "second\n");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(target.parent_path())) ++entries;
    CHECK(entries == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("run_and_write writes json and csv") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dehnlab_run_test";
    fs::remove_all(dir);
    auto cfg = parse_config(R"({"group": "z2", "kind": "enumerate", "n": 3})");
    cfg.output.json = (dir / "r.json").string();
    cfg.output.csv = (dir / "r.csv").string();
    run_and_write(cfg);
    const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(j["loops"] == 13);
    CHECK(j["version"].get<std::string>().rfind("0.1.0", 0) == 0);
    CHECK(slurp(dir / "r.csv").rfind("t,distance,count", 0) == 0);
    fs::remove_all(dir);
  }
}
