#include "thermolab/experiment.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thermolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thermolab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

Manifest run_text(const std::string& sub, const std::string& text, const fs::path& out) {
  ExperimentConfig cfg = ExperimentConfig::make(sub, KeyValueConfig::parse_string(text));
  cfg.out_dir = out;
  return run(cfg);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops comment lines so runs can be compared on data alone.
std::string body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

nlohmann::json manifest_at(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config errors name the key and line") {
    try {
      run_text("pressure", "model=free_spins\nN=2\ntheta_0=1\nbogus=3\n", scratch("bogus"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "bogus");
      CHECK(e.line() == 4);
    }
    try {
      ExperimentConfig::make("pressure", KeyValueConfig::parse_string("model=free_spins\nseed=-1\n"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "seed");
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(ExperimentConfig::make("nope", KeyValueConfig{}), UsageError);
    CHECK_THROWS_AS(run_text("pressure", "model=ising_chain\nN=3\n", scratch("missing")), ConfigError);
  }

  TEST_CASE("pressure run writes the table and manifest") {
    const fs::path dir = scratch("pressure");
    const Manifest m = run_text("pressure", "model=free_spins\nN=1\ntheta_0=0\nseed=5\n", dir);
    REQUIRE(m.artifacts.size() == 1);
    CHECK(m.artifacts[0].path == "pressure.csv");
    CHECK(m.artifacts[0].rows == 1);
    const auto doc = manifest_at(dir);
    CHECK(doc["subcommand"] == "pressure");
    CHECK(doc["seed"] == 5);
    CHECK(doc["version"] == library_version());
    CHECK(doc["config"]["model"] == "free_spins");
    CHECK(doc["checks_passed"] == true);
    CHECK(doc["summary"]["value"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const std::string text = slurp(dir / "pressure.csv");
    CHECK(text.rfind("# thermolab ", 0) == 0);
    CHECK(text.find("# seed=5") != std::string::npos);
  }

  TEST_CASE("pressure run with extrapolation writes per-size detail") {
    const fs::path dir = scratch("pressure_sizes");
    const Manifest m = run_text("pressure",
                                "model=ising_chain\nJ=1\nh=0.5\ntheta_0=1\ntheta_1=0\nsizes=4:10:2\n"
                                "extrapolation=exponential\n",
                                dir);
    CHECK(m.artifacts.size() == 2);
    CHECK(fs::exists(dir / "pressure_per_size.csv"));
    CHECK(manifest_at(dir)["summary"]["value"].get<double>() ==
          doctest::Approx(1.510430758669232).epsilon(1e-10));
  }

  TEST_CASE("every subcommand runs") {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"entropy-curve", "model=curie_weiss\nJ=1\nh=0\nm=-1:1:0.25\n"},
        {"legendre", "model=free_spins\ncurve=energy\ne=0:1:0.05\ntheta_0=-2:2:0.5\n"},
        {"legendre", "model=curie_weiss\nJ=1\nh=0\nsource=pressure\nN=4\ntheta_0=-2:2:0.5\ntheta_1=0\nq=-0.5:0.5:0.5\n"},
        {"completeness", "model=curie_weiss\nJ=1\nh=0\nconstraint=energy\ne=-0.5,-0.2,0\n"},
        {"kms-verify", "model=ising_chain\nJ=1\nh=0.3\nN=3\ntheta_0=0.7\ntheta_1=0.1\nt=0,1\nsigma_w=2\n"},
        {"diff-test", "model=curie_weiss\nJ=1\nh=0\ntheta_0=3\ntheta_1=-0.01:0.01:0.005\nm_step=1e-4\n"},
    };
    int i = 0;
    for (const auto& [sub, text] : cases) {
      CAPTURE(sub);
      const fs::path dir = scratch("sub" + std::to_string(i++));
      const Manifest m = run_text(sub, text, dir);
      CHECK_FALSE(m.artifacts.empty());
      for (const auto& a : m.artifacts) CHECK(fs::exists(dir / a.path));
      CHECK(manifest_at(dir)["subcommand"] == sub);
      CHECK(m.checks_passed);
    }
  }

  TEST_CASE("completeness artifacts report the degenerate record") {
    const fs::path dir = scratch("completeness");
    run_text("completeness", "model=curie_weiss\nJ=1\nh=0\nconstraint=energy\ne=0,-0.2\n", dir);
    const auto doc = nlohmann::json::parse(slurp(dir / "completeness.json"));
    CHECK(doc["verdict"] == "Incomplete");
    REQUIRE(doc["records"].size() == 2);
    CHECK(doc["records"][0]["multiplicity"] == 1);
    CHECK(doc["records"][1]["multiplicity"] == 2);
    CHECK(doc["records"][1]["verdict"] == "degenerate");
  }

  TEST_CASE("kms-verify flags residuals above the tolerance") {
    const fs::path dir = scratch("kms_fail");
    const Manifest m =
        run_text("kms-verify", "model=ising_chain\nJ=1\nh=0.3\nN=3\ntheta_0=0.7\nt=1\ntolerance=0\n", dir);
    CHECK_FALSE(m.checks_passed);
    CHECK(manifest_at(dir)["checks_passed"] == false);
  }

  TEST_CASE("diff-test finds the kink") {
    const fs::path dir = scratch("kink");
    run_text("diff-test", "model=curie_weiss\nJ=1\nh=0\ntheta_0=3\ntheta_1=-0.01:0.01:0.005\n", dir);
    const auto doc = nlohmann::json::parse(slurp(dir / "kink.json"));
    REQUIRE(doc["kinks"].size() == 1);
    CHECK(doc["kinks"][0]["slope_gap"].get<double>() == doctest::Approx(1.9898030569052576).epsilon(1e-3));
    CHECK(doc["kinks"][0]["differentiable"] == false);
  }

  TEST_CASE("same seed gives identical bodies") {
    const std::string text = "model=transverse_ising\nJ=1\ng=0.8\nN=3\ntheta_0=0.5\nt=0,2\nseed=17\n";
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run_text("kms-verify", text, a);
    run_text("kms-verify", text, b);
    CHECK(body(a / "kms.csv") == body(b / "kms.csv"));
    CHECK(slurp(a / "kms.csv") == slurp(b / "kms.csv"));
  }
}
