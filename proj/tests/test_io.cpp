#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "digeo/io.hpp"
#include "digeo/rng.hpp"

using namespace digeo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("digeo_test_" + name)).string();
}

}  // namespace

TEST_CASE("descriptor round-trip preserves all norms") {
  for (const char* name : {"prop21_b", "linf_2", "poly_hex", "ellipse", "day_p15_b"}) {
    const DirectIntegralSpace y = fixture(name);
    const DirectIntegralSpace back = di_from_json(to_json(y));
    REQUIRE(back.total_dim() == y.total_dim());
    Rng rng(111);
    for (int t = 0; t < 1000; ++t) {
      DIVector f;
      for (const auto& fiber : y.fibers) f.blocks.push_back(rng.gaussian_vector(fiber.dim));
      CHECK(di_norm(back, f) == doctest::Approx(di_norm(y, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("save and load through a file") {
  const DirectIntegralSpace y = fixture("prop21_a");
  const std::string path = tmp_path("space.json");
  save_space(y, path);
  const DirectIntegralSpace back = load_space(path);
  CHECK(space_hash(back) == space_hash(y));
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
}

TEST_CASE("schema errors name the offending field") {
  using nlohmann::json;
  CHECK_THROWS_WITH_AS(di_from_json(json::object()), doctest::Contains("kothe"), SpaceFormatError);
  CHECK_THROWS_WITH_AS(di_from_json(json::parse(R"({"kothe":{"p":2},"fibers":[]})")),
                       doctest::Contains("mu"), SpaceFormatError);
  CHECK_THROWS_WITH_AS(
      di_from_json(json::parse(R"({"kothe":{"p":2,"mu":[1,0]},"fibers":[]})")),
      doctest::Contains("positive"), SpaceFormatError);
  CHECK_THROWS_WITH_AS(
      di_from_json(json::parse(
          R"({"kothe":{"p":2,"mu":[1,1]},"fibers":[{"family":"weighted_p","dim":2,"p":2}]})")),
      doctest::Contains("fiber"), SpaceFormatError);
  CHECK_THROWS_WITH_AS(
      di_from_json(json::parse(
          R"({"kothe":{"p":2,"mu":[1]},"fibers":[{"family":"banach","dim":2}]})")),
      doctest::Contains("family"), SpaceFormatError);
  CHECK_THROWS_AS(load_space("/nonexistent/nowhere.json"), SpaceFormatError);
}

TEST_CASE("space hash ignores formatting") {
  const DirectIntegralSpace y = fixture("ellipse");
  const std::string dense = to_json(y).dump();
  const std::string pretty = to_json(y).dump(4);
  CHECK(space_hash(di_from_json(nlohmann::json::parse(dense))) ==
        space_hash(di_from_json(nlohmann::json::parse(pretty))));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.space = "euclidean2";
  cfg.task = "modulus";
  CHECK_NOTHROW(cfg.validate());
  cfg.task = "frobnicate";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.task = "modulus";
  cfg.eps_step = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eps_step = 0.5;
  cfg.eps_start = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eps_start = 0.5;
  cfg.budget = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("modulus experiment emits a monotone curve and reruns byte-identically") {
  ExperimentConfig cfg;
  cfg.space = "euclidean2";
  cfg.task = "modulus";
  cfg.eps_start = 0.5;
  cfg.eps_stop = 1.5;
  cfg.eps_step = 0.5;
  cfg.budget = 10000;
  cfg.seed = 7;
  cfg.out = tmp_path("mod.csv");
  REQUIRE(run_experiment(cfg) == exit_ok);
  const std::string first = slurp(cfg.out);
  REQUIRE_FALSE(first.empty());

  // monotone upper column
  std::istringstream rows(first);
  std::string line;
  std::getline(rows, line);  // header
  double prev = -1.0;
  while (std::getline(rows, line)) {
    double eps = 0.0, upper = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &eps, &upper) == 2);
    CHECK(upper >= prev);
    prev = upper;
  }

  REQUIRE(run_experiment(cfg) == exit_ok);
  CHECK(slurp(cfg.out) == first);
  fs::remove(cfg.out);
}

TEST_CASE("check task flags known counterexample spaces and writes a witness") {
  ExperimentConfig cfg;
  cfg.space = "l1_2";
  cfg.task = "check";
  cfg.budget = 10000;
  cfg.seed = 3;
  cfg.out = tmp_path("check.csv");
  CHECK(run_experiment(cfg) == exit_property_failed);
  CHECK(fs::exists(cfg.out + ".witness.SC.json"));
  fs::remove(cfg.out + ".witness.SC.json");
  fs::remove(cfg.out);
}

TEST_CASE("result store audits determinism") {
  const std::string dir = tmp_path("store");
  fs::remove_all(dir);
  ResultStore store(dir);
  nlohmann::json echo;
  echo["task"] = "modulus";
  store.append("k1/modulus/1/10", echo, "payload-a");
  CHECK_NOTHROW(store.append("k1/modulus/1/10", echo, "payload-a"));
  CHECK_THROWS_WITH_AS(store.append("k1/modulus/1/10", echo, "payload-b"),
                       doctest::Contains("determinism"), std::runtime_error);
  // a different configuration under the same key is a new record, not a
  // violation
  nlohmann::json other = echo;
  other["eps_grid"] = {0.1, 0.2, 0.1};
  CHECK_NOTHROW(store.append("k1/modulus/1/10", other, "payload-c"));
  fs::remove_all(dir);
}

TEST_CASE("atomic writes leave no temp file") {
  const std::string path = tmp_path("atomic.txt");
  atomic_write(path, "hello\n");
  CHECK(slurp(path) == "hello\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
}
