#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "digeo/direct_integral.hpp"

namespace digeo {

inline constexpr const char* kArtifactVersion = "digeo-0.1.0";

// Thrown on malformed descriptors; the message names the offending field.
struct SpaceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const NormSpec& s);
nlohmann::json to_json(const KotheSpace& e);
nlohmann::json to_json(const DirectIntegralSpace& y);

NormSpec norm_spec_from_json(const nlohmann::json& j, const std::string& where);
KotheSpace kothe_from_json(const nlohmann::json& j, const std::string& where);
DirectIntegralSpace di_from_json(const nlohmann::json& j);

// path may also name a bundled fixture. The loaded space is fully validated.
DirectIntegralSpace load_space(const std::string& path_or_fixture);
void save_space(const DirectIntegralSpace& y, const std::string& path);

std::vector<std::string> fixture_names();
bool is_fixture(const std::string& name);
DirectIntegralSpace fixture(const std::string& name);

// FNV-1a digest of the canonical (key-sorted) JSON dump.
std::string space_hash(const DirectIntegralSpace& y);

// temp file + rename, so interrupted runs never leave partial outputs
void atomic_write(const std::string& path, const std::string& content);

struct ExperimentConfig {
  std::string space;  // descriptor path or fixture name
  std::string task;   // modulus | day-bound | check | dual | report
  double eps_start = 0.25, eps_stop = 1.75, eps_step = 0.25;
  std::uint64_t budget = 100000;
  std::uint64_t seed = 1;
  std::string format = "csv";  // csv | json
  std::string out;
  std::string result_dir;  // empty: DIGEO_RESULTS env var, else no store
  bool serial = false;

  void validate() const;
  std::vector<double> eps_grid() const;
};

enum ExitCode : int {
  exit_ok = 0,
  exit_bad_config = 2,
  exit_bad_space = 3,
  exit_property_failed = 4,
  exit_io_error = 5,
  exit_determinism_violation = 6,
};

// Append-only JSONL log keyed by (space hash, task, seed, budget). A rerun
// with an identical key must carry a byte-identical payload; anything else
// is a hard determinism error.
struct ResultStore {
  std::string path;

  explicit ResultStore(std::string dir);
  void append(const std::string& key, const nlohmann::json& config_echo, const std::string& payload);
};

// Dispatches to the module for the task, writes outputs atomically, prints
// a one-line summary per row, returns an ExitCode.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace digeo
