#include "digeo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "digeo/config.hpp"
#include "digeo/convexity.hpp"
#include "digeo/day_bound.hpp"
#include "digeo/modulus.hpp"
#include "digeo/rng.hpp"

namespace digeo {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    os << v[i];
  }
  return os.str();
}

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw SpaceFormatError(where + " must be an object");
  auto it = j.find(name);
  if (it == j.end()) throw SpaceFormatError(where + "." + name + " missing");
  return *it;
}

double number_field(const json& j, const char* name, const std::string& where) {
  const json& f = field(j, name, where);
  if (!f.is_number()) throw SpaceFormatError(where + "." + name + " must be a number");
  return f.get<double>();
}

std::vector<double> vector_field(const json& j, const char* name, const std::string& where) {
  const json& f = field(j, name, where);
  if (!f.is_array()) throw SpaceFormatError(where + "." + name + " must be an array");
  std::vector<double> out;
  out.reserve(f.size());
  for (const auto& v : f) {
    if (!v.is_number()) throw SpaceFormatError(where + "." + name + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> matrix_field(const json& j, const char* name, const std::string& where) {
  const json& f = field(j, name, where);
  if (!f.is_array()) throw SpaceFormatError(where + "." + name + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < f.size(); ++r) {
    if (!f[r].is_array()) throw SpaceFormatError(where + "." + name + " rows must be arrays");
    std::vector<double> row;
    for (const auto& v : f[r]) {
      if (!v.is_number()) throw SpaceFormatError(where + "." + name + " must contain only numbers");
      row.push_back(v.get<double>());
    }
    out.push_back(std::move(row));
  }
  return out;
}

// p is a number in [1, inf) or the string "inf"
void parse_exponent(const json& j, const std::string& where, double& p, bool& p_inf) {
  const json& f = field(j, "p", where);
  if (f.is_string()) {
    if (f.get<std::string>() != "inf") throw SpaceFormatError(where + ".p string form must be \"inf\"");
    p_inf = true;
    p = 0.0;
    return;
  }
  if (!f.is_number()) throw SpaceFormatError(where + ".p must be a number or \"inf\"");
  p = f.get<double>();
  p_inf = false;
}

}  // namespace

json to_json(const NormSpec& s) {
  json j;
  j["family"] = s.family_name();
  j["dim"] = s.dim;
  switch (s.family) {
    case NormFamily::weighted_p:
      if (s.p_inf)
        j["p"] = "inf";
      else
        j["p"] = s.p;
      j["weights"] = s.weights;
      break;
    case NormFamily::polyhedral:
      j["functionals"] = s.functionals;
      break;
    case NormFamily::ellipsoid:
      j["form"] = s.form;
      break;
  }
  return j;
}

NormSpec norm_spec_from_json(const json& j, const std::string& where) {
  const json& fam = field(j, "family", where);
  if (!fam.is_string()) throw SpaceFormatError(where + ".family must be a string");
  const std::string name = fam.get<std::string>();
  const int dim = static_cast<int>(number_field(j, "dim", where));
  try {
    if (name == "weighted_p") {
      double p = 2.0;
      bool p_inf = false;
      parse_exponent(j, where, p, p_inf);
      std::vector<double> w = j.contains("weights") ? vector_field(j, "weights", where) : std::vector<double>{};
      return p_inf ? NormSpec::make_inf(dim, std::move(w)) : NormSpec::make_weighted_p(p, dim, std::move(w));
    }
    if (name == "polyhedral") {
      NormSpec s = NormSpec::make_polyhedral(matrix_field(j, "functionals", where));
      if (s.dim != dim) throw SpaceFormatError(where + ".dim inconsistent with functionals");
      return s;
    }
    if (name == "ellipsoid") {
      NormSpec s = NormSpec::make_ellipsoid(matrix_field(j, "form", where));
      if (s.dim != dim) throw SpaceFormatError(where + ".dim inconsistent with form");
      return s;
    }
  } catch (const std::invalid_argument& e) {
    throw SpaceFormatError(where + ": " + e.what());
  }
  throw SpaceFormatError(where + ".family unknown: " + name);
}

json to_json(const KotheSpace& e) {
  json j;
  if (e.p_inf)
    j["p"] = "inf";
  else
    j["p"] = e.p;
  j["mu"] = e.measure.weights;
  if (!e.extra_weights.empty()) j["extra_weights"] = e.extra_weights;
  return j;
}

KotheSpace kothe_from_json(const json& j, const std::string& where) {
  double p = 2.0;
  bool p_inf = false;
  parse_exponent(j, where, p, p_inf);
  std::vector<double> mu = vector_field(j, "mu", where);
  std::vector<double> extra =
      j.contains("extra_weights") ? vector_field(j, "extra_weights", where) : std::vector<double>{};
  try {
    return p_inf ? KotheSpace::linf(std::move(mu), std::move(extra))
                 : KotheSpace::lp(p, std::move(mu), std::move(extra));
  } catch (const std::invalid_argument& e) {
    throw SpaceFormatError(where + ": " + e.what());
  }
}

json to_json(const DirectIntegralSpace& y) {
  json j;
  j["kothe"] = to_json(y.kothe);
  json fibers = json::array();
  for (const auto& f : y.fibers) fibers.push_back(to_json(f));
  j["fibers"] = fibers;
  return j;
}

DirectIntegralSpace di_from_json(const json& j) {
  DirectIntegralSpace y;
  y.kothe = kothe_from_json(field(j, "kothe", "space"), "space.kothe");
  const json& fibers = field(j, "fibers", "space");
  if (!fibers.is_array()) throw SpaceFormatError("space.fibers must be an array");
  for (std::size_t i = 0; i < fibers.size(); ++i)
    y.fibers.push_back(norm_spec_from_json(fibers[i], "space.fibers[" + std::to_string(i) + "]"));
  try {
    y.validate();
  } catch (const std::invalid_argument& e) {
    throw SpaceFormatError(std::string("space: ") + e.what());
  }
  return y;
}

namespace {

DirectIntegralSpace scalar_lattice(KotheSpace e) {
  std::vector<NormSpec> fibers(static_cast<std::size_t>(e.n_atoms()), NormSpec::make_euclidean(1));
  return DirectIntegralSpace{std::move(e), std::move(fibers)};
}

DirectIntegralSpace single_fiber(NormSpec fiber) {
  return DirectIntegralSpace{KotheSpace::lp(2.0, {1.0}), {std::move(fiber)}};
}

DirectIntegralSpace build_fixture(const std::string& name) {
  if (name == "euclidean2") return single_fiber(NormSpec::make_euclidean(2));
  if (name == "l1_2") return scalar_lattice(KotheSpace::lp(1.0, {1.0, 1.0}));
  if (name == "linf_2") return scalar_lattice(KotheSpace::linf({1.0, 1.0}));
  if (name == "poly_hex") {
    const double s = std::sqrt(3.0) / 2.0;
    return single_fiber(NormSpec::make_polyhedral({{1.0, 0.0}, {0.5, s}, {-0.5, s}}));
  }
  if (name == "ellipse") return single_fiber(NormSpec::make_ellipsoid({{2.0, 0.5}, {0.5, 1.0}}));
  if (name == "prop21_a")
    return DirectIntegralSpace{KotheSpace::lp(2.0, {1.0, 2.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_euclidean(3)}};
  if (name == "prop21_b")
    return DirectIntegralSpace{
        KotheSpace::lp(1.5, {1.0, 0.5, 2.0}),
        {NormSpec::make_weighted_p(4.0, 2), NormSpec::make_euclidean(3),
         NormSpec::make_ellipsoid({{1.5, -0.25}, {-0.25, 1.0}})}};
  if (name == "bad_fiber_linf")
    return DirectIntegralSpace{KotheSpace::lp(2.0, {1.0, 1.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_inf(2)}};
  if (name == "bad_e_l1")
    return DirectIntegralSpace{KotheSpace::lp(1.0, {1.0, 2.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_euclidean(2)}};
  if (name == "day_p15_a")
    return DirectIntegralSpace{KotheSpace::lp(1.5, {1.0, 2.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_euclidean(3)}};
  if (name == "day_p15_b")
    return DirectIntegralSpace{KotheSpace::lp(1.5, {0.5, 1.0, 1.5}),
                               {NormSpec::make_weighted_p(4.0, 2), NormSpec::make_weighted_p(4.0, 2),
                                NormSpec::make_weighted_p(4.0, 3)}};
  if (name == "day_p2_a")
    return DirectIntegralSpace{KotheSpace::lp(2.0, {1.0, 3.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_weighted_p(4.0, 3)}};
  if (name == "day_p2_b")
    return DirectIntegralSpace{KotheSpace::lp(2.0, {0.25, 0.5, 1.0, 2.0}),
                               {NormSpec::make_euclidean(2), NormSpec::make_euclidean(2),
                                NormSpec::make_euclidean(2), NormSpec::make_euclidean(2)}};
  if (name == "day_p3_a")
    return DirectIntegralSpace{KotheSpace::lp(3.0, {1.0, 2.0}),
                               {NormSpec::make_weighted_p(4.0, 2), NormSpec::make_euclidean(2)}};
  if (name == "day_p3_b")
    return DirectIntegralSpace{KotheSpace::lp(3.0, {1.0, 0.5, 2.0}),
                               {NormSpec::make_euclidean(3), NormSpec::make_weighted_p(4.0, 2),
                                NormSpec::make_euclidean(2)}};
  throw SpaceFormatError("unknown fixture: " + name);
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"euclidean2", "l1_2",     "linf_2",   "poly_hex", "ellipse",  "prop21_a", "prop21_b",
          "bad_fiber_linf", "bad_e_l1", "day_p15_a", "day_p15_b", "day_p2_a", "day_p2_b",
          "day_p3_a",       "day_p3_b"};
}

bool is_fixture(const std::string& name) {
  const auto names = fixture_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

DirectIntegralSpace fixture(const std::string& name) {
  DirectIntegralSpace y = build_fixture(name);
  y.validate();
  return y;
}

DirectIntegralSpace load_space(const std::string& path_or_fixture) {
  if (is_fixture(path_or_fixture)) return fixture(path_or_fixture);
  std::ifstream in(path_or_fixture);
  if (!in) throw SpaceFormatError("cannot open space descriptor: " + path_or_fixture);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SpaceFormatError("invalid JSON in " + path_or_fixture + ": " + e.what());
  }
  return di_from_json(j);
}

void save_space(const DirectIntegralSpace& y, const std::string& path) {
  atomic_write(path, to_json(y).dump(2) + "\n");
}

std::string space_hash(const DirectIntegralSpace& y) {
  const std::string canonical = to_json(y).dump();  // object keys are sorted
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> tasks{"modulus", "day-bound", "check", "dual", "report"};
  if (std::find(tasks.begin(), tasks.end(), task) == tasks.end())
    throw std::invalid_argument("config.task must be one of modulus, day-bound, check, dual, report");
  if (space.empty()) throw std::invalid_argument("config.space is required");
  if (!(eps_step > 0.0)) throw std::invalid_argument("config.eps_grid step must be positive");
  if (!(eps_start > 0.0) || eps_stop > 2.0 || eps_start > eps_stop)
    throw std::invalid_argument("config.eps_grid must lie within (0, 2]");
  if (budget < 1) throw std::invalid_argument("config.budget must be >= 1");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("config.format must be csv or json");
}

std::vector<double> ExperimentConfig::eps_grid() const {
  std::vector<double> grid;
  for (double e = eps_start; e <= eps_stop + 1e-12; e += eps_step) grid.push_back(std::min(e, 2.0));
  return grid;
}

ResultStore::ResultStore(std::string dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  path = (fs::path(dir) / "results.jsonl").string();
}

void ResultStore::append(const std::string& key, const json& config_echo, const std::string& payload) {
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || rec.value("key", "") != key) continue;
      // the determinism audit compares payloads of records with the same key
      // and the same full configuration
      if (rec.value("config", json()) == config_echo && rec.value("payload", "") != payload)
        throw std::runtime_error("determinism violation: key " + key +
                                 " rerun produced a different payload");
    }
  }
  json rec;
  rec["key"] = key;
  rec["version"] = kArtifactVersion;
  rec["config"] = config_echo;
  rec["payload"] = payload;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path);
  out << rec.dump() << "\n";
}

namespace {

// Single-atom spaces with unit indicator norm reduce to their fiber, which
// unlocks the certified bounds.
SpaceRef pick_ref(const DirectIntegralSpace& y) {
  if (y.n_atoms() == 1 && std::fabs(indicator_norm(y.kothe, 0) - 1.0) < 1e-15)
    return SpaceRef(y.fibers[0]);
  return SpaceRef(y);
}

std::string default_out(const ExperimentConfig& cfg) {
  return "digeo_" + cfg.task + (cfg.format == "csv" && cfg.task != "report" ? ".csv" : ".json");
}

struct Row {
  std::vector<std::pair<std::string, std::string>> cols;
  void add(const std::string& k, const std::string& v) { cols.push_back({k, v}); }
};

std::string render(const std::vector<Row>& rows, const std::string& format) {
  if (rows.empty()) return format == "csv" ? std::string() : std::string("[]\n");
  if (format == "csv") {
    std::ostringstream os;
    for (std::size_t c = 0; c < rows[0].cols.size(); ++c) {
      if (c) os << ',';
      os << rows[0].cols[c].first;
    }
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.cols.size(); ++c) {
        if (c) os << ',';
        const std::string& v = r.cols[c].second;
        os << (v.find(',') == std::string::npos ? v : '"' + v + '"');
      }
      os << '\n';
    }
    return os.str();
  }
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    for (const auto& [k, v] : r.cols) o[k] = v;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::vector<Row> run_modulus(const DirectIntegralSpace& y, const ExperimentConfig& cfg) {
  const SpaceRef ref = pick_ref(y);
  const ModulusCurve curve =
      modulus_curve(ref, cfg.eps_grid(), cfg.budget, cfg.seed, /*want_certified=*/true);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    Row r;
    r.add("eps", fmt(curve.eps[i]));
    r.add("upper", fmt(curve.upper[i]));
    r.add("certified_lower", curve.has_certified() ? fmt(curve.certified[i]) : "");
    r.add("witness_x", fmt(curve.witnesses[i].first));
    r.add("witness_y", fmt(curve.witnesses[i].second));
    r.add("budget", std::to_string(cfg.budget));
    r.add("seed", std::to_string(cfg.seed));
    rows.push_back(std::move(r));
    std::cout << "eps " << curve.eps[i] << ": upper " << curve.upper[i]
              << (curve.has_certified() ? " certified " + std::to_string(curve.certified[i]) : "")
              << "\n";
  }
  return rows;
}

std::vector<Row> run_day_bound(const DirectIntegralSpace& y, const ExperimentConfig& cfg) {
  std::vector<Row> rows;
  const auto grid = cfg.eps_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double eps = grid[i];
    if (!(eps < 2.0)) continue;
    const DayPipelineResult pipe = day_bound_pipeline(y, eps, cfg.budget, derive_seed(cfg.seed, i));
    const PropertyVerdict verdict =
        verify_day_bound(y, pipe.report, cfg.budget, derive_seed(cfg.seed, 0xD00 + i));
    const double check_sep = std::min(2.0, 2.0 * eps * 1.01);
    const ModulusPoint measured = global_modulus_estimate(SpaceRef(y), check_sep, cfg.budget,
                                                          derive_seed(cfg.seed, 0xE00 + i));
    Row r;
    r.add("eps", fmt(eps));
    r.add("eta", fmt(pipe.report.eta));
    r.add("alpha", fmt(pipe.report.alpha));
    r.add("omega", fmt(pipe.report.omega));
    r.add("tau", fmt(pipe.report.tau));
    r.add("measured_delta_upper", fmt(measured.upper));
    r.add("verdict", to_string(verdict.status));
    rows.push_back(std::move(r));
    std::cout << "eps " << eps << ": tau " << pipe.report.tau << ", measured upper " << measured.upper
              << ", verdict " << to_string(verdict.status) << "\n";
  }
  return rows;
}

std::string write_witness(const ExperimentConfig& cfg, const std::string& out,
                          const PropertyVerdict& v) {
  if (v.witness.empty()) return "";
  json w;
  w["property"] = to_string(v.tag);
  w["note"] = v.note;
  w["margin"] = v.margin;
  json vecs = json::array();
  for (const auto& vec : v.witness) vecs.push_back(vec);
  w["vectors"] = vecs;
  w["budget"] = v.budget;
  w["seed"] = v.seed;
  const std::string path = out + ".witness." + to_string(v.tag) + ".json";
  atomic_write(path, w.dump(2) + "\n");
  (void)cfg;
  return path;
}

std::vector<PropertyVerdict> run_check_suites(const DirectIntegralSpace& y,
                                              const ExperimentConfig& cfg) {
  std::vector<PropertyVerdict> verdicts;
  verdicts.push_back(check_lattice_monotone(y.kothe, 2000, derive_seed(cfg.seed, 1)));
  verdicts.push_back(sc_search(pick_ref(y), cfg.budget, derive_seed(cfg.seed, 2)));

  Rng rng(derive_seed(cfg.seed, 3));
  const DIVector f = random_unit_vector(y, rng);
  std::uint64_t tag_slot = 4;
  for (PropertyTag tag :
       {PropertyTag::HUDZIK_EXTREME, PropertyTag::HUDZIK_STRONG_EXTREME, PropertyTag::HUDZIK_LUR})
    verdicts.push_back(hudzik_point_check(y, f, tag, cfg.budget, derive_seed(cfg.seed, tag_slot++)));

  {
    PropertyVerdict dual;
    dual.tag = PropertyTag::DUALITY_ISOMETRY;
    dual.status = VerdictStatus::pass;
    dual.margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 3; ++t) {
      Rng frng(derive_seed(cfg.seed, 0xF0 + t));
      DIFunctional bigF;
      for (const auto& fiber : y.fibers) bigF.blocks.push_back(frng.gaussian_vector(fiber.dim));
      PropertyVerdict v =
          verify_duality_isometry(y, bigF, cfg.budget, derive_seed(cfg.seed, 0x1F0 + t));
      if (v.margin < dual.margin || v.status == VerdictStatus::fail) {
        const bool overwrite = v.status == VerdictStatus::fail || dual.status != VerdictStatus::fail;
        if (overwrite) dual = v;
      }
    }
    verdicts.push_back(dual);
  }

  if (!y.kothe.p_inf && y.kothe.p > 1.0) {
    DIVector unit = f;
    const double n = di_norm(y, unit);
    for (auto& b : unit.blocks) b = scale(b, 1.0 / n);
    verdicts.push_back(strong_convexity_check(y, unit, cfg.budget, derive_seed(cfg.seed, 7)));
  } else {
    PropertyVerdict skip;
    skip.tag = PropertyTag::STRONG;
    skip.status = VerdictStatus::skipped;
    skip.note = "norming-functional construction needs E with 1 < p < inf";
    verdicts.push_back(skip);
  }
  return verdicts;
}

std::vector<Row> run_check(const DirectIntegralSpace& y, const ExperimentConfig& cfg,
                           const std::string& out, bool& any_failed) {
  const std::string id = space_hash(y);
  std::vector<Row> rows;
  for (const PropertyVerdict& v : run_check_suites(y, cfg)) {
    std::string witness_ref;
    if (v.status == VerdictStatus::fail) {
      any_failed = true;
      witness_ref = write_witness(cfg, out, v);
    }
    Row r;
    r.add("property", to_string(v.tag));
    r.add("space_id", id);
    r.add("status", to_string(v.status));
    r.add("margin", fmt(v.margin));
    r.add("witness_ref", witness_ref);
    rows.push_back(std::move(r));
    std::cout << to_string(v.tag) << ": " << to_string(v.status) << " (margin " << v.margin << ")"
              << (v.note.empty() ? "" : " - " + v.note) << "\n";
  }
  return rows;
}

std::vector<Row> run_dual(const DirectIntegralSpace& y, const ExperimentConfig& cfg) {
  std::vector<Row> rows;
  const int samples = 20;
  for (int t = 0; t < samples; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    const DIVector f = random_unit_vector(y, rng);
    DIFunctional bigF;
    for (const auto& fiber : y.fibers) bigF.blocks.push_back(rng.gaussian_vector(fiber.dim));
    const double fn = di_norm(y, f);
    const double dn = di_dual_norm(y, bigF);
    const double pairing = di_duality_pairing(y, bigF, f);
    Row r;
    r.add("sample", std::to_string(t));
    r.add("norm", fmt(fn));
    r.add("dual_norm", fmt(dn));
    r.add("pairing", fmt(pairing));
    r.add("holder_margin", fmt(dn * fn - pairing));
    rows.push_back(std::move(r));
    std::cout << "sample " << t << ": dual norm " << dn << ", pairing " << pairing << "\n";
  }
  return rows;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_bad_config;
  }

  DirectIntegralSpace y;
  try {
    y = load_space(cfg.space);
  } catch (const SpaceFormatError& e) {
    std::cerr << "space error: " << e.what() << "\n";
    return exit_bad_space;
  }

  set_parallel(!cfg.serial);
  const std::string out = cfg.out.empty() ? default_out(cfg) : cfg.out;
  bool any_failed = false;
  std::string payload;
  try {
    if (cfg.task == "modulus") {
      payload = render(run_modulus(y, cfg), cfg.format);
    } else if (cfg.task == "day-bound") {
      payload = render(run_day_bound(y, cfg), cfg.format);
    } else if (cfg.task == "check") {
      payload = render(run_check(y, cfg, out, any_failed), cfg.format);
    } else if (cfg.task == "dual") {
      payload = render(run_dual(y, cfg), cfg.format);
    } else {  // report: one JSON document combining the suites and the curve
      json rep;
      rep["version"] = kArtifactVersion;
      rep["space_id"] = space_hash(y);
      rep["space"] = to_json(y);
      json checks = json::array();
      for (const PropertyVerdict& v : run_check_suites(y, cfg)) {
        if (v.status == VerdictStatus::fail) any_failed = true;
        json c;
        c["property"] = to_string(v.tag);
        c["status"] = to_string(v.status);
        c["margin"] = v.margin;
        c["note"] = v.note;
        checks.push_back(c);
        std::cout << to_string(v.tag) << ": " << to_string(v.status) << "\n";
      }
      rep["checks"] = checks;
      const ModulusCurve curve =
          modulus_curve(pick_ref(y), cfg.eps_grid(), cfg.budget, cfg.seed, true);
      json mod;
      mod["eps"] = curve.eps;
      mod["upper"] = curve.upper;
      if (curve.has_certified()) mod["certified"] = curve.certified;
      rep["modulus"] = mod;
      payload = rep.dump(2) + "\n";
    }
    atomic_write(out, payload);
    std::cout << "wrote " << out << "\n";

    std::string dir = cfg.result_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("DIGEO_RESULTS")) dir = env;
    }
    if (!dir.empty()) {
      ResultStore store(dir);
      json echo;
      echo["space"] = cfg.space;
      echo["task"] = cfg.task;
      echo["eps_grid"] = {cfg.eps_start, cfg.eps_stop, cfg.eps_step};
      echo["budget"] = cfg.budget;
      echo["seed"] = cfg.seed;
      echo["format"] = cfg.format;
      const std::string key = space_hash(y) + "/" + cfg.task + "/" + std::to_string(cfg.seed) + "/" +
                              std::to_string(cfg.budget);
      store.append(key, echo, payload);
    }
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).rfind("determinism violation", 0) == 0) {
      std::cerr << e.what() << "\n";
      return exit_determinism_violation;
    }
    std::cerr << "io error: " << e.what() << "\n";
    return exit_io_error;
  }
  return any_failed ? exit_property_failed : exit_ok;
}

}  // namespace digeo
