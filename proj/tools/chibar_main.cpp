// SPDX-License-Identifier: Apache-2.0
//
// chibar: chi-bar-squared mixture weights for boundary LR tests, with a
// Monte Carlo simulator of the Gaussian limit experiment for validation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chibar/covgen.hpp"
#include "chibar/errors.hpp"
#include "chibar/rng.hpp"
#include "chibar/simulate.hpp"
#include "chibar/weights.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace chibar;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CHIBAR_DEFAULT_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

SymMatrix read_cov_file(const std::string& path, int k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open covariance file: " + path);
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (vals.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
    throw std::runtime_error("covariance file must hold K x K reals");
  return SymMatrix::from_dense(static_cast<std::size_t>(k), vals);
}

// --cov forms: identity | equicorr:RHO | file:PATH | mild:SEED | strong:SEED
SymMatrix parse_cov(const std::string& spec, int k) {
  if (spec == "identity") return SymMatrix::identity(static_cast<std::size_t>(k));
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = (colon == std::string::npos) ? "" : spec.substr(colon + 1);
  if (head == "equicorr") return equicorr(k, std::stod(arg));
  if (head == "file") return read_cov_file(arg, k);
  if (head == "mild" || head == "strong") {
    CovGenSpec g;
    g.kind = CovKind::uniform_range;
    g.k = k;
    g.lo = (head == "mild") ? 0.0 : 0.5;
    g.hi = (head == "mild") ? 0.5 : 0.9;
    g.seed = arg.empty() ? 0 : std::strtoull(arg.c_str(), nullptr, 10);
    return gen_covariance(g);
  }
  throw CLI::ValidationError("--cov", "unknown covariance spec: " + spec);
}

struct MethodSpec {
  std::string name;      // orthogonal | exact | theorem1 | rank | mc
  double rank_tol = 0.1;
  std::size_t mc_draws = 100000;
};

MethodSpec parse_method(const std::string& spec) {
  MethodSpec m;
  const auto colon = spec.find(':');
  m.name = spec.substr(0, colon);
  const std::string arg = (colon == std::string::npos) ? "" : spec.substr(colon + 1);
  if (m.name == "rank" && !arg.empty()) m.rank_tol = std::stod(arg);
  if (m.name == "mc" && !arg.empty()) m.mc_draws = std::strtoull(arg.c_str(), nullptr, 10);
  if (m.name != "orthogonal" && m.name != "exact" && m.name != "theorem1" &&
      m.name != "rank" && m.name != "mc")
    throw CLI::ValidationError("--method", "unknown method: " + spec);
  return m;
}

std::vector<int> parse_indices(const std::string& csv, int k) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const int i = std::stoi(tok);
    if (i < 1 || i > k) throw CLI::ValidationError("index out of range: " + tok);
    out.push_back(i - 1);  // CLI is 1-based
  }
  return out;
}

WeightVector compute_weights(const MethodSpec& method, const SymMatrix& sigma,
                             const PartitionSpec& part, const QmcBudget& budget,
                             std::uint64_t seed) {
  const int k = part.k();
  const int m = part.m();
  if (method.name == "orthogonal") return weights_orthogonal_nuisance(k, m);
  if (method.name == "exact") {
    if (m != 0)
      throw CLI::ValidationError("--method",
                                 "exact face weights are the point-null case; needs --m 0");
    return intrinsic_volumes(build_cone(sigma), budget, seed);
  }
  if (method.name == "theorem1") {
    if (m != 1)
      throw CLI::ValidationError("--method", "theorem1 demotes one parameter; needs --m 1");
    return weights_theorem1_approx(sigma, budget, seed);
  }
  if (method.name == "rank")
    return rank_based_weights(sigma, part, method.rank_tol, budget, seed);
  // mc
  if (m != 0)
    throw CLI::ValidationError("--method", "mc weights estimate the point-null case; needs --m 0");
  return intrinsic_volumes_mc(build_cone(sigma), method.mc_draws, seed);
}

void write_weights_csv(const fs::path& path, const WeightVector& w) {
  std::ofstream out(path);
  out << "j,weight,method,raw_sum\n";
  for (std::size_t j = 0; j < w.size(); ++j)
    out << j << ',' << fmt_double(w.weights[j]) << ',' << to_string(w.method)
        << ',' << fmt_double(w.raw_sum) << '\n';
}

json report_to_json(const DiagnosticsReport& r) {
  json j;
  j["d_inf"] = r.d_inf;
  j["tail_ratio"] = r.tail_ratio;
  j["q50_emp"] = r.q50_emp;
  j["q50_mix"] = r.q50_mix;
  j["q95_emp"] = r.q95_emp;
  j["q95_mix"] = r.q95_mix;
  j["n_draws"] = r.n_draws;
  j["seed"] = r.seed;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

void write_ecdf_csv(const fs::path& path, const std::vector<double>& sorted_lrs,
                    const MixtureDist& dist) {
  std::ofstream out(path);
  out << "t,F_emp,F_mix\n";
  const double n = static_cast<double>(sorted_lrs.size());
  bool has_zero = false;
  std::size_t i = 0;
  while (i < sorted_lrs.size()) {
    std::size_t j = i;
    while (j < sorted_lrs.size() && sorted_lrs[j] == sorted_lrs[i]) ++j;
    if (sorted_lrs[i] == 0.0) has_zero = true;
    if (!has_zero && sorted_lrs[i] > 0.0 && i == 0)
      out << "0," << fmt_double(0.0) << ',' << fmt_double(mixture_cdf(dist, 0.0))
          << '\n';
    out << fmt_double(sorted_lrs[i]) << ',' << fmt_double(static_cast<double>(j) / n)
        << ',' << fmt_double(mixture_cdf(dist, sorted_lrs[i])) << '\n';
    i = j;
  }
}

struct CommonOpts {
  int k = 1;
  int m = 0;
  std::string poi_csv, nuis_csv;
  std::string cov = "identity";
  std::uint64_t seed = default_seed();
  bool seed_given = false;
  std::string out;
  QmcBudget budget;
};

PartitionSpec make_partition(const CommonOpts& o) {
  if (!o.poi_csv.empty() || !o.nuis_csv.empty()) {
    PartitionSpec p;
    p.poi = parse_indices(o.poi_csv, o.k);
    p.nuisance = parse_indices(o.nuis_csv, o.k);
    if (p.k() != o.k)
      throw CLI::ValidationError("--poi/--nuisance", "index lists must cover 1..K");
    return p;
  }
  if (o.m < 0 || o.m >= o.k)
    throw CLI::ValidationError("--m", "needs 0 <= m < k");
  return PartitionSpec::last_m(o.k, o.m);
}

json manifest_base(const std::string& command, const CommonOpts& o) {
  json j;
  j["command"] = command;
  json cfg;
  cfg["k"] = o.k;
  cfg["m"] = o.m;
  if (!o.poi_csv.empty()) cfg["poi"] = o.poi_csv;
  if (!o.nuis_csv.empty()) cfg["nuisance"] = o.nuis_csv;
  cfg["cov"] = o.cov;
  cfg["budget_log2"] = o.budget.log2_points;
  cfg["randomizations"] = o.budget.randomizations;
  j["config"] = cfg;
  j["seed"] = o.seed;
  j["tool_version"] = kVersion;
  j["timestamp"] = iso_timestamp();
  return j;
}

// ---------------------------------------------------------------- validate

struct Cell {
  std::string name;
  int k;
  int m;
  std::string cov;      // covariance spec string, resolved per cell
  std::string method;   // weights method spec
};

std::vector<Cell> suite_cells(const std::string& suite, std::uint64_t seed) {
  std::vector<Cell> cells;
  auto add = [&](int k, int m, const std::string& cov, const std::string& method) {
    Cell c;
    c.name = "K" + std::to_string(k) + "_m" + std::to_string(m);
    c.k = k;
    c.m = m;
    c.cov = cov;
    c.method = method;
    cells.push_back(c);
  };
  auto sub = [&](int i) { return std::to_string(derive_seed(seed, 0xce11u, i)); };

  if (suite == "lemma1") {
    for (int k : {4, 7, 10}) add(k, 1, "identity", "orthogonal");
  } else if (suite == "lemma2") {
    for (int k : {4, 7, 10}) add(k, 3, "identity", "orthogonal");
  } else if (suite == "thm1-mild") {
    int i = 0;
    for (int k : {4, 7, 10}) add(k, 1, "mild:" + sub(i++), "theorem1");
  } else if (suite == "thm1-strong") {
    int i = 0;
    for (int k : {4, 7, 10}) add(k, 1, "strong:" + sub(i++), "theorem1");
  } else if (suite == "thm1-equicorr-sweep") {
    for (int k = 2; k <= 10; ++k) add(k, 1, "equicorr:0.5", "theorem1");
  } else if (suite == "rank-mild") {
    int i = 0;
    for (int k : {4, 7, 10}) add(k, 3, "mild:" + sub(i++), "rank");
  } else if (suite == "rank-strong") {
    int i = 0;
    for (int k : {4, 7, 10}) add(k, 3, "strong:" + sub(i++), "rank");
  } else if (suite == "rank-equicorr-sweep") {
    for (int k = 4; k <= 10; ++k) add(k, 3, "equicorr:0.5", "rank");
  } else if (suite == "rank-m-sweep") {
    for (int m = 1; m <= 9; ++m) add(10, m, "equicorr:0.5", "rank");
  } else {
    throw CLI::ValidationError("suite", "unknown suite: " + suite);
  }
  return cells;
}

struct CellResult {
  DiagnosticsReport report;
  double delta = 0.0;  // anisotropy index of the cell covariance
};

CellResult run_cell(const Cell& cell, std::size_t n, std::uint64_t cell_seed,
                    const QmcBudget& budget) {
  const SymMatrix sigma = parse_cov(cell.cov, cell.k);
  const PartitionSpec part = PartitionSpec::last_m(cell.k, cell.m);
  const MethodSpec method = parse_method(cell.method);
  MixtureDist dist{compute_weights(method, sigma, part, budget,
                                   derive_seed(cell_seed, 0x0adeu))};
  ExperimentConfig cfg;
  cfg.sigma = sigma;
  cfg.partition = part;
  cfg.n_draws = n;
  cfg.seed = cell_seed;
  CellResult r;
  r.report = run_experiment(cfg, dist);
  r.delta = anisotropy_index(sigma);
  return r;
}

int cmd_validate(const std::string& suite, const std::string& out_dir,
                 std::size_t n, std::uint64_t seed, int jobs,
                 const QmcBudget& budget) {
  const std::vector<Cell> cells = suite_cells(suite, seed);
  std::vector<CellResult> results(cells.size());

  auto worker = [&](std::size_t lo, std::size_t stride) {
    for (std::size_t i = lo; i < cells.size(); i += stride)
      results[i] = run_cell(cells[i], n, derive_seed(seed, 0x5eedu, i), budget);
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back(worker, static_cast<std::size_t>(t),
                        static_cast<std::size_t>(jobs));
    for (auto& t : pool) t.join();
  }

  const fs::path root(out_dir);
  fs::create_directories(root);
  std::ofstream sweep(root / "sweep.csv");
  sweep << "cell,k,m,d_inf,tail_ratio,q50_emp,q50_mix,q95_emp,q95_mix,delta\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    fs::create_directories(root / c.name);
    write_json(root / c.name / "report.json", report_to_json(r.report));
    sweep << c.name << ',' << c.k << ',' << c.m << ',' << fmt_double(r.report.d_inf)
          << ',' << fmt_double(r.report.tail_ratio) << ','
          << fmt_double(r.report.q50_emp) << ',' << fmt_double(r.report.q50_mix)
          << ',' << fmt_double(r.report.q95_emp) << ','
          << fmt_double(r.report.q95_mix) << ',' << fmt_double(r.delta) << '\n';
  }
  sweep.close();

  json man;
  man["command"] = "validate";
  json cfg;
  cfg["suite"] = suite;
  cfg["n"] = n;
  cfg["jobs"] = jobs;
  cfg["budget_log2"] = budget.log2_points;
  cfg["randomizations"] = budget.randomizations;
  json jcells = json::array();
  for (const auto& c : cells) {
    json jc;
    jc["name"] = c.name;
    jc["k"] = c.k;
    jc["m"] = c.m;
    jc["cov"] = c.cov;
    jc["method"] = c.method;
    jcells.push_back(jc);
  }
  cfg["cells"] = jcells;
  man["config"] = cfg;
  man["seed"] = seed;
  man["tool_version"] = kVersion;
  man["timestamp"] = iso_timestamp();
  write_json(root / "manifest.json", man);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chi-bar-squared mixture weights and LAN-limit simulation"};
  app.require_subcommand(1);

  CommonOpts wo, so;
  std::string w_method = "orthogonal", s_method = "orthogonal";
  std::size_t sim_n = 100000;
  int streams = 1;

  auto add_common = [](CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--k", o.k, "total number of boundary parameters")->required();
    cmd->add_option("--m", o.m, "number of boundary nuisance parameters (last m indices)");
    cmd->add_option("--poi", o.poi_csv, "comma-separated 1-based PoI indices");
    cmd->add_option("--nuisance", o.nuis_csv, "comma-separated 1-based nuisance indices");
    cmd->add_option("--cov", o.cov,
                    "identity | equicorr:RHO | file:PATH | mild:SEED | strong:SEED");
    cmd->add_option("--seed", o.seed, "root RNG seed (default from CHIBAR_DEFAULT_SEED or 0)");
    cmd->add_option("--budget-log2", o.budget.log2_points, "log2 QMC points per randomization");
    cmd->add_option("--reps", o.budget.randomizations, "QMC randomizations");
    cmd->add_option("--out", o.out, "output directory")->required();
  };

  CLI::App* weights_cmd = app.add_subcommand("weights", "compute mixture weights");
  add_common(weights_cmd, wo);
  weights_cmd->add_option("--method", w_method,
                          "orthogonal | exact | theorem1 | rank[:TOL] | mc[:N]");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "simulate the LRS and compare to a mixture");
  add_common(sim_cmd, so);
  sim_cmd->add_option("--n", sim_n, "Monte Carlo repetitions");
  sim_cmd->add_option("--weights-method", s_method,
                      "orthogonal | exact | theorem1 | rank[:TOL] | mc[:N]");
  sim_cmd->add_option("--streams", streams, "RNG substreams (and worker threads)");

  std::string suite, v_out;
  std::size_t v_n = 100000;
  std::uint64_t v_seed = default_seed();
  int v_jobs = 1;
  QmcBudget v_budget;
  CLI::App* val_cmd = app.add_subcommand("validate", "run a named validation suite");
  val_cmd->add_option("suite", suite,
                      "lemma1 | lemma2 | thm1-mild | thm1-strong | thm1-equicorr-sweep |"
                      " rank-mild | rank-strong | rank-equicorr-sweep | rank-m-sweep")
      ->required();
  val_cmd->add_option("--out", v_out, "output directory")->required();
  val_cmd->add_option("--n", v_n, "Monte Carlo repetitions per cell");
  val_cmd->add_option("--seed", v_seed, "root RNG seed");
  val_cmd->add_option("--jobs", v_jobs, "parallel cells (per-cell seeds keep results identical)");
  val_cmd->add_option("--budget-log2", v_budget.log2_points, "log2 QMC points per randomization");
  val_cmd->add_option("--reps", v_budget.randomizations, "QMC randomizations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (weights_cmd->parsed()) {
      const PartitionSpec part = make_partition(wo);
      const SymMatrix sigma = parse_cov(wo.cov, wo.k);
      const MethodSpec method = parse_method(w_method);
      const WeightVector w = compute_weights(method, sigma, part, wo.budget, wo.seed);
      if (std::fabs(w.raw_sum - 1.0) > 0.01)
        std::cerr << "warning: raw face-mass sum " << w.raw_sum
                  << " deviates from 1 by more than 0.01\n";
      fs::create_directories(wo.out);
      write_weights_csv(fs::path(wo.out) / "weights.csv", w);
      json man = manifest_base("weights", wo);
      man["config"]["method"] = w_method;
      write_json(fs::path(wo.out) / "manifest.json", man);
      return 0;
    }
    if (sim_cmd->parsed()) {
      const PartitionSpec part = make_partition(so);
      const SymMatrix sigma = parse_cov(so.cov, so.k);
      const MethodSpec method = parse_method(s_method);
      MixtureDist dist{compute_weights(method, sigma, part, so.budget,
                                       derive_seed(so.seed, 0x0adeu))};
      ExperimentConfig cfg;
      cfg.sigma = sigma;
      cfg.partition = part;
      cfg.n_draws = sim_n;
      cfg.seed = so.seed;
      cfg.streams = streams;
      const std::vector<double> lrs = simulate_lrs(cfg);
      const DiagnosticsReport rep = diagnostics_from_sample(lrs, dist, so.seed);
      fs::create_directories(so.out);
      write_json(fs::path(so.out) / "report.json", report_to_json(rep));
      write_ecdf_csv(fs::path(so.out) / "ecdf.csv", lrs, dist);
      json man = manifest_base("simulate", so);
      man["config"]["weights_method"] = s_method;
      man["config"]["n"] = sim_n;
      man["config"]["streams"] = streams;
      write_json(fs::path(so.out) / "manifest.json", man);
      return 0;
    }
    if (val_cmd->parsed()) return cmd_validate(suite, v_out, v_n, v_seed, v_jobs, v_budget);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
