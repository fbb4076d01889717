// phi4: spectral toolkit for the renormalized double-well Gibbs measure on the
// 2-torus. Subcommands compute tadpole constants, Carleman-Fredholm
// determinant tables, Gibbs samples (reweighting and Langevin), expansion
// coefficients, and the remainder / LLN / CLT experiments. Every run writes
// CSV outputs plus a JSON manifest that reproduces it.

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phi4/config.hpp"
#include "phi4/determinant.hpp"
#include "phi4/expansion.hpp"
#include "phi4/measure.hpp"
#include "phi4/observable.hpp"
#include "phi4/potential.hpp"
#include "phi4/rng.hpp"
#include "phi4/sampler.hpp"
#include "phi4/snapshot.hpp"
#include "phi4/spectral_field.hpp"
#include "phi4/wick.hpp"

namespace fs = std::filesystem;
using namespace phi4;

namespace {

constexpr int kExitConfig = 2;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

SpectralField default_test_function() {
  // f = 1 + 2 cos(x1)
  SpectralField f(1);
  f.set_coeff(0, 0, {1.0, 0.0});
  f.set_pair(1, 0, {1.0, 0.0});
  return f;
}

Observable observable_by_name(const std::string& name) {
  if (name == "one") return Observable::constant(1.0);
  if (name == "pairf") return Observable::pair(default_test_function());
  if (name == "pairf-sq") return Observable::pair(default_test_function()).pow(2);
  if (name == "wick2") return Observable::wick_integral(2);
  if (name == "wick4") return Observable::wick_integral(4);
  throw std::runtime_error("config: field 'observable' has unknown value '" + name +
                           "' (known: one, pairf, pairf-sq, wick2, wick4)");
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  long seed = 1;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "root seed")->each([&args](const std::string&) {
    args.seed_set = true;
  });
}

// file config overlaid with explicitly passed CLI values
KeyValueConfig resolve_config(const CommonArgs& args,
                              const std::set<std::string>& allowed,
                              const std::map<std::string, std::string>& cli_overrides) {
  KeyValueConfig cfg;
  if (!args.config_path.empty()) cfg = KeyValueConfig::from_file(args.config_path);
  const std::vector<std::string> unknown = cfg.unknown_keys(allowed);
  if (!unknown.empty())
    throw std::runtime_error("config: unknown key '" + unknown.front() + "'");
  for (const auto& [k, v] : cli_overrides) cfg.set(k, v);
  if (args.seed_set) cfg.set("seed", std::to_string(args.seed));
  return cfg;
}

RunManifest make_manifest(const std::string& command, const KeyValueConfig& cfg) {
  RunManifest m;
  m.command = command;
  for (const auto& [k, v] : cfg.items()) m.config[k] = v;
  return m;
}

void finish(RunManifest& manifest, const std::string& out_dir, double seconds) {
  manifest.wall_times_s["total"] = seconds;
  const std::string path = out_dir + "/manifest.json";
  manifest.write(path);
  std::cout << "wrote " << path << "\n";
}

std::vector<int> determinant_cutoffs(int nmax) {
  std::vector<int> ns;
  for (int n = 0; n <= std::min(nmax, 1); ++n) ns.push_back(n);
  for (int n = 2; n <= nmax; n *= 2) ns.push_back(n);
  if (ns.empty() || ns.back() != nmax) ns.push_back(nmax);
  return ns;
}

int run_constants(const CommonArgs& common, const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"nmax", "seed"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const long nmax = cfg.get_long("nmax", 16);
  if (nmax < 0) throw std::runtime_error("config: field 'nmax' must be >= 0");
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("constants", cfg);
  const std::string csv_path = common.out_dir + "/constants.csv";
  CsvWriter csv(csv_path, {"N", "c_N", "c_wN", "d_N"});
  for (long n = 0; n <= nmax; ++n) {
    const WickConstants wc = wick_constants(static_cast<int>(n));
    csv.row({static_cast<double>(n), wc.c_n, wc.c_wn, wc.d_n});
  }
  csv.close();
  manifest.outputs.push_back(csv_path);
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

int run_determinant(const CommonArgs& common, const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"nmax", "eps", "seed"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const long nmax = cfg.get_long("nmax", 2048);
  const double eps = cfg.get_double("eps", 0.0);
  if (nmax < 0) throw std::runtime_error("config: field 'nmax' must be >= 0");
  if (eps < 0.0) throw std::runtime_error("config: field 'eps' must be >= 0");
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("determinant", cfg);
  const std::string csv_path = common.out_dir + "/determinant.csv";
  CsvWriter csv(csv_path, {"N", "log_fredholm", "log_theta", "tail_bound"});
  for (int n : determinant_cutoffs(static_cast<int>(nmax))) {
    const DeterminantResult r = theta_re(n, eps);
    csv.row({static_cast<double>(n), r.log_fredholm, r.log_theta, r.tail_bound});
    std::cout << "N=" << n << " log_theta=" << format_g17(r.log_theta) << "\n";
  }
  csv.close();
  manifest.outputs.push_back(csv_path);
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

int run_sample(const CommonArgs& common, const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"sampler", "n",    "m",    "eps",  "dt",    "steps",
                                      "burnin",  "thin", "keep", "seed", "stream"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const std::string sampler = cfg.get_string("sampler", "langevin");
  const int cutoff = static_cast<int>(cfg.get_long("n", 8));
  const double eps = cfg.get_double("eps", 0.1);
  const long keep = cfg.get_long("keep", 64);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
  if (keep < 1) throw std::runtime_error("config: field 'keep' must be >= 1");
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("sample", cfg);
  manifest.seeds["root"] = std::to_string(seed);

  const std::string sidecar_path = common.out_dir + "/batch.csv";
  CsvWriter sidecar(sidecar_path, {"index", "file", "weight", "seed", "stream"});
  const int grid = aliasfree_grid(cutoff);

  if (sampler == "langevin") {
    ChainConfig chain;
    chain.cutoff = cutoff;
    chain.grid_size = static_cast<int>(cfg.get_long("m", 0));
    chain.eps = eps;
    chain.dt = cfg.get_double("dt", 0.01);
    chain.n_steps = cfg.get_long("steps", 50000);
    chain.n_burnin = cfg.get_long("burnin", 10000);
    chain.thin = cfg.get_long("thin", 50);
    chain.seed = seed;
    chain.stream = static_cast<std::uint64_t>(cfg.get_long("stream", 0));
    chain.validate();
    const long kept_total = chain.n_kept();
    const long stride = std::max<long>(1, kept_total / keep);
    long written = 0;
    langevin_run(chain, [&](long idx, const SpectralField& psi) {
      if (idx % stride != 0 || written >= keep) return;
      char name[32];
      std::snprintf(name, sizeof name, "field_%05ld.phi4", written);
      const std::string path = common.out_dir + "/" + name;
      write_snapshot(path, psi, grid);
      sidecar.row_mixed({std::to_string(written), name, format_g17(1.0),
                         std::to_string(chain.seed), std::to_string(chain.stream)});
      manifest.outputs.push_back(path);
      ++written;
    });
    std::cout << "kept " << written << " langevin states\n";
  } else if (sampler == "reweight") {
    RngStream rng(seed, 0);
    const double c_n = wick_constants(cutoff).c_n;
    for (long i = 0; i < keep; ++i) {
      SpectralField psi = sample_gaussian(ReferenceMeasure::mu(), cutoff, rng);
      FieldEval ev(psi, c_n);
      const double log_w =
          -((eps / 4.0) * ev.wick_mean(4) - ev.wick_mean(2) + 1.0 / (4.0 * eps));
      char name[32];
      std::snprintf(name, sizeof name, "field_%05ld.phi4", i);
      const std::string path = common.out_dir + "/" + name;
      write_snapshot(path, psi, grid);
      sidecar.row_mixed({std::to_string(i), name, format_g17(std::exp(log_w)),
                         std::to_string(seed), "0"});
      manifest.outputs.push_back(path);
    }
    std::cout << "kept " << keep << " reweighted draws\n";
  } else {
    throw std::runtime_error("config: field 'sampler' must be langevin or reweight");
  }
  sidecar.close();
  manifest.outputs.push_back(sidecar_path);
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

int run_coeffs(const CommonArgs& common, const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"observable", "k", "n", "n-mc", "seed", "limit-d"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const Observable f = observable_by_name(cfg.get_string("observable", "one"));
  const int order = static_cast<int>(cfg.get_long("k", 2));
  const int cutoff = static_cast<int>(cfg.get_long("n", 8));
  const long n_mc = cfg.get_long("n-mc", 100000);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
  const bool limit_d = cfg.get_bool("limit-d", false);
  if (order < 0) throw std::runtime_error("config: field 'k' must be >= 0");
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("coeffs", cfg);
  manifest.seeds["coefficients"] = std::to_string(task_seed(seed, "coefficients"));

  const double theta = theta_re(cutoff, 0.0).theta();
  CoefficientTable table = coefficients_a(f, order, cutoff, n_mc, theta, theta,
                                          task_seed(seed, "coefficients"), limit_d);
  const std::string csv_path = common.out_dir + "/coeffs.csv";
  CsvWriter csv(csv_path,
                {"j", "a_j", "stderr", "plus_mean", "plus_se", "minus_mean", "minus_se"});
  for (int j = 0; j <= order; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    csv.row({static_cast<double>(j), table.a[ju], table.a_se[ju], table.mean_plus[ju],
             table.se_plus[ju], table.mean_minus[ju], table.se_minus[ju]});
    std::cout << "a_" << j << " = " << format_g17(table.a[ju]) << " +- "
              << format_g17(table.a_se[ju]) << "\n";
  }
  csv.close();
  if (table.low_ess) std::cout << "warning: low effective sample size\n";
  manifest.outputs.push_back(csv_path);
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

int run_verify_expansion(const CommonArgs& common,
                         const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"observable", "k",    "n",   "eps-grid",
                                      "n-mc",       "n-rw", "toy", "seed"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const Observable f = observable_by_name(cfg.get_string("observable", "one"));
  const int order = static_cast<int>(cfg.get_long("k", 1));
  const int cutoff = static_cast<int>(cfg.get_long("n", 8));
  const std::vector<double> grid = cfg.get_double_list("eps-grid", {0.4, 0.2, 0.1, 0.05});
  const long n_mc = cfg.get_long("n-mc", 100000);
  const long n_rw = cfg.get_long("n-rw", 1000000);
  const bool toy = cfg.get_bool("toy", false);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("verify-expansion", cfg);

  ExpansionReport rep = verify_expansion(f, order, grid, cutoff, n_mc, n_rw, seed, toy);

  const std::string csv_path = common.out_dir + "/expansion.csv";
  CsvWriter csv(csv_path, {"eps", "I", "expansion", "remainder", "I_stderr"});
  for (const ExpansionRow& row : rep.rows)
    csv.row({row.eps, row.integral, row.expansion, row.remainder, row.integral_se});
  csv.close();
  manifest.outputs.push_back(csv_path);

  const std::string coeff_path = common.out_dir + "/coeffs.csv";
  CsvWriter ccsv(coeff_path,
                 {"j", "a_j", "stderr", "plus_mean", "plus_se", "minus_mean", "minus_se"});
  for (int j = 0; j <= order; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    ccsv.row({static_cast<double>(j), rep.coeffs.a[ju], rep.coeffs.a_se[ju],
              rep.coeffs.mean_plus[ju], rep.coeffs.se_plus[ju], rep.coeffs.mean_minus[ju],
              rep.coeffs.se_minus[ju]});
  }
  ccsv.close();
  manifest.outputs.push_back(coeff_path);

  std::cout << "slope(log remainder vs log eps) = " << format_g17(rep.slope) << "\n";
  if (rep.inconclusive)
    std::cout << "inconclusive: MC error exceeds the remainder at some grid point\n";
  manifest.config["slope"] = format_g17(rep.slope);
  manifest.config["inconclusive"] = rep.inconclusive ? "true" : "false";
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

int run_verify_lln_clt(const CommonArgs& common,
                       const std::map<std::string, std::string>& cli) {
  const std::set<std::string> allowed{"observable", "n",     "eps-grid",   "chains",
                                      "dt",         "steps", "burnin",     "thin",
                                      "delta",      "eta",   "delta-conc", "seed"};
  KeyValueConfig cfg = resolve_config(common, allowed, cli);
  const Observable f = observable_by_name(cfg.get_string("observable", "pairf-sq"));
  LlnCltConfig lc;
  lc.cutoff = static_cast<int>(cfg.get_long("n", 8));
  lc.eps_grid = cfg.get_double_list("eps-grid", {0.4, 0.2, 0.1, 0.05});
  lc.n_chains = static_cast<int>(cfg.get_long("chains", 20));
  lc.dt = cfg.get_double("dt", 0.01);
  lc.n_steps = cfg.get_long("steps", 60000);
  lc.n_burnin = cfg.get_long("burnin", 10000);
  lc.thin = cfg.get_long("thin", 10);
  lc.delta_classify = cfg.get_double("delta", 0.6);
  lc.delta_conc = cfg.get_double("delta-conc", 0.3);
  lc.eta = cfg.get_double("eta", 0.5);
  lc.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
  Timer timer;
  fs::create_directories(common.out_dir);
  RunManifest manifest = make_manifest("verify-lln-clt", cfg);

  LlnCltReport rep = lln_clt_experiment(f, lc);

  const std::string lln_path = common.out_dir + "/lln.csv";
  CsvWriter lln(lln_path, {"eps", "occ_plus", "occ_minus", "occ_se", "classified_frac",
                           "F_mean", "F_se", "conc_mass", "conc_se", "n_kept", "lln_target"});
  for (const LlnCltPerEps& row : rep.per_eps) {
    lln.row({row.eps, row.occ_plus, row.occ_minus, row.occ_se, row.classified_frac, row.f_mean,
             row.f_se, row.conc_mass, row.conc_se, static_cast<double>(row.n_kept),
             rep.lln_target});
    if (row.occupancy_flagged)
      std::cout << "warning: eps=" << row.eps << " has a well with fewer than 10 samples\n";
  }
  lln.close();
  manifest.outputs.push_back(lln_path);

  const std::string clt_path = common.out_dir + "/clt.csv";
  CsvWriter clt(clt_path, {"n1", "n2", "var_emp", "var_target", "n_samples"});
  for (const CltModeRow& row : rep.clt)
    clt.row({static_cast<double>(row.n1), static_cast<double>(row.n2), row.var_emp,
             row.var_target, static_cast<double>(row.n_samples)});
  clt.close();
  manifest.outputs.push_back(clt_path);

  std::cout << "b(w) = (" << rep.weights.b_plus << ", " << rep.weights.b_minus << ")"
            << ", LLN target = " << rep.lln_target << "\n";
  finish(manifest, common.out_dir, timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral double-well Gibbs measure toolkit on the 2-torus"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd = nullptr;
    CommonArgs common;
    std::map<std::string, std::string> overrides;
    int (*run)(const CommonArgs&, const std::map<std::string, std::string>&) = nullptr;
  };
  // stable addresses: the CLI callbacks capture pointers into this array
  static std::array<Sub, 6> subs;
  std::size_t sub_count = 0;

  auto add_sub = [&](const char* name, const char* desc,
                     int (*fn)(const CommonArgs&, const std::map<std::string, std::string>&),
                     const std::vector<std::string>& keys) {
    Sub& sub = subs[sub_count++];
    sub.cmd = app.add_subcommand(name, desc);
    sub.run = fn;
    add_common(sub.cmd, sub.common);
    Sub* sub_ptr = &sub;
    for (const std::string& key : keys) {
      // CLI flag --key feeds the config entry of the same name
      sub.cmd->add_option_function<std::string>(
          "--" + key, [sub_ptr, key](const std::string& v) { sub_ptr->overrides[key] = v; });
    }
  };

  add_sub("constants", "tadpole constants c_N, c_wN, d_N", run_constants, {"nmax"});
  add_sub("determinant", "Carleman-Fredholm determinant convergence table", run_determinant,
          {"nmax", "eps"});
  add_sub("sample", "draw Gibbs samples (langevin or reweight)", run_sample,
          {"sampler", "n", "m", "eps", "dt", "steps", "burnin", "thin", "keep", "stream"});
  add_sub("coeffs", "expansion coefficient table a_j", run_coeffs,
          {"observable", "k", "n", "n-mc", "limit-d"});
  add_sub("verify-expansion", "remainder order of the low-temperature expansion",
          run_verify_expansion, {"observable", "k", "n", "eps-grid", "n-mc", "n-rw", "toy"});
  add_sub("verify-lln-clt", "well occupancy, LLN limit, CLT mode variances",
          run_verify_lln_clt,
          {"observable", "n", "eps-grid", "chains", "dt", "steps", "burnin", "thin", "delta",
           "delta-conc", "eta"});

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < sub_count; ++i) {
    Sub& sub = subs[i];
    if (!sub.cmd->parsed()) continue;
    try {
      return sub.run(sub.common, sub.overrides);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      const std::string what = e.what();
      return what.rfind("config:", 0) == 0 ? kExitConfig : 1;
    }
  }
  return kExitConfig;
}
