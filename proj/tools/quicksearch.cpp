// quicksearch: schedules, simulations, region grids, extreme-value checks,
// gain tables and baseline comparisons from the command line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quicksearch/quicksearch.hpp"

namespace qs = quicksearch;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

enum Exit { kOk = 0, kUsage = 2, kInfeasible = 3, kDomain = 4 };

// Every option that can also come from a JSON config file.
struct Overrides {
  std::optional<std::string> test;
  std::optional<std::int64_t> n;
  std::optional<double> epsilon;
  std::optional<double> eps_exponent;
  std::optional<std::int64_t> t_target;
  std::optional<double> budget_s;
  std::optional<int> max_refines;
  std::optional<double> alpha;
  std::optional<double> mu0, mu1, a0, a1;
};

struct Experiment {
  std::string test = "mean";
  qs::SearchConfig cfg;
  std::optional<double> eps_exponent;
  double mu0 = 1.0, mu1 = 0.0, a0 = 2.0, a1 = 1.0;

  qs::HypothesisPair pair() const {
    if (test == "mean") return qs::HypothesisPair::mean(mu0, mu1);
    if (test == "variance") return qs::HypothesisPair::variance(a0, a1);
    throw qs::ConfigError("test must be \"mean\" or \"variance\", got \"" + test + "\"");
  }

  json to_json() const {
    json j{{"test", test},          {"n", cfg.n},
           {"epsilon", cfg.epsilon}, {"t_target", cfg.t_target},
           {"budget_s", cfg.budget_s}, {"max_refines", cfg.max_refines},
           {"alpha", cfg.alpha}};
    if (eps_exponent) j["eps_exponent"] = *eps_exponent;
    if (test == "mean") {
      j["mu0"] = mu0;
      j["mu1"] = mu1;
    } else {
      j["a0"] = a0;
      j["a1"] = a1;
    }
    return j;
  }
};

void add_experiment_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--test", o.test, "Test family: mean or variance")
      ->check(CLI::IsMember({"mean", "variance"}));
  cmd.add_option("--n", o.n, "Number of streams");
  cmd.add_option("--epsilon", o.epsilon, "Prior probability of a rare stream");
  cmd.add_option("--eps-exponent", o.eps_exponent, "Prior exponent; sets epsilon = n^(e-1)");
  cmd.add_option("--Tn", o.t_target, "Number of streams to identify");
  cmd.add_option("--S", o.budget_s, "Budget: total samples divided by n");
  cmd.add_option("--K", o.max_refines, "Maximum number of refinements");
  cmd.add_option("--alpha", o.alpha, "Fraction of streams kept per refinement");
  cmd.add_option("--mu0", o.mu0, "Mean of normal streams");
  cmd.add_option("--mu1", o.mu1, "Mean of rare streams");
  cmd.add_option("--a0", o.a0, "Variance of normal streams");
  cmd.add_option("--a1", o.a1, "Variance of rare streams");
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

template <class T>
void take(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw qs::ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

void apply_config_file(const std::string& path, Experiment& ex) {
  std::ifstream in(path);
  if (!in) throw qs::ConfigError("cannot read config file " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw qs::ConfigError(path + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) throw qs::ConfigError(path + ": top level must be a JSON object");
  static const std::vector<std::string> known{"test", "n",           "epsilon", "eps_exponent",
                                              "t_target", "budget_s", "max_refines", "alpha",
                                              "mu0", "mu1", "a0", "a1"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw qs::ConfigError(path + ": unknown config key \"" + key + "\"");
  }
  take(j, "test", ex.test);
  take(j, "n", ex.cfg.n);
  take(j, "epsilon", ex.cfg.epsilon);
  if (j.contains("eps_exponent")) {
    double e = 0.0;
    take(j, "eps_exponent", e);
    ex.eps_exponent = e;
  }
  take(j, "t_target", ex.cfg.t_target);
  take(j, "budget_s", ex.cfg.budget_s);
  take(j, "max_refines", ex.cfg.max_refines);
  take(j, "alpha", ex.cfg.alpha);
  take(j, "mu0", ex.mu0);
  take(j, "mu1", ex.mu1);
  take(j, "a0", ex.a0);
  take(j, "a1", ex.a1);
}

Experiment resolve(const std::optional<std::string>& config_path, const Overrides& o) {
  Experiment ex;
  ex.cfg.n = 0;
  ex.cfg.epsilon = 0.01;
  ex.cfg.t_target = 1;
  ex.cfg.budget_s = 2.0;
  ex.cfg.max_refines = 2;
  ex.cfg.alpha = 0.5;
  if (config_path) apply_config_file(*config_path, ex);
  if (o.test) ex.test = *o.test;
  if (o.n) ex.cfg.n = *o.n;
  if (o.epsilon) {
    ex.cfg.epsilon = *o.epsilon;
    ex.eps_exponent.reset();
  }
  if (o.eps_exponent) ex.eps_exponent = *o.eps_exponent;
  if (o.t_target) ex.cfg.t_target = *o.t_target;
  if (o.budget_s) ex.cfg.budget_s = *o.budget_s;
  if (o.max_refines) ex.cfg.max_refines = *o.max_refines;
  if (o.alpha) ex.cfg.alpha = *o.alpha;
  if (o.mu0) ex.mu0 = *o.mu0;
  if (o.mu1) ex.mu1 = *o.mu1;
  if (o.a0) ex.a0 = *o.a0;
  if (o.a1) ex.a1 = *o.a1;
  if (ex.cfg.n < 1) throw qs::ConfigError("n is required and must be positive");
  if (ex.eps_exponent) ex.cfg.epsilon = qs::epsilon_from_exponent(ex.cfg.n, *ex.eps_exponent);
  ex.cfg.validate();
  ex.pair();
  return ex;
}

void emit(const qs::CsvTable& table, const std::optional<std::string>& out) {
  if (!out) {
    std::cout << table.str();
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw qs::ConfigError("cannot write " + *out);
  f << table.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw qs::ConfigError("cannot parse number \"" + item + "\" in list \"" + text + "\"");
    }
  }
  if (values.empty()) throw qs::ConfigError("empty list");
  return values;
}

// ---- schedule -----------------------------------------------------------

struct ScheduleArgs {
  std::int64_t n = 0;
  double s = 2.0;
  int k = 2;
  double alpha = 0.5;
  std::int64_t t = 1;
};

int cmd_schedule(const ScheduleArgs& a) {
  qs::SearchConfig cfg;
  cfg.n = a.n;
  cfg.epsilon = 0.0;
  cfg.t_target = a.t;
  cfg.budget_s = a.s;
  cfg.max_refines = a.k;
  cfg.alpha = a.alpha;
  const qs::Schedule s = qs::build_schedule(cfg);
  std::cout << "K* = " << s.k_star;
  if (s.k_star == 0 && a.k > 0)
    std::cout << "  (alpha > 1 - 1/S: refinement does not pay, plain scan)";
  std::cout << "\n";
  std::cout << "tau = " << s.tau << "  (asymptotic " << s.tau_asymptotic
            << (s.trimmed ? ", trimmed to fit the budget" : "") << ")\n";
  std::cout << "psi =";
  for (bool b : s.psi) std::cout << ' ' << (b ? 1 : 0);
  std::cout << "\n";
  std::cout << "budget = " << s.budget_cap << "  used = " << s.total_samples << "\n";
  std::cout << "round,active,refine_after\n";
  for (std::size_t t = 0; t < s.active_sizes.size(); ++t) {
    const bool refine = t < s.psi.size() && s.psi[t];
    std::cout << t + 1 << ',' << s.active_sizes[t] << ',' << (refine ? 1 : 0) << "\n";
  }
  return kOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::optional<std::string> config;
  Overrides o;
  std::int64_t trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.trials < 1) throw qs::ConfigError("--trials must be at least 1");
  const Experiment ex = resolve(a.config, a.o);
  const qs::HypothesisPair pair = ex.pair();
  const qs::Schedule schedule = qs::build_schedule(ex.cfg);
  const auto outcomes = qs::run_trials(ex.cfg, pair, schedule, a.trials, a.seed, a.threads);
  qs::CsvTable table({"trial", "error", "samples_used", "n1", "rare_retained_final"});
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    table.row({static_cast<std::int64_t>(i), o.error, o.samples_used, o.n1, o.n_rare_final});
  }
  emit(table, a.out);

  const qs::MonteCarloReport r = qs::summarize(outcomes);
  json manifest{
      {"tool", "quicksearch"},
      {"version", qs::kVersion},
      {"command", "simulate"},
      {"config", ex.to_json()},
      {"master_seed", a.seed},
      {"trials", a.trials},
      {"schedule",
       {{"k_star", schedule.k_star},
        {"tau", schedule.tau},
        {"total_samples", schedule.total_samples},
        {"trimmed", schedule.trimmed}}},
      {"report",
       {{"error_rate", r.error_rate},
        {"wilson_ci95", {r.wilson_lo, r.wilson_hi}},
        {"mean_samples", r.mean_samples},
        {"mean_rare_retention", r.mean_rare_retention}}},
      {"outputs", {{{"file", a.out.value_or("-")}, {"fnv1a64", qs::hex_digest(table.digest())}}}},
  };
  std::optional<std::string> manifest_path = a.manifest;
  if (!manifest_path && a.out) manifest_path = *a.out + ".manifest.json";
  if (manifest_path) {
    std::ofstream f(*manifest_path);
    if (!f) throw qs::ConfigError("cannot write " + *manifest_path);
    f << manifest.dump(2) << "\n";
  }
  std::cerr << "error_rate " << qs::format_real(r.error_rate) << " [" << qs::format_real(r.wilson_lo)
            << ", " << qs::format_real(r.wilson_hi) << "] over " << r.trials << " trials\n";
  return kOk;
}

// ---- region -------------------------------------------------------------

struct RegionArgs {
  std::string test = "mean";
  std::int64_t n = 10000;
  std::int64_t t = 1;
  double s = 2.0;
  int k = 2;
  double alpha = 0.5;
  std::size_t grid = 50;
  std::optional<std::size_t> grid_signal;
  std::optional<std::size_t> grid_eps;
  std::int64_t trials = 0;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::optional<std::string> out;
};

int cmd_region(const RegionArgs& a) {
  qs::SearchConfig base;
  base.n = a.n;
  base.epsilon = 0.0;
  base.t_target = a.t;
  base.budget_s = a.s;
  base.max_refines = a.k;
  base.alpha = a.alpha;
  base.validate();
  const auto test = a.test == "mean" ? qs::TestFamily::mean : qs::TestFamily::variance;
  std::optional<qs::RegionOverlay> overlay;
  if (a.trials > 0) overlay = qs::RegionOverlay{a.trials, a.seed, a.threads};
  const auto grid = qs::build_region(test, base, qs::open_unit_axis(a.grid_signal.value_or(a.grid)),
                                     qs::open_unit_axis(a.grid_eps.value_or(a.grid)), overlay);
  std::vector<std::string> header{test == qs::TestFamily::mean ? "r_m" : "xi_v", "eps_exponent",
                                  "threshold", "detectable"};
  if (overlay) header.push_back("empirical_error");
  qs::CsvTable table(header);
  for (const auto& c : grid.cells) {
    if (overlay)
      table.row({c.signal, c.eps_exp, c.threshold, c.detectable, *c.empirical_error});
    else
      table.row({c.signal, c.eps_exp, c.threshold, c.detectable});
  }
  emit(table, a.out);
  return kOk;
}

// ---- extremes -----------------------------------------------------------

struct ExtremesArgs {
  std::string family = "gaussian-min";
  int k = 2;
  std::int64_t m = 10000;
  std::int64_t r = 1;
  std::int64_t samples = 20000;
  std::size_t points = 41;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> out;
};

int cmd_extremes(const ExtremesArgs& a) {
  if (a.points < 2) throw qs::ConfigError("--points must be at least 2");
  const qs::ExtremeFamily fam = a.family == "gaussian-min" ? qs::ExtremeFamily::gaussian_min
                                : a.family == "chi2-min"   ? qs::ExtremeFamily::chi2_min
                                                           : qs::ExtremeFamily::chi2_max;
  std::vector<double> w = qs::simulate_normalised_extremes(fam, a.k, a.m, a.r, a.samples, a.seed);
  std::sort(w.begin(), w.end());
  const auto quantile = [&](double p) {
    return w[static_cast<std::size_t>(p * static_cast<double>(w.size() - 1))];
  };
  const double lo = quantile(0.005);
  const double hi = quantile(0.995);
  qs::CsvTable table({"w", "empirical_cdf", "limit_cdf"});
  for (std::size_t i = 0; i < a.points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(a.points - 1);
    const auto below = std::upper_bound(w.begin(), w.end(), x) - w.begin();
    table.row({x, static_cast<double>(below) / static_cast<double>(w.size()),
               qs::normalised_extreme_limit(fam, a.k, a.r, x)});
  }
  emit(table, a.out);
  std::cerr << "ks_distance "
            << qs::format_real(qs::ks_distance(
                   w, [&](double x) { return qs::normalised_extreme_limit(fam, a.k, a.r, x); }))
            << "\n";
  return kOk;
}

// ---- gains --------------------------------------------------------------

struct GainsArgs {
  std::string kind = "agility";
  double s0 = 20.0;
  double s = 10.0;
  double alpha = 0.5;
  int kmax = 10;
  std::optional<std::string> out;
};

int cmd_gains(const GainsArgs& a) {
  if (a.kmax < 0) throw qs::ConfigError("--Kmax must be non-negative");
  qs::CsvTable table({"K", "lower", "upper", "asymptotic"});
  for (int k = 0; k <= a.kmax; ++k) {
    const qs::GainBounds g = a.kind == "agility" ? qs::agility_gain_bounds(a.s0, a.alpha, k)
                                                 : qs::scaling_gain_bounds(a.s, a.alpha, k);
    table.row({k, g.lower, g.upper, g.asymptotic_k});
  }
  emit(table, a.out);
  return kOk;
}

// ---- baseline -----------------------------------------------------------

struct BaselineArgs {
  std::string method = "compare";
  std::string test = "variance";
  std::int64_t n = 2000;
  std::optional<double> ratio;  // A0/A1 (variance) or mu0 - mu1 (mean)
  std::string eps_exponents = "0.2,0.3,0.8,0.9";
  std::optional<std::int64_t> t_target;
  double target_error = 1e-2;
  std::int64_t trials = 400;
  int kmax = 3;
  double alpha = 0.5;
  double s = 2.0;
  std::string abandon = "cap";
  int sweeps = 1;
  double sprt_error = 1e-2;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::optional<std::string> out;
};

int cmd_baseline(const BaselineArgs& a) {
  if (a.trials < 1) throw qs::ConfigError("--trials must be at least 1");
  const bool mean = a.test == "mean";
  const double strength = a.ratio.value_or(mean ? 1.0 : std::pow(static_cast<double>(a.n), 0.05));
  const qs::HypothesisPair pair =
      mean ? qs::HypothesisPair::mean(strength, 0.0) : qs::HypothesisPair::variance(strength, 1.0);
  qs::CsvTable table({"method", "epsilon_exponent", "mean_budget", "error_rate"});
  for (double e : parse_list(a.eps_exponents)) {
    qs::SearchConfig cfg;
    cfg.n = a.n;
    cfg.epsilon = qs::epsilon_from_exponent(a.n, e);
    cfg.t_target = a.t_target.value_or(
        static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(a.n) * cfg.epsilon))));
    cfg.budget_s = a.s;
    cfg.max_refines = a.kmax;
    cfg.alpha = a.alpha;
    cfg.validate();
    const auto seeds = qs::conditioned_seeds(cfg, a.trials, a.seed, cfg.t_target);
    const bool all = a.method == "compare";
    if (all || a.method == "adaptive") {
      const auto best = qs::minimal_adaptive_budget(cfg, pair, a.kmax, a.target_error, seeds, a.threads);
      if (best)
        table.row({"adaptive", e, static_cast<double>(best->total_samples), best->error_rate});
      else
        table.row({"adaptive", e, "nan", "nan"});
    }
    if (all || a.method == "nonadaptive") {
      const auto best = qs::minimal_adaptive_budget(cfg, pair, 0, a.target_error, seeds, a.threads);
      if (best)
        table.row({"nonadaptive", e, static_cast<double>(best->total_samples), best->error_rate});
      else
        table.row({"nonadaptive", e, "nan", "nan"});
    }
    if (all || a.method == "cusum") {
      qs::CusumConfig c;
      c.target_error = a.target_error;
      c.abandon = a.abandon == "reset" ? qs::CusumAbandon::reset : qs::CusumAbandon::cap;
      c.max_sweeps = a.sweeps;
      const auto r = qs::calibrate_cusum(cfg, pair, c, cfg.t_target, seeds, a.threads);
      table.row({"cusum", e, r.mean_samples, r.error_rate});
    }
    if (a.method == "sprt") {
      const qs::SprtConfig sprt{a.sprt_error, a.sprt_error};
      const auto runs = qs::parallel_map<qs::ScanResult>(
          static_cast<std::int64_t>(seeds.size()), a.threads, [&](std::int64_t i) {
            return qs::run_sprt_scan(cfg, pair, sprt, cfg.t_target, seeds[static_cast<std::size_t>(i)],
                                     100000);
          });
      double samples = 0.0, errors = 0.0;
      for (const auto& r : runs) {
        samples += static_cast<double>(r.total_samples);
        errors += r.error ? 1.0 : 0.0;
      }
      const auto t = static_cast<double>(runs.size());
      table.row({"sprt", e, samples / t, errors / t});
    }
  }
  emit(table, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained adaptive search for rare streams"};
  app.set_version_flag("--version", std::string(qs::kVersion));
  app.require_subcommand(1);
  int threads_flag = 0;
  app.add_option("--threads", threads_flag,
                 "Worker threads (0: QUICKSEARCH_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);

  ScheduleArgs sched;
  auto* c_sched = app.add_subcommand("schedule", "Print the optimal refine/observe schedule");
  c_sched->add_option("--n", sched.n, "Number of streams")->required();
  c_sched->add_option("--S", sched.s, "Budget: total samples divided by n");
  c_sched->add_option("--K", sched.k, "Maximum number of refinements");
  c_sched->add_option("--alpha", sched.alpha, "Fraction kept per refinement");
  c_sched->add_option("--Tn", sched.t, "Number of streams to identify");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo trials; one CSV row per trial");
  c_sim->add_option("config", sim.config, "JSON config file")->check(CLI::ExistingFile);
  add_experiment_options(*c_sim, sim.o);
  c_sim->add_option("--trials", sim.trials, "Number of trials");
  c_sim->add_option("--seed", sim.seed, "Master seed (default 12345)");
  c_sim->add_option("--out", sim.out, "CSV output path (default stdout)");
  c_sim->add_option("--manifest", sim.manifest, "Manifest path (default <out>.manifest.json)");
  c_sim->add_option("--threads", sim.threads, "Worker threads")->check(CLI::NonNegativeNumber);

  RegionArgs reg;
  auto* c_reg = app.add_subcommand("region", "Detectable-region grid");
  c_reg->add_option("--test", reg.test)->check(CLI::IsMember({"mean", "variance"}));
  c_reg->add_option("--n", reg.n);
  c_reg->add_option("--Tn", reg.t);
  c_reg->add_option("--S", reg.s);
  c_reg->add_option("--K", reg.k);
  c_reg->add_option("--alpha", reg.alpha);
  c_reg->add_option("--grid", reg.grid, "Points per axis")->check(CLI::PositiveNumber);
  c_reg->add_option("--grid-signal", reg.grid_signal)->check(CLI::PositiveNumber);
  c_reg->add_option("--grid-eps", reg.grid_eps)->check(CLI::PositiveNumber);
  c_reg->add_option("--trials", reg.trials, "Monte Carlo trials per cell (0: none)");
  c_reg->add_option("--seed", reg.seed, "Master seed (default 12345)");
  c_reg->add_option("--threads", reg.threads)->check(CLI::NonNegativeNumber);
  c_reg->add_option("--out", reg.out);

  ExtremesArgs ext;
  auto* c_ext = app.add_subcommand("extremes", "Empirical vs limit cdf of normalised extremes");
  c_ext->add_option("--family", ext.family)
      ->check(CLI::IsMember({"gaussian-min", "chi2-min", "chi2-max"}));
  c_ext->add_option("--k", ext.k, "Chi-squared degrees of freedom")->check(CLI::PositiveNumber);
  c_ext->add_option("--m", ext.m, "Sample size");
  c_ext->add_option("--r", ext.r, "Rank (1: extreme)");
  c_ext->add_option("--samples", ext.samples, "Replicates");
  c_ext->add_option("--points", ext.points, "Grid points");
  c_ext->add_option("--seed", ext.seed, "Master seed (default 12345)");
  c_ext->add_option("--out", ext.out);

  GainsArgs gains;
  auto* c_gain = app.add_subcommand("gains", "Agility or scaling gain bounds per K");
  c_gain->add_option("--kind", gains.kind)->check(CLI::IsMember({"agility", "scaling"}));
  c_gain->add_option("--S0", gains.s0, "Non-adaptive budget (agility)");
  c_gain->add_option("--S", gains.s, "Budget (scaling)");
  c_gain->add_option("--alpha", gains.alpha);
  c_gain->add_option("--Kmax", gains.kmax);
  c_gain->add_option("--out", gains.out);

  BaselineArgs base;
  auto* c_base = app.add_subcommand("baseline", "Budget needed by adaptive search and baselines");
  c_base->add_option("--method", base.method)
      ->check(CLI::IsMember({"compare", "adaptive", "nonadaptive", "cusum", "sprt"}));
  c_base->add_option("--test", base.test)->check(CLI::IsMember({"mean", "variance"}));
  c_base->add_option("--n", base.n);
  c_base->add_option("--strength", base.ratio, "A0/A1 (variance, default n^0.05) or mu0-mu1 (mean)");
  c_base->add_option("--eps-exponents", base.eps_exponents, "Comma-separated prior exponents");
  c_base->add_option("--Tn", base.t_target, "Default ceil(sqrt(n epsilon))");
  c_base->add_option("--target-error", base.target_error);
  c_base->add_option("--trials", base.trials);
  c_base->add_option("--Kmax", base.kmax);
  c_base->add_option("--alpha", base.alpha);
  c_base->add_option("--S", base.s);
  c_base->add_option("--cusum-abandon", base.abandon)->check(CLI::IsMember({"cap", "reset"}));
  c_base->add_option("--cusum-sweeps", base.sweeps);
  c_base->add_option("--sprt-error", base.sprt_error);
  c_base->add_option("--seed", base.seed, "Master seed (default 12345)");
  c_base->add_option("--threads", base.threads)->check(CLI::NonNegativeNumber);
  c_base->add_option("--out", base.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const auto threads = [&](int local) { return local > 0 ? local : threads_flag; };
  try {
    if (*c_sched) return cmd_schedule(sched);
    if (*c_sim) {
      sim.threads = threads(sim.threads);
      return cmd_simulate(sim);
    }
    if (*c_reg) {
      reg.threads = threads(reg.threads);
      return cmd_region(reg);
    }
    if (*c_ext) return cmd_extremes(ext);
    if (*c_gain) return cmd_gains(gains);
    if (*c_base) {
      base.threads = threads(base.threads);
      return cmd_baseline(base);
    }
  } catch (const qs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const qs::InfeasibleSchedule& e) {
    std::cerr << "infeasible schedule: " << e.what() << "\n";
    return kInfeasible;
  } catch (const qs::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}
