#include "cli.hpp"

#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sievelab/experiment.hpp"

namespace sievelab {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<uint64_t> parse_offsets(const std::string& text) {
  std::vector<uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) throw UsageError("malformed offsets list: empty entry");
    uint64_t v = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw UsageError("malformed offsets list: '" + part + "'");
      v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("malformed offsets list: no entries");
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1])
      throw UsageError("malformed offsets list: must be strictly increasing");
  return out;
}

// Smallest prime whose residue classes the offsets cover completely.
uint64_t covered_prime(const std::vector<uint64_t>& offsets) {
  for (uint64_t p : primes_up_to(offsets.size())) {
    std::set<uint64_t> classes;
    for (uint64_t h : offsets) classes.insert(h % p);
    if (classes.size() == p) return p;
  }
  return 0;
}

int cmd_tuple_check(const std::string& h_flag, uint64_t B) {
  auto offsets = parse_offsets(h_flag);
  if (!check_admissible(offsets)) {
    std::cerr << "inadmissible: residues mod " << covered_prime(offsets) << " fully covered\n";
    return 1;
  }
  SieveContext ctx = build_context(offsets, factorize(B), 1.0 / 3.0, 1'000'000);

  std::cout << "offsets: " << h_flag << " (k=" << ctx.k() << ")\n";
  std::cout << "admissible: yes\n";
  std::cout << "W = " << ctx.W.to_string() << "\n";
  std::cout << "B = " << ctx.B.to_string() << "\n";
  std::cout << "omega table (p <= 2k^2 = " << ctx.small_prime_bound() << "):\n";
  for (uint64_t p : primes_up_to(ctx.small_prime_bound()))
    std::cout << "  p=" << p << " omega=" << ctx.omega(p) << "\n";
  if (ctx.bad_primes.empty()) {
    std::cout << "collision primes: none (every large prime sees k distinct classes)\n";
  } else {
    std::cout << "collision primes (with smallest vanishing index per class, 1-based):\n";
    for (const auto& b : ctx.bad_primes) {
      std::cout << "  p=" << b.p << " omega=" << b.residues.size() << " chosen:";
      for (size_t i = 0; i < b.residues.size(); ++i)
        std::cout << " r=" << b.residues[i] << "->i=" << b.chosen[i] + 1;
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_series(const std::string& h_flag, uint64_t B, uint64_t D, uint64_t pmax) {
  auto offsets = parse_offsets(h_flag);
  SieveContext ctx = build_context(offsets, factorize(B), 1.0 / 3.0, 1'000'000);
  EulerProductResult r = singular_series(ctx, factorize(D), pmax);
  std::cout << "singular series over p <= " << r.truncation_prime << " with D = " << D
            << ": value = " << format_double(r.value)
            << " tail_bound = " << format_double(r.tail_bound) << "\n";
  return 0;
}

int cmd_weights_dump(const std::string& h_flag, uint64_t B, uint64_t x, double theta,
                     double R_explicit, uint64_t pmax, uint64_t cap) {
  auto offsets = parse_offsets(h_flag);
  SieveContext ctx = R_explicit > 0
                         ? build_context_with_R(offsets, factorize(B), R_explicit, x)
                         : build_context(offsets, factorize(B), theta, x);
  WeightTableOptions opts;
  opts.series_pmax = pmax;
  opts.support_cap = cap;
  WeightTable table = build_weight_table(ctx, opts);
  for (size_t i = 0; i < table.support.size(); ++i) {
    for (uint64_t c : table.support[i]) std::cout << c << '\t';
    std::cout << format_double(table.y[i]) << '\t' << format_double(table.lambda[i]) << '\n';
  }
  return 0;
}

int cmd_integrals(unsigned k, unsigned m, uint64_t budget, uint64_t seed,
                  const std::string& method, unsigned workers) {
  IntegralMethod mth;
  if (method == "auto")
    mth = k <= 4 ? IntegralMethod::NestedQuadrature : IntegralMethod::MonteCarlo;
  else if (method == "quadrature")
    mth = IntegralMethod::NestedQuadrature;
  else if (method == "monte-carlo")
    mth = IntegralMethod::MonteCarlo;
  else
    throw UsageError("unknown method '" + method + "'");

  auto print = [](const char* name, const IntegralEstimate& e) {
    std::cout << name << ": value = " << format_double(e.value)
              << " std_error = " << format_double(e.std_error) << " method = "
              << (e.method == IntegralMethod::MonteCarlo ? "monte-carlo" : "quadrature")
              << " samples_or_nodes = " << e.samples_or_nodes << " seed = " << e.seed << "\n";
  };
  print("I_k(F)", integral_I(k, mth, budget, seed, workers));
  if (m + 1 <= k) {
    // The L integrals always compose exactly through one-dimensional pieces.
    print("L_k(F1)", integral_L(FamilyKind::F1, k, m, IntegralMethod::NestedQuadrature, budget,
                                seed, workers));
    print("L_k(F2)", integral_L(FamilyKind::F2, k, m, IntegralMethod::NestedQuadrature, budget,
                                seed, workers));
  }
  return 0;
}

int cmd_experiment(const std::string& config_path,
                   const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig config = load_config_file(config_path);
  for (const auto& [key, value] : overrides) apply_config_entry(config, key, value);
  ExperimentReport report = run_report(config);
  write_report_files(report);
  for (const ReportRow& r : report.rows)
    std::cout << "x=" << r.x << " lhs=" << format_double(r.lhs)
              << " fitted_D=" << format_double(r.fitted_D)
              << " majorant_violations=" << r.majorant_violations << "\n";
  if (!config.csv_path.empty()) std::cout << "csv written to " << config.csv_path << "\n";
  if (!config.meta_path.empty()) std::cout << "metadata written to " << config.meta_path << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"multidimensional sieve laboratory"};
  app.require_subcommand(1);
  // offsets travel on --h, so help keeps only its long form
  app.set_help_flag("--help", "print help and exit");

  // tuple check
  auto* tuple_cmd = app.add_subcommand("tuple", "inspect an offset tuple");
  tuple_cmd->require_subcommand(1);
  auto* tuple_check = tuple_cmd->add_subcommand("check", "admissibility and local counts");
  std::string tc_h;
  uint64_t tc_B = 1;
  tuple_check->add_option("--h", tc_h, "comma-separated offsets")->required();
  tuple_check->add_option("--B", tc_B, "exceptional factor (default 1)");

  // series
  auto* series_cmd = app.add_subcommand("series", "truncated singular series");
  std::string se_h;
  uint64_t se_B = 1, se_D = 1, se_pmax = 1'000'000;
  series_cmd->add_option("--h", se_h, "comma-separated offsets")->required();
  series_cmd->add_option("--pmax", se_pmax, "truncation prime")->required();
  series_cmd->add_option("--B", se_B, "exceptional factor (default 1)");
  series_cmd->add_option("--D", se_D, "excluded modulus (default 1)");

  // weights dump
  auto* weights_cmd = app.add_subcommand("weights", "sieve weight tables");
  weights_cmd->require_subcommand(1);
  auto* weights_dump = weights_cmd->add_subcommand("dump", "emit the support table");
  std::string wd_h;
  uint64_t wd_B = 1, wd_x = 1'000'000, wd_pmax = 1'000'000, wd_cap = 10'000'000;
  double wd_theta = 1.0 / 3.0, wd_R = 0.0;
  weights_dump->add_option("--h", wd_h, "comma-separated offsets")->required();
  weights_dump->add_option("--x", wd_x, "scale (sets R = x^(theta/3))")->required();
  weights_dump->add_option("--theta", wd_theta, "level-of-distribution parameter");
  weights_dump->add_option("--R", wd_R, "explicit support radius (overrides theta)");
  weights_dump->add_option("--B", wd_B, "exceptional factor (default 1)");
  weights_dump->add_option("--pmax", wd_pmax, "series truncation prime");
  weights_dump->add_option("--cap", wd_cap, "support size cap");

  // integrals
  auto* integrals_cmd = app.add_subcommand("integrals", "cutoff integral estimates");
  unsigned in_k = 0, in_m = 1, in_workers = 1;
  uint64_t in_budget = 1'000'000, in_seed = 1;
  std::string in_method = "auto";
  integrals_cmd->add_option("--k", in_k, "dimension")->required();
  integrals_cmd->add_option("--m", in_m, "inner coordinate count minus one");
  integrals_cmd->add_option("--budget", in_budget, "Monte Carlo samples");
  integrals_cmd->add_option("--seed", in_seed, "Monte Carlo seed");
  integrals_cmd->add_option("--method", in_method, "auto | quadrature | monte-carlo");
  integrals_cmd->add_option("--workers", in_workers, "worker threads");

  // experiment
  auto* experiment_cmd = app.add_subcommand("experiment", "run a configured experiment");
  std::string ex_config;
  experiment_cmd->add_option("--config", ex_config, "flat key = value config file")->required();
  std::string ex_h, ex_xgrid, ex_indices, ex_method, ex_csv, ex_meta;
  uint64_t ex_B = 0, ex_budget = 0, ex_seed = 0, ex_pmax = 0;
  unsigned ex_m = 0, ex_workers = 0;
  double ex_theta = -1.0, ex_R = 0.0;
  experiment_cmd->add_option("--h", ex_h, "override offsets");
  experiment_cmd->add_option("--x-grid", ex_xgrid, "override x grid");
  experiment_cmd->add_option("--indices", ex_indices, "override 1-based indices");
  experiment_cmd->add_option("--m", ex_m, "override m");
  experiment_cmd->add_option("--B", ex_B, "override B");
  experiment_cmd->add_option("--theta", ex_theta, "override theta");
  experiment_cmd->add_option("--R", ex_R, "override explicit R");
  experiment_cmd->add_option("--budget", ex_budget, "override integral budget");
  experiment_cmd->add_option("--seed", ex_seed, "override seed");
  experiment_cmd->add_option("--workers", ex_workers, "override worker count");
  experiment_cmd->add_option("--pmax", ex_pmax, "override series truncation");
  experiment_cmd->add_option("--method", ex_method, "override integral method");
  experiment_cmd->add_option("--csv", ex_csv, "override csv output path");
  experiment_cmd->add_option("--meta", ex_meta, "override metadata output path");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->set_help_flag("--help", "print help and exit");
    for (CLI::App* inner : sub->get_subcommands({}))
      inner->set_help_flag("--help", "print help and exit");
  }

  if (args.empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    std::vector<const char*> argv;
    argv.push_back("sievelab");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (tuple_check->parsed()) return cmd_tuple_check(tc_h, tc_B);
    if (series_cmd->parsed()) return cmd_series(se_h, se_B, se_D, se_pmax);
    if (weights_dump->parsed())
      return cmd_weights_dump(wd_h, wd_B, wd_x, wd_theta, wd_R, wd_pmax, wd_cap);
    if (integrals_cmd->parsed())
      return cmd_integrals(in_k, in_m, in_budget, in_seed, in_method, in_workers);
    if (experiment_cmd->parsed()) {
      std::vector<std::pair<std::string, std::string>> overrides;
      if (!ex_h.empty()) overrides.emplace_back("offsets", ex_h);
      if (!ex_xgrid.empty()) overrides.emplace_back("x_grid", ex_xgrid);
      if (!ex_indices.empty()) overrides.emplace_back("indices", ex_indices);
      if (ex_m) overrides.emplace_back("m", std::to_string(ex_m));
      if (ex_B) overrides.emplace_back("B", std::to_string(ex_B));
      if (ex_theta >= 0) overrides.emplace_back("theta", std::to_string(ex_theta));
      if (ex_R > 0) overrides.emplace_back("R", std::to_string(ex_R));
      if (ex_budget) overrides.emplace_back("budget", std::to_string(ex_budget));
      if (ex_seed) overrides.emplace_back("seed", std::to_string(ex_seed));
      if (ex_workers) overrides.emplace_back("workers", std::to_string(ex_workers));
      if (ex_pmax) overrides.emplace_back("series_pmax", std::to_string(ex_pmax));
      if (!ex_method.empty()) overrides.emplace_back("method", ex_method);
      if (!ex_csv.empty()) overrides.emplace_back("csv", ex_csv);
      if (!ex_meta.empty()) overrides.emplace_back("meta", ex_meta);
      return cmd_experiment(ex_config, overrides);
    }
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  std::cerr << app.help();
  return 2;
}

}  // namespace sievelab
