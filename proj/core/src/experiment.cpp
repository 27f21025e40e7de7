#include "sievelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sievelab/kahan.hpp"

namespace sievelab {

namespace {

constexpr uint64_t kScanBlock = 1 << 16;

struct ScanOutput {
  double lhs = 0;
  uint64_t violations = 0;
};

void check_indices(const WeightTable& table, std::span<const size_t> indices) {
  if (indices.empty()) throw std::domain_error("need at least one index");
  for (size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= table.ctx.k()) throw std::domain_error("index out of range");
    if (j && indices[j] <= indices[j - 1])
      throw std::domain_error("indices must be strictly increasing");
  }
}

// One contiguous block of the range scan.  Hit lists are built by striding
// each usable prime through the block, so per-n work stays proportional to
// the number of small divisors actually present.
struct BlockResult {
  long double lhs = 0;
  uint64_t violations = 0;
};

BlockResult scan_block(const WeightTable& table, const MajorantTable* maj,
                       std::span<const size_t> indices, const PrimalityRange& flags,
                       uint64_t lo, uint64_t len) {
  const SieveContext& ctx = table.ctx;
  const size_t k = ctx.k();
  const unsigned m = maj ? maj->m : 0;

  std::vector<uint8_t> zero_rule(len, 0);
  for (const auto& [p, e] : ctx.W.factors) {
    (void)e;
    for (uint64_t h : ctx.tuple.offsets) {
      uint64_t first = (p - (lo + 1 + h) % p) % p;  // offset of first n with p | n+h
      for (uint64_t off = first; off < len; off += p) zero_rule[off] = 1;
    }
  }

  std::vector<std::vector<uint64_t>> w_hits(len * k);
  for (size_t i = 0; i < k; ++i) {
    uint64_t h = ctx.tuple.offsets[i];
    for (uint64_t p : table.index_primes[i]) {
      uint64_t first = (p - (lo + 1 + h) % p) % p;
      for (uint64_t off = first; off < len; off += p) w_hits[off * k + i].push_back(p);
    }
  }

  std::vector<std::vector<uint64_t>> m_hits;
  if (maj) {
    m_hits.resize(len * m);
    for (unsigned j = 0; j < m; ++j) {
      uint64_t h = ctx.tuple.offsets[maj->indices[j]];
      for (uint64_t p : maj->index_primes[j]) {
        uint64_t first = (p - (lo + 1 + h) % p) % p;
        for (uint64_t off = first; off < len; off += p) m_hits[off * m + j].push_back(p);
      }
    }
  }

  BlockResult out;
  KahanSum<long double> lhs;
  std::vector<std::vector<uint64_t>> hits(k);
  std::vector<std::vector<uint64_t>> hits_m(m);
  for (uint64_t off = 0; off < len; ++off) {
    uint64_t n = lo + 1 + off;

    bool all_prime = true;
    for (size_t idx : indices)
      if (!flags.is_prime(n + ctx.tuple.offsets[idx])) {
        all_prime = false;
        break;
      }

    if (maj) {
      bool m_prime = true;
      for (unsigned j = 0; j < m; ++j)
        if (!flags.is_prime(n + ctx.tuple.offsets[maj->indices[j]])) {
          m_prime = false;
          break;
        }
      if (m_prime) {
        for (unsigned j = 0; j < m; ++j) hits_m[j] = m_hits[off * m + j];
        if (1.0 > majorant_from_hits(*maj, hits_m)) ++out.violations;
      }
    }

    if (all_prime && !zero_rule[off]) {
      for (size_t i = 0; i < k; ++i) hits[i] = w_hits[off * k + i];
      double s = lambda_sum_from_hits(table, hits);
      lhs.add(s * s);
    }
  }
  out.lhs = lhs.value();
  return out;
}

ScanOutput scan_range(const WeightTable& table, const MajorantTable* maj, uint64_t x,
                      std::span<const size_t> indices, unsigned workers) {
  check_indices(table, indices);
  if (x < 2) throw std::domain_error("scan range needs x >= 2");
  const SieveContext& ctx = table.ctx;
  PrimalityRange flags = prime_range(x, 2 * x + ctx.tuple.offsets.back());

  const uint64_t n_blocks = (x + kScanBlock - 1) / kScanBlock;
  std::vector<BlockResult> results(n_blocks);
  auto run_block = [&](uint64_t bi) {
    uint64_t lo = x + bi * kScanBlock;
    uint64_t len = std::min<uint64_t>(kScanBlock, 2 * x - lo);
    results[bi] = scan_block(table, maj, indices, flags, lo, len);
  };

  if (workers <= 1 || n_blocks <= 1) {
    for (uint64_t bi = 0; bi < n_blocks; ++bi) run_block(bi);
  } else {
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    unsigned n = static_cast<unsigned>(std::min<uint64_t>(workers, n_blocks));
    for (unsigned w = 0; w < n; ++w)
      pool.emplace_back([&] {
        for (;;) {
          uint64_t bi = next.fetch_add(1);
          if (bi >= n_blocks) return;
          run_block(bi);
        }
      });
    for (auto& th : pool) th.join();
  }

  ScanOutput out;
  KahanSum<long double> lhs;
  for (const auto& r : results) {
    lhs.add(r.lhs);
    out.violations += r.violations;
  }
  out.lhs = static_cast<double>(lhs.value());
  return out;
}

}  // namespace

double empirical_lhs(const WeightTable& table, uint64_t x, std::span<const size_t> indices,
                     unsigned workers) {
  return scan_range(table, nullptr, x, indices, workers).lhs;
}

std::map<uint64_t, double> empirical_lhs_by_class(const WeightTable& table, uint64_t x,
                                                  std::span<const size_t> indices) {
  check_indices(table, indices);
  const SieveContext& ctx = table.ctx;
  uint64_t W = ctx.W.to_uint64_checked();
  PrimalityRange flags = prime_range(x, 2 * x + ctx.tuple.offsets.back());
  std::map<uint64_t, double> classes;
  for (uint64_t n = x + 1; n <= 2 * x; ++n) {
    bool all_prime = true;
    for (size_t idx : indices)
      if (!flags.is_prime(n + ctx.tuple.offsets[idx])) {
        all_prime = false;
        break;
      }
    if (!all_prime) continue;
    double w = weight_w(table, n);
    if (w != 0.0) classes[n % W] += w;
  }
  return classes;
}

double corollary_rhs_core(const SieveContext& ctx, uint64_t x, unsigned m, double I_value,
                          double sing_B) {
  const double k = static_cast<double>(ctx.k());
  if (ctx.k() < 3) throw std::domain_error("corollary core needs k >= 3");
  if (m == 0 || m + 1 > ctx.k()) throw std::domain_error("corollary core needs 1 <= m <= k-1");
  if (x < 2) throw std::domain_error("corollary core needs x >= 2");
  const double logx = std::log(static_cast<double>(x));
  const double logk = std::log(k);
  return std::pow(static_cast<double>(m), m) * std::pow(ctx.B.n_over_phi(), k - 1.0) *
         sing_B * static_cast<double>(x) * std::pow(logx, k) *
         std::pow(logk / k, static_cast<double>(m + 1)) * I_value;
}

double theorem_rhs_core(const SieveContext& ctx, uint64_t x, unsigned m,
                        std::span<const size_t> indices, double I_value, double sing_B,
                        double bar_y_value) {
  const double k = static_cast<double>(ctx.k());
  if (ctx.k() < 3) throw std::domain_error("theorem core needs k >= 3");
  if (m == 0 || indices.size() != m + 1)
    throw std::domain_error("theorem core needs the m+1 selected indices");
  if (x < 2) throw std::domain_error("theorem core needs x >= 2");
  const double logx = std::log(static_cast<double>(x));
  const double logk = std::log(k);
  const double phiW_over_W = 1.0 / ctx.W.n_over_phi();
  return bar_y_value * bar_y_value * std::pow(phiW_over_W, k - 1.0) *
         std::pow(ctx.WB_over_phi(), k - 2.0 * m - 1.0) * sing_B *
         std::pow(logk, static_cast<double>(m + 1)) / std::pow(k, static_cast<double>(m + 1)) *
         I_value * static_cast<double>(x) * std::pow(logx, k);
}

double eq_error(uint64_t x, uint64_t q, uint64_t h, std::span<const uint64_t> residues) {
  if (q == 0) throw std::domain_error("eq_error: q must be >= 1");
  if (q > 100'000) throw ResourceError("eq_error: q capped at 10^5");
  if (x < 2) throw std::domain_error("eq_error: x must be >= 2");

  PrimalityRange flags = prime_range(x + h, 2 * x + h);
  std::vector<uint64_t> counts(q, 0);
  uint64_t total = 0;
  for (uint64_t n = x + 1; n <= 2 * x; ++n)
    if (flags.is_prime(n + h)) {
      ++counts[n % q];
      ++total;
    }

  const double share = static_cast<double>(total) / static_cast<double>(totient(q));
  double worst = 0.0;
  auto consider = [&](uint64_t a) {
    double dev = std::abs(static_cast<double>(counts[a]) - share);
    worst = std::max(worst, dev);
  };
  if (residues.empty()) {
    for (uint64_t a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1) consider(a);
  } else {
    for (uint64_t a : residues) {
      if (a >= q || std::gcd(a, q) != 1)
        throw std::domain_error("eq_error: residue not reduced mod q");
      consider(a);
    }
  }
  return worst;
}

BrunTitchmarshResult brun_titchmarsh_check(uint64_t x, uint64_t h) {
  if (x < 10) throw std::domain_error("brun_titchmarsh_check: x must be >= 10");
  PrimalityRange flags = prime_range(x + h, 2 * x + h);
  BrunTitchmarshResult out;
  out.count = flags.count();
  out.ratio = static_cast<double>(out.count) /
              (static_cast<double>(x) / std::log(static_cast<double>(x)));
  out.within_expected = x < 10'000 || out.ratio <= 3.0;
  return out;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const ExperimentReport& report, std::ostream& os) {
  os << "x,lhs,rhs_theorem_core,rhs_corollary_core,fitted_D,majorant_violations,runtime_ms\n";
  for (const ReportRow& r : report.rows) {
    os << r.x << ',' << format_double(r.lhs) << ',' << format_double(r.rhs_theorem_core)
       << ',' << format_double(r.rhs_corollary_core) << ',' << format_double(r.fitted_D)
       << ',' << r.majorant_violations << ',' << r.runtime_ms << '\n';
  }
}

namespace {

double parse_double_field(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad CSV float field: " + s);
  return v;
}

uint64_t parse_u64_field(const std::string& s) {
  uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad CSV integer field: " + s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<ReportRow> read_csv(std::istream& is) {
  std::vector<ReportRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;  // header
    }
    auto fields = split(line, ',');
    if (fields.size() != 7) throw std::runtime_error("bad CSV row: " + line);
    ReportRow r;
    r.x = parse_u64_field(fields[0]);
    r.lhs = parse_double_field(fields[1]);
    r.rhs_theorem_core = parse_double_field(fields[2]);
    r.rhs_corollary_core = parse_double_field(fields[3]);
    r.fitted_D = parse_double_field(fields[4]);
    r.majorant_violations = parse_u64_field(fields[5]);
    r.runtime_ms = parse_u64_field(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

void validate_config(const ExperimentConfig& c) {
  if (c.offsets.empty()) throw std::domain_error("config: offsets required");
  if (c.x_grid.empty()) throw std::domain_error("config: x_grid required");
  for (size_t i = 1; i < c.x_grid.size(); ++i)
    if (c.x_grid[i] <= c.x_grid[i - 1])
      throw std::domain_error("config: x_grid must be strictly increasing");
  if (c.m == 0) throw std::domain_error("config: m must be >= 1");
  if (c.indices.size() != static_cast<size_t>(c.m) + 1)
    throw std::domain_error("config: need exactly m+1 indices");
  if (c.indices.back() >= c.offsets.size())
    throw std::domain_error("config: index out of range");
  for (size_t i = 1; i < c.indices.size(); ++i)
    if (c.indices[i] <= c.indices[i - 1])
      throw std::domain_error("config: indices must be strictly increasing");
  if (c.m + 1 > c.offsets.size()) throw std::domain_error("config: need m+1 <= k");
  if (c.method != "auto" && c.method != "quadrature" && c.method != "monte-carlo")
    throw std::domain_error("config: unknown integral method " + c.method);
}

IntegralEstimate pick_integral(const ExperimentConfig& c, unsigned k) {
  if (c.method == "quadrature" || (c.method == "auto" && k <= 4))
    return integral_I(k, IntegralMethod::NestedQuadrature, 1, c.seed, c.workers);
  return integral_I(k, IntegralMethod::MonteCarlo, c.budget, c.seed, c.workers);
}

}  // namespace

ExperimentReport run_report(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;

  nlohmann::json meta;
  meta["config"] = {
      {"offsets", config.offsets},
      {"B", config.B},
      {"theta", config.theta},
      {"R", config.R ? nlohmann::json(*config.R) : nlohmann::json()},
      {"x_grid", config.x_grid},
      {"m", config.m},
      {"indices_zero_based", config.indices},
      {"budget", config.budget},
      {"seed", config.seed},
      {"workers", config.workers},
      {"series_pmax", config.series_pmax},
      {"support_cap", config.support_cap},
      {"method", config.method},
  };
  meta["rows"] = nlohmann::json::array();

  std::vector<size_t> lead(config.indices.begin(), config.indices.end() - 1);

  for (uint64_t x : config.x_grid) {
    try {
      auto t0 = std::chrono::steady_clock::now();

      FactoredNat B = factorize(config.B);
      SieveContext ctx = config.R
                             ? build_context_with_R(config.offsets, B, *config.R, x)
                             : build_context(config.offsets, B, config.theta, x);
      WeightTableOptions opts;
      opts.support_cap = config.support_cap;
      opts.series_pmax = config.series_pmax;
      WeightTable table = build_weight_table(ctx, opts);

      double bar_y_val = bar_y(ctx, lead, config.series_pmax);
      MajorantTable maj = build_majorant(ctx, config.m, lead, bar_y_val);
      EulerProductResult sing_B = singular_series(ctx, ctx.B, config.series_pmax);
      EulerProductResult P = p_product(ctx, lead, config.series_pmax);
      IntegralEstimate I = pick_integral(config, static_cast<unsigned>(ctx.k()));

      ScanOutput scan = scan_range(table, &maj, x, config.indices, config.workers);

      // Every weight is at most (sum |lambda|)^2 and each indicator at most 1.
      double crude = table.abs_lambda_sum * table.abs_lambda_sum * static_cast<double>(x);
      if (scan.lhs > crude * (1.0 + 1e-9))
        throw std::logic_error("lhs exceeds its crude bound; table is inconsistent");

      ReportRow row;
      row.x = x;
      row.lhs = scan.lhs;
      row.rhs_corollary_core = corollary_rhs_core(ctx, x, config.m, I.value, sing_B.value);
      row.rhs_theorem_core =
          theorem_rhs_core(ctx, x, config.m, config.indices, I.value, sing_B.value, bar_y_val);
      row.fitted_D = row.lhs / row.rhs_corollary_core;
      row.majorant_violations = scan.violations;
      auto t1 = std::chrono::steady_clock::now();
      row.runtime_ms = config.emit_runtime
                           ? static_cast<uint64_t>(
                                 std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                                     .count())
                           : 0;
      report.rows.push_back(row);

      const double log15 = std::pow(std::log(static_cast<double>(x)), 0.2);
      nlohmann::json jrow = {
          {"x", x},
          {"R", ctx.R},
          {"W", ctx.W.to_string()},
          {"support_size", table.support.size()},
          {"majorant_support_size", maj.support.size()},
          {"sing_series_B", sing_B.value},
          {"sing_series_B_tail", sing_B.tail_bound},
          {"sing_series_WB", table.sing_series_WB},
          {"bar_y", bar_y_val},
          {"p_product", P.value},
          {"integral", {{"value", I.value},
                        {"std_error", I.std_error},
                        {"method", I.method == IntegralMethod::MonteCarlo ? "monte-carlo"
                                                                          : "quadrature"},
                        {"samples_or_nodes", I.samples_or_nodes},
                        {"seed", I.seed}}},
          {"k_within_regime", static_cast<double>(ctx.k()) <= log15},
          {"lhs", row.lhs},
          {"fitted_D", row.fitted_D},
          {"majorant_violations", row.majorant_violations},
      };
      nlohmann::json wj = nlohmann::json::array();
      for (const auto& w : ctx.Wj) wj.push_back(w.to_string());
      jrow["Wj"] = wj;
      nlohmann::json bad = nlohmann::json::array();
      for (const auto& b : ctx.bad_primes) bad.push_back(b.p);
      jrow["bad_primes"] = bad;
      if (config.emit_runtime) jrow["runtime_ms"] = row.runtime_ms;
      meta["rows"].push_back(jrow);
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment failed at x=" + std::to_string(x) + ": " + e.what());
    }
  }

  report.metadata_json = meta.dump(2);
  return report;
}

void write_report_files(const ExperimentReport& report) {
  if (!report.config.csv_path.empty()) {
    std::ofstream os(report.config.csv_path);
    if (!os) throw std::runtime_error("cannot open " + report.config.csv_path);
    write_csv(report, os);
  }
  if (!report.config.meta_path.empty()) {
    std::ofstream os(report.config.meta_path);
    if (!os) throw std::runtime_error("cannot open " + report.config.meta_path);
    os << report.metadata_json << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<uint64_t> parse_u64_list(const std::string& value) {
  std::vector<uint64_t> out;
  for (const std::string& part : split(value, ',')) {
    if (part.empty()) throw std::domain_error("empty entry in list: " + value);
    out.push_back(parse_u64_field(part));
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "offsets") {
    config.offsets = parse_u64_list(value);
  } else if (key == "B") {
    config.B = parse_u64_field(value);
  } else if (key == "theta") {
    config.theta = parse_double_field(value);
  } else if (key == "R") {
    config.R = parse_double_field(value);
  } else if (key == "x_grid") {
    config.x_grid = parse_u64_list(value);
  } else if (key == "m") {
    config.m = static_cast<unsigned>(parse_u64_field(value));
  } else if (key == "indices") {
    config.indices.clear();
    for (uint64_t v : parse_u64_list(value)) {
      if (v == 0) throw std::domain_error("config: indices are 1-based");
      config.indices.push_back(static_cast<size_t>(v - 1));
    }
  } else if (key == "budget") {
    config.budget = parse_u64_field(value);
  } else if (key == "seed") {
    config.seed = parse_u64_field(value);
  } else if (key == "workers") {
    config.workers = static_cast<unsigned>(parse_u64_field(value));
  } else if (key == "series_pmax") {
    config.series_pmax = parse_u64_field(value);
  } else if (key == "support_cap") {
    config.support_cap = parse_u64_field(value);
  } else if (key == "method") {
    config.method = value;
  } else if (key == "emit_runtime") {
    if (value == "true" || value == "1")
      config.emit_runtime = true;
    else if (value == "false" || value == "0")
      config.emit_runtime = false;
    else
      throw std::domain_error("config: emit_runtime must be true or false");
  } else if (key == "csv") {
    config.csv_path = value;
  } else if (key == "meta") {
    config.meta_path = value;
  } else {
    throw std::domain_error("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::istringstream is(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace sievelab
