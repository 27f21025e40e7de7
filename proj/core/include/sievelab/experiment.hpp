#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sievelab/integrals.hpp"
#include "sievelab/series.hpp"
#include "sievelab/weights.hpp"

namespace sievelab {

struct ExperimentConfig {
  std::vector<uint64_t> offsets;
  uint64_t B = 1;
  double theta = 1.0 / 3.0;
  std::optional<double> R;  // decouples the support radius from x when set
  std::vector<uint64_t> x_grid;
  unsigned m = 1;
  std::vector<size_t> indices;  // 0-based, size m+1, strictly increasing
  uint64_t budget = 2'000'000;
  uint64_t seed = 1;
  unsigned workers = 1;
  uint64_t series_pmax = 1'000'000;
  uint64_t support_cap = 10'000'000;
  std::string method = "auto";  // auto | quadrature | monte-carlo
  bool emit_runtime = true;     // when false the runtime column is zeroed
  std::string csv_path;
  std::string meta_path;
};

struct ReportRow {
  uint64_t x;
  double lhs;
  double rhs_theorem_core;
  double rhs_corollary_core;
  double fitted_D;
  uint64_t majorant_violations;
  uint64_t runtime_ms;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::string metadata_json;
};

// Sum over n in (x, 2x] of the primality indicators at the selected forms
// times w(n).  The range is cut into fixed blocks whose partial sums combine
// in index order, so the value is independent of the worker count.
double empirical_lhs(const WeightTable& table, uint64_t x, std::span<const size_t> indices,
                     unsigned workers = 1);

// Debug view of the same sum keyed by n mod W; needs W to fit a word.
std::map<uint64_t, double> empirical_lhs_by_class(const WeightTable& table, uint64_t x,
                                                  std::span<const size_t> indices);

// m^m (B/phi(B))^(k-1) S_B x (log x)^k (log k / k)^(m+1) I, the bound shape
// with the absolute constant stripped.  Needs k >= 3.
double corollary_rhs_core(const SieveContext& ctx, uint64_t x, unsigned m, double I_value,
                          double sing_B);

// bar_y^2 (phi(W)/W)^(k-1) (WB/phi(WB))^(k-2m-1) S_B (log k)^(m+1)/k^(m+1)
// I x (log x)^k, again constant-stripped.
double theorem_rhs_core(const SieveContext& ctx, uint64_t x, unsigned m,
                        std::span<const size_t> indices, double I_value, double sing_B,
                        double bar_y_value);

// Largest deviation, over reduced residues a mod q (or the given subset), of
// the count of n in (x, 2x] with n + h prime and n = a (q) from the
// equidistributed share total/phi(q).
double eq_error(uint64_t x, uint64_t q, uint64_t h, std::span<const uint64_t> residues = {});

struct BrunTitchmarshResult {
  uint64_t count;         // primes among n + h for n in (x, 2x]
  double ratio;           // count / (x / log x)
  bool within_expected;   // soft check: ratio <= 3 once x >= 10^4
};
BrunTitchmarshResult brun_titchmarsh_check(uint64_t x, uint64_t h);

// Full pipeline for each grid point: context, tables, majorant verification,
// both bound cores, fitted constant.  Deterministic given the config.
ExperimentReport run_report(const ExperimentConfig& config);

void write_csv(const ExperimentReport& report, std::ostream& os);
std::vector<ReportRow> read_csv(std::istream& is);
// Writes csv_path and meta_path when set in the config.
void write_report_files(const ExperimentReport& report);

std::string format_double(double v);  // shortest round-trip decimal

// Flat "key = value" config text, '#' starts a comment.  Offsets and grids
// are comma-separated; indices are 1-based on the wire.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace sievelab
