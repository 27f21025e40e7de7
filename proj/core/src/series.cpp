#include "sievelab/series.hpp"

#include <cmath>
#include <stdexcept>

#include "sievelab/kahan.hpp"

namespace sievelab {

namespace {

uint64_t largest_bad_prime(const SieveContext& ctx) {
  return ctx.bad_primes.empty() ? 0 : ctx.bad_primes.back().p;
}

void check_truncation(const SieveContext& ctx, uint64_t p_max) {
  uint64_t need = std::max(ctx.small_prime_bound(), largest_bad_prime(ctx));
  if (p_max < need)
    throw std::domain_error("truncation prime " + std::to_string(p_max) +
                            " is below the exact-regime threshold " + std::to_string(need));
}

double tail_sum_bound(uint64_t p_max) {
  // sum_{p > p_max} p^-2 < 1 / (p_max log p_max) for the truncations we allow.
  return 1.0 / (static_cast<double>(p_max) * std::log(static_cast<double>(p_max)));
}

}  // namespace

EulerProductResult singular_series(const SieveContext& ctx, const FactoredNat& D,
                                   uint64_t p_max) {
  check_truncation(ctx, p_max);
  const double k = static_cast<double>(ctx.k());
  // Past this threshold (and away from B) the local count is exactly k.
  const uint64_t exact_from = std::max(ctx.small_prime_bound(), largest_bad_prime(ctx));

  KahanSum<long double> log_sum;
  for_each_prime(1, p_max, [&](uint64_t p) {
    if (D.contains_prime(p)) return;
    double om = (p > exact_from && !ctx.B.contains_prime(p))
                    ? k
                    : static_cast<double>(ctx.omega(p));
    double lf = std::log1p(-om / static_cast<double>(p)) -
                k * std::log1p(-1.0 / static_cast<double>(p));
    log_sum.add(lf);
  });

  EulerProductResult out;
  out.value = static_cast<double>(std::exp(log_sum.value()));
  out.truncation_prime = p_max;
  out.tail_bound = k * k * tail_sum_bound(p_max);
  return out;
}

namespace {

void check_indices(const SieveContext& ctx, std::span<const size_t> indices) {
  if (indices.empty()) throw std::domain_error("need at least one index");
  for (size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= ctx.k()) throw std::domain_error("index out of range");
    for (size_t i = 0; i < j; ++i)
      if (indices[i] == indices[j]) throw std::domain_error("indices must be distinct");
  }
}

EulerProductResult p_product_impl(const SieveContext& ctx, std::span<const size_t> indices,
                                  uint64_t r, uint64_t p_max) {
  check_indices(ctx, indices);
  check_truncation(ctx, p_max);
  const double m = static_cast<double>(indices.size());
  const uint64_t exact_from = std::max(ctx.small_prime_bound(), largest_bad_prime(ctx));

  KahanSum<long double> log_sum;
  for_each_prime(1, p_max, [&](uint64_t p) {
    if (ctx.divides_WB(p)) return;  // every W_i is a multiple of W*B
    if (r != 0 && r % p == 0) return;
    unsigned n_p;
    if (p > exact_from) {
      n_p = static_cast<unsigned>(indices.size());
    } else {
      n_p = 0;
      for (size_t idx : indices)
        if (!ctx.Wj[idx].contains_prime(p)) ++n_p;
    }
    if (n_p == 0) return;
    // (1 + 1/(p-1))(1 - 1/p) collapses to 1; skip it rather than accumulate
    // rounding noise.
    if (n_p == 1 && indices.size() == 1) return;
    double lf = std::log1p(static_cast<double>(n_p) / static_cast<double>(p - 1)) +
                m * std::log1p(-1.0 / static_cast<double>(p));
    log_sum.add(lf);
  });

  EulerProductResult out;
  out.value = static_cast<double>(std::exp(log_sum.value()));
  out.truncation_prime = p_max;
  // Tail factors have n(p) = m; |log| <= 4 m^2 / p^2 there (checked in tests).
  out.tail_bound = 4.0 * m * m * tail_sum_bound(p_max);
  return out;
}

}  // namespace

EulerProductResult p_product(const SieveContext& ctx, std::span<const size_t> indices,
                             uint64_t p_max) {
  return p_product_impl(ctx, indices, 0, p_max);
}

EulerProductResult p_product_with_r(const SieveContext& ctx, std::span<const size_t> indices,
                                    uint64_t r, uint64_t p_max) {
  if (r == 0) throw std::domain_error("p_product_with_r: r must be >= 1");
  return p_product_impl(ctx, indices, r, p_max);
}

double bar_y(const SieveContext& ctx, std::span<const size_t> indices, uint64_t p_max) {
  check_indices(ctx, indices);
  const double m = static_cast<double>(indices.size());

  FactoredNat g = ctx.Wj[indices[0]];
  for (size_t j = 1; j < indices.size(); ++j) g = gcd(g, ctx.Wj[indices[j]]);

  EulerProductResult P = p_product(ctx, indices, p_max);
  return std::pow(3.0 * m, m) * std::pow(g.n_over_phi(), m) / P.value;
}

}  // namespace sievelab
