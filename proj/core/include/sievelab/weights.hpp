#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "sievelab/tuple.hpp"

namespace sievelab {

// One vector (d_1, ..., d_k) of componentwise divisors, components >= 1.
using DivisorVector = std::vector<uint64_t>;

struct DivisorVectorHash {
  size_t operator()(const DivisorVector& v) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint64_t c : v) {
      h ^= c;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<size_t>(h);
  }
};

struct WeightTableOptions {
  uint64_t support_cap = 10'000'000;   // max enumerated vectors
  uint64_t series_pmax = 1'000'000;    // truncation for the W*B-free Euler product
};

// The enumerated support lattice with its y and lambda values.  Vectors are
// squarefree with pairwise-coprime components, componentwise coprime to the
// index moduli W_j, and have product < R; they are kept in lexicographic
// order, which fixes every accumulation order in the module.  Immutable
// after construction.
struct WeightTable {
  SieveContext ctx;
  std::vector<DivisorVector> support;
  std::vector<double> y;            // aligned with support
  std::vector<double> lambda;       // aligned with support (the full key set)
  std::vector<uint64_t> phi_omega;  // aligned: prod over p | r of (p - omega(p))
  std::unordered_map<DivisorVector, size_t, DivisorVectorHash> index_of;
  std::vector<std::vector<uint64_t>> index_primes;  // usable primes per index, < R
  double sing_series_WB = 0;  // truncated Euler product away from W*B
  double prefactor = 0;       // (WB/phi(WB))^k
  double abs_lambda_sum = 0;  // sum |lambda|, the crude per-n weight bound

  size_t k() const { return ctx.k(); }
};

// All support vectors for a context, lexicographically ordered.  Throws
// ResourceError past `cap` vectors.
std::vector<DivisorVector> enumerate_support(const SieveContext& ctx,
                                             uint64_t cap = 10'000'000);

WeightTable build_weight_table(const SieveContext& ctx, const WeightTableOptions& opt = {});

// Closed form y(r) = (WB/phi(WB))^k * S * F(log r_1/log R, ..., log r_k/log R)
// on the support set, 0 elsewhere.
double y_of_r(const WeightTable& table, const DivisorVector& r);

// lambda(d) = mu(d) d sum_{d | r} y(r)/phi_omega(r), by direct summation.
double lambda_of_d(const WeightTable& table, const DivisorVector& d);

// mu(r) phi_omega(r) sum_{r | d} lambda(d)/d: the inverse transform, used to
// verify the table round-trips to y on the support set.
double invert_lambda(const WeightTable& table, const DivisorVector& r);

// True when some prime of W divides prod L_i(n); such n carry weight 0.
bool weight_zero_rule(const SieveContext& ctx, uint64_t n);

// w(n) = (sum over componentwise divisor vectors of (L_1(n),...,L_k(n)) of
// lambda)^2, with the small-prime zero rule applied first.
double weight_w(const WeightTable& table, uint64_t n);

// prod over the selected indices j of prod_{p | r, p coprime to W_j} (1 - 1/p),
// for a support vector with scalar product r.
double h_correction(const SieveContext& ctx, uint64_t r_product,
                    std::span<const size_t> indices);

// Scan fast path: the inner lambda sum of w(n), given per-index lists of the
// usable primes dividing L_i(n).  The caller is responsible for the zero
// rule.  weight_w(n) equals the square of this when fed exact hit lists.
double lambda_sum_from_hits(const WeightTable& table,
                            const std::vector<std::vector<uint64_t>>& hits);

// One-level majorant weights on m designated forms: support vectors e with
// product < R^(1/3), squarefree, componentwise coprime to the selected W_i.
struct MajorantTable {
  SieveContext ctx;
  unsigned m = 0;
  std::vector<size_t> indices;  // 0-based, size m, strictly increasing
  std::vector<DivisorVector> support;
  std::vector<double> tilde;  // aligned with support
  std::unordered_map<DivisorVector, size_t, DivisorVectorHash> index_of;
  std::vector<std::vector<uint64_t>> index_primes;
  double tilde_one = 0;  // value at (1,...,1); strictly positive
  double bar_y = 0;
};

MajorantTable build_majorant(const SieveContext& ctx, unsigned m,
                             std::span<const size_t> indices, double bar_y);

// (1/tilde_one^2) * (sum over e with e_j | n + h_{i_j} of tilde(e))^2.
// Dominates the product of the m primality indicators pointwise once the
// shifted values exceed R^(1/3).
double majorant_value(const MajorantTable& maj, uint64_t n);

// Scan fast path for majorant_value, given per-index hit lists.
double majorant_from_hits(const MajorantTable& maj,
                          const std::vector<std::vector<uint64_t>>& hits);

// The transformed variables linking the two weight systems, each computed by
// literal summation over the stored tables.  Verification-scale only.
struct DerivedY {
  double joint;   // mu(r r0) phi_omega(r r0) sum lambda(d) tilde(e) / (phi(d) phi(e))
  double r0_val;  // mu(r0) phi(r0) sum_{r0 | e} tilde(e) / phi(e)
  double m_val;   // mu(r) phi_omega(r) sum_{r | d, d fixed to 1 on the indices} lambda(d)/phi(d)
};
DerivedY derived_y(const WeightTable& table, const MajorantTable& maj, const DivisorVector& r,
                   const DivisorVector& r0, std::span<const size_t> indices,
                   uint64_t support_cap = 10'000);

}  // namespace sievelab
