#pragma once

#include <cstdint>
#include <span>

#include "sievelab/tuple.hpp"

namespace sievelab {

// A truncated Euler product together with a bound on the log of the
// neglected tail: |log(true / value)| <= tail_bound.
struct EulerProductResult {
  double value;
  uint64_t truncation_prime;
  double tail_bound;
};

// prod_{p <= p_max, p not dividing D} (1 - omega(p)/p) (1 - 1/p)^(-k).
// Beyond every prime dividing an offset difference the local count is
// exactly k, so each neglected factor satisfies |log| <= k^2/p^2 (valid for
// p > 2k^2), giving the tail bound k^2 / (p_max log p_max).
EulerProductResult singular_series(const SieveContext& ctx, const FactoredNat& D,
                                   uint64_t p_max);

// prod over primes with n(p) >= 1 of (1 + n(p)/(p-1)) (1 - 1/p)^m, where
// n(p) counts the selected indices whose modulus W_i is coprime to p.
// Indices are 0-based, size m.
EulerProductResult p_product(const SieveContext& ctx, std::span<const size_t> indices,
                             uint64_t p_max);

// Variant counting n(p) against r * W_i instead of W_i alone (so n(p) = 0
// whenever p | r); the exponent follows the number of indices passed.
EulerProductResult p_product_with_r(const SieveContext& ctx, std::span<const size_t> indices,
                                    uint64_t r, uint64_t p_max);

// (3m)^m * (G/phi(G))^m / P with G = gcd of the selected W_i and P the
// product above.  The constant the majorant weights are normalized to.
double bar_y(const SieveContext& ctx, std::span<const size_t> indices, uint64_t p_max);

}  // namespace sievelab
