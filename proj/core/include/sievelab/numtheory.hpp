#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sievelab/errors.hpp"

namespace sievelab {

uint64_t isqrt64(uint64_t n);

// A natural number kept as its prime factorization: sorted (prime, exponent)
// pairs, exponents >= 1, empty list = 1.  Moduli products in the sieve
// apparatus overflow 64 bits already at k = 6, so they are never expanded;
// conversions to machine integers are checked.
struct FactoredNat {
  std::vector<std::pair<uint64_t, uint32_t>> factors;

  static FactoredNat one() { return {}; }
  static FactoredNat prime(uint64_t p, uint32_t e = 1);

  bool is_one() const { return factors.empty(); }
  bool contains_prime(uint64_t p) const;
  uint32_t exponent_of(uint64_t p) const;
  uint64_t largest_prime() const;  // 1 for the empty product

  double to_double() const;
  std::optional<uint64_t> to_uint64() const;  // nullopt on overflow
  uint64_t to_uint64_checked() const;         // throws std::overflow_error

  // n / phi(n) = prod p/(p-1) over the distinct primes of n.
  double n_over_phi() const;

  FactoredNat times(const FactoredNat& other) const;
  FactoredNat radical() const;
  std::string to_string() const;

  friend bool operator==(const FactoredNat&, const FactoredNat&) = default;
};

FactoredNat gcd(const FactoredNat& a, const FactoredNat& b);
FactoredNat lcm(const FactoredNat& a, const FactoredNat& b);

// All primes p <= limit, by plain sieve.  Intended for base primes and small
// bounds; use prime_range/for_each_prime for large spans.
std::vector<uint64_t> primes_up_to(uint64_t limit);

struct SieveOptions {
  uint64_t segment_size = uint64_t{1} << 20;  // entries per segment
  uint64_t max_span = uint64_t{1} << 33;      // guard on hi - lo
};

// Exact primality flags for the half-open interval (lo, hi].  Immutable after
// construction and safe to share across threads.  Memory is one bit per
// integer in the span, independent of hi itself.
class PrimalityRange {
 public:
  PrimalityRange(uint64_t lo, uint64_t hi, std::vector<uint64_t> bits);

  uint64_t lo() const { return lo_; }
  uint64_t hi() const { return hi_; }

  bool is_prime(uint64_t n) const;  // n must lie in (lo, hi]
  uint64_t count() const;

 private:
  uint64_t lo_;
  uint64_t hi_;
  std::vector<uint64_t> bits_;
};

// Segmented sieve of Eratosthenes over (lo, hi] with base primes <= sqrt(hi).
PrimalityRange prime_range(uint64_t lo, uint64_t hi, const SieveOptions& opt = {});

// Calls fn(p) for every prime p in (lo, hi], ascending, in bounded memory.
void for_each_prime(uint64_t lo, uint64_t hi,
                    const std::function<void(uint64_t)>& fn,
                    const SieveOptions& opt = {});

FactoredNat factorize(uint64_t n);  // n >= 1; trial division
int mobius(uint64_t n);             // 0 if not squarefree, else (-1)^#primes
bool is_squarefree(uint64_t n);
uint64_t totient(uint64_t n);
FactoredNat totient_factored(const FactoredNat& n);

// Componentwise gcds and lcms of two equal-length vectors, multiplied across
// components.  Exact for any size via the factored representation.
std::pair<FactoredNat, FactoredNat> vec_gcd_lcm(std::span<const uint64_t> d,
                                                std::span<const uint64_t> e);

}  // namespace sievelab
