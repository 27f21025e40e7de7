#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sievelab/numtheory.hpp"

namespace sievelab {

// Offsets h_1 < ... < h_k of the linear forms L_i(n) = n + h_i.
struct AdmissibleTuple {
  std::vector<uint64_t> offsets;
  size_t k() const { return offsets.size(); }
};

// True iff for every prime p <= k the residues -h_i (mod p) leave at least
// one class uncovered.  Primes above k can never be covered by k offsets.
bool check_admissible(std::span<const uint64_t> offsets);

// Local data at a prime p coprime to W*B that divides some offset difference:
// the residue classes (in 1..p) where prod L_i vanishes, and for each class
// the smallest form index vanishing there.  Those are the only primes where
// fewer than k of the forms get a class of their own.
struct BadPrime {
  uint64_t p;
  std::vector<uint64_t> residues;  // increasing, each in 1..p
  std::vector<size_t> chosen;      // chosen[i] = smallest 0-based j with p | L_j(residues[i])
};

// Everything precomputed about a tuple at a given scale: the small-prime
// modulus W, the optional exceptional factor B, the per-index moduli W_j, and
// the support radius R.  Immutable after build_context; shareable across
// threads.
struct SieveContext {
  AdmissibleTuple tuple;
  FactoredNat B;
  FactoredNat W;   // prod of p <= 2k^2 with p not dividing B
  FactoredNat WB;  // W * B
  double theta = 1.0 / 3.0;
  uint64_t x = 0;
  double R = 0;  // x^(theta/3) unless set explicitly
  std::vector<BadPrime> bad_primes;  // sorted by p
  std::vector<FactoredNat> Wj;       // k entries, each a multiple of WB

  size_t k() const { return tuple.k(); }
  uint64_t small_prime_bound() const { return 2 * static_cast<uint64_t>(k()) * k(); }
  bool divides_WB(uint64_t p) const { return WB.contains_prime(p); }
  const BadPrime* find_bad(uint64_t p) const;

  // Number of residues n mod p with p | prod L_i(n); 0 when p | B.
  // Always < p for admissible tuples, and equal to k once p divides B
  // times no offset difference.
  uint64_t omega(uint64_t p) const;

  // (residue, smallest vanishing index) pairs for p coprime to W*B.
  std::vector<std::pair<uint64_t, size_t>> chosen_index_table(uint64_t p) const;

  double WB_over_phi() const { return WB.n_over_phi(); }
};

SieveContext build_context(std::span<const uint64_t> offsets, FactoredNat B, double theta,
                           uint64_t x);
// Same, with the support radius decoupled from x.
SieveContext build_context_with_R(std::span<const uint64_t> offsets, FactoredNat B, double R,
                                  uint64_t x);

// Free-function forms of the context queries.
uint64_t omega(const SieveContext& ctx, uint64_t p);
std::vector<std::pair<uint64_t, size_t>> chosen_indices(const SieveContext& ctx, uint64_t p);

// Per-index moduli sharpened by the gcd of offset differences against a set
// of selected indices, plus the product Delta of those gcds.  Entries at the
// selected indices are returned unchanged.
struct DerivedModuli {
  std::vector<FactoredNat> Wprime;
  FactoredNat Delta;
};
DerivedModuli derived_moduli(const SieveContext& ctx, std::span<const size_t> indices);

}  // namespace sievelab
