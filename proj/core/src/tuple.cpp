#include "sievelab/tuple.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sievelab {

namespace {

void require_strictly_increasing(std::span<const uint64_t> offsets) {
  if (offsets.empty()) throw std::domain_error("offsets must be non-empty");
  for (size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] <= offsets[i - 1])
      throw std::domain_error("offsets must be strictly increasing");
}

// Residue classes r in 1..p (ascending) with p | prod L_i(r), each paired
// with the smallest index vanishing there.
std::vector<std::pair<uint64_t, size_t>> residue_table(std::span<const uint64_t> offsets,
                                                       uint64_t p) {
  std::vector<std::pair<uint64_t, size_t>> table;
  for (size_t i = 0; i < offsets.size(); ++i) {
    uint64_t rem = offsets[i] % p;
    uint64_t r = (rem == 0) ? p : p - rem;  // L_i(r) = r + h_i = 0 mod p
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const auto& e) { return e.first == r; });
    if (it == table.end()) table.emplace_back(r, i);
  }
  std::sort(table.begin(), table.end());
  return table;
}

}  // namespace

bool check_admissible(std::span<const uint64_t> offsets) {
  require_strictly_increasing(offsets);
  const uint64_t k = offsets.size();
  for (uint64_t p : primes_up_to(k)) {
    std::set<uint64_t> classes;
    for (uint64_t h : offsets) classes.insert(h % p);
    if (classes.size() == p) return false;
  }
  return true;
}

const BadPrime* SieveContext::find_bad(uint64_t p) const {
  auto it = std::lower_bound(bad_primes.begin(), bad_primes.end(), p,
                             [](const BadPrime& b, uint64_t q) { return b.p < q; });
  return (it != bad_primes.end() && it->p == p) ? &*it : nullptr;
}

uint64_t SieveContext::omega(uint64_t p) const {
  if (B.contains_prime(p)) return 0;
  return residue_table(tuple.offsets, p).size();
}

std::vector<std::pair<uint64_t, size_t>> SieveContext::chosen_index_table(uint64_t p) const {
  if (divides_WB(p))
    throw std::domain_error("chosen indices undefined for p dividing W*B");
  return residue_table(tuple.offsets, p);
}

uint64_t omega(const SieveContext& ctx, uint64_t p) { return ctx.omega(p); }

std::vector<std::pair<uint64_t, size_t>> chosen_indices(const SieveContext& ctx, uint64_t p) {
  return ctx.chosen_index_table(p);
}

namespace {

SieveContext build_impl(std::span<const uint64_t> offsets, FactoredNat B, double theta,
                        double R, uint64_t x) {
  if (!check_admissible(offsets)) throw std::domain_error("offsets are not admissible");

  SieveContext ctx;
  ctx.tuple.offsets.assign(offsets.begin(), offsets.end());
  ctx.B = std::move(B);
  ctx.theta = theta;
  ctx.x = x;
  ctx.R = R;

  const size_t k = ctx.k();
  for (uint64_t p : primes_up_to(ctx.small_prime_bound()))
    if (!ctx.B.contains_prime(p)) ctx.W = ctx.W.times(FactoredNat::prime(p));
  ctx.WB = ctx.W.times(ctx.B);

  // Primes above 2k^2 (and outside B) dividing some offset difference are the
  // only ones where the residue classes collide.
  std::set<uint64_t> bad;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      for (const auto& [p, e] : factorize(offsets[j] - offsets[i]).factors) {
        (void)e;
        if (p > ctx.small_prime_bound() && !ctx.B.contains_prime(p)) bad.insert(p);
      }
  for (uint64_t p : bad) {
    BadPrime entry;
    entry.p = p;
    for (const auto& [r, j] : residue_table(ctx.tuple.offsets, p)) {
      entry.residues.push_back(r);
      entry.chosen.push_back(j);
    }
    ctx.bad_primes.push_back(std::move(entry));
  }

  ctx.Wj.assign(k, ctx.WB);
  for (const auto& b : ctx.bad_primes) {
    for (size_t j = 0; j < k; ++j) {
      bool is_chosen = std::find(b.chosen.begin(), b.chosen.end(), j) != b.chosen.end();
      if (!is_chosen) ctx.Wj[j] = ctx.Wj[j].times(FactoredNat::prime(b.p));
    }
  }
  return ctx;
}

}  // namespace

SieveContext build_context(std::span<const uint64_t> offsets, FactoredNat B, double theta,
                           uint64_t x) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("theta must lie in (0,1)");
  if (x < 1) throw std::domain_error("x must be >= 1");
  double R = std::pow(static_cast<double>(x), theta / 3.0);
  return build_impl(offsets, std::move(B), theta, R, x);
}

SieveContext build_context_with_R(std::span<const uint64_t> offsets, FactoredNat B, double R,
                                  uint64_t x) {
  if (!(R > 0.0)) throw std::domain_error("R must be positive");
  return build_impl(offsets, std::move(B), 0.0, R, x);
}

DerivedModuli derived_moduli(const SieveContext& ctx, std::span<const size_t> indices) {
  const size_t k = ctx.k();
  if (indices.empty() || indices.size() > k)
    throw std::domain_error("derived_moduli: need 1 <= #indices <= k");
  for (size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= k) throw std::domain_error("derived_moduli: index out of range");
    if (j && indices[j] <= indices[j - 1])
      throw std::domain_error("derived_moduli: indices must be strictly increasing");
  }

  DerivedModuli out;
  out.Wprime = ctx.Wj;
  const auto& h = ctx.tuple.offsets;
  for (size_t i = 0; i < k; ++i) {
    if (std::find(indices.begin(), indices.end(), i) != indices.end()) continue;
    uint64_t g = 0;
    for (size_t idx : indices) {
      uint64_t diff = h[idx] > h[i] ? h[idx] - h[i] : h[i] - h[idx];
      g = std::gcd(g, diff);
    }
    FactoredNat gf = factorize(g);
    out.Wprime[i] = ctx.Wj[i].times(gf).radical();
    out.Delta = out.Delta.times(gf);
  }
  return out;
}

}  // namespace sievelab
