#include "sievelab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sievelab/cutoff.hpp"
#include "sievelab/kahan.hpp"
#include "sievelab/series.hpp"

namespace sievelab {

namespace {

constexpr size_t kMaxForms = 64;  // index masks are held in a uint64_t

// A squarefree product of usable primes, with the set of indices whose
// modulus it is coprime to.
struct PoolEntry {
  uint64_t value;
  std::vector<uint64_t> primes;
  uint64_t index_mask;
};

std::vector<uint64_t> candidate_primes(const SieveContext& ctx, double cap,
                                       uint64_t pool_cap) {
  std::vector<uint64_t> out;
  if (cap <= 2) return out;
  // every usable prime below cap is a lattice entry on its own, so pi(cap)
  // bounds the enumeration from below; refuse before sieving something huge
  double rough_pi = cap / std::log(std::max(cap, 3.0));
  if (rough_pi > 2.0 * static_cast<double>(pool_cap))
    throw ResourceError("support radius too large for the configured vector cap");
  for (uint64_t p : primes_up_to(static_cast<uint64_t>(cap))) {
    if (static_cast<double>(p) >= cap) break;
    if (p <= ctx.small_prime_bound()) continue;
    if (ctx.B.contains_prime(p)) continue;
    out.push_back(p);
  }
  return out;
}

uint64_t prime_index_mask(const std::vector<FactoredNat>& moduli, uint64_t p) {
  uint64_t mask = 0;
  for (size_t i = 0; i < moduli.size(); ++i)
    if (!moduli[i].contains_prime(p)) mask |= uint64_t{1} << i;
  return mask;
}

void grow_pool(const std::vector<uint64_t>& primes,
               const std::vector<uint64_t>& prime_masks, double cap, uint64_t pool_cap,
               size_t start, uint64_t value, std::vector<uint64_t>& current, uint64_t mask,
               std::vector<PoolEntry>& pool) {
  for (size_t i = start; i < primes.size(); ++i) {
    unsigned __int128 next = static_cast<unsigned __int128>(value) * primes[i];
    if (static_cast<long double>(next) >= static_cast<long double>(cap)) break;
    if (pool.size() >= pool_cap)
      throw ResourceError("support component pool exceeds cap of " + std::to_string(pool_cap));
    current.push_back(primes[i]);
    uint64_t next_mask = mask & prime_masks[i];
    pool.push_back({static_cast<uint64_t>(next), current, next_mask});
    grow_pool(primes, prime_masks, cap, pool_cap, i + 1, static_cast<uint64_t>(next), current,
              next_mask, pool);
    current.pop_back();
  }
}

// All squarefree products of usable primes below `cap`, ascending by value,
// restricted per index by the given moduli.
std::vector<PoolEntry> make_pool(const SieveContext& ctx,
                                 const std::vector<FactoredNat>& moduli, double cap,
                                 uint64_t pool_cap) {
  if (moduli.size() > kMaxForms) throw std::domain_error("too many forms for index masks");
  auto primes = candidate_primes(ctx, cap, pool_cap);
  std::vector<uint64_t> prime_masks(primes.size());
  for (size_t i = 0; i < primes.size(); ++i)
    prime_masks[i] = prime_index_mask(moduli, primes[i]);

  std::vector<PoolEntry> pool;
  std::vector<uint64_t> current;
  uint64_t full = moduli.size() == 64 ? ~uint64_t{0} : (uint64_t{1} << moduli.size()) - 1;
  grow_pool(primes, prime_masks, cap, pool_cap, 0, 1, current, full, pool);
  std::sort(pool.begin(), pool.end(),
            [](const PoolEntry& a, const PoolEntry& b) { return a.value < b.value; });
  return pool;
}

bool shares_prime(const PoolEntry& e, const std::vector<uint64_t>& used) {
  for (uint64_t p : e.primes)
    if (std::find(used.begin(), used.end(), p) != used.end()) return true;
  return false;
}

void enumerate_vectors(const std::vector<PoolEntry>& pool, size_t slots, double cap,
                       uint64_t vector_cap, size_t slot, DivisorVector& cur, uint64_t prod,
                       std::vector<uint64_t>& used, std::vector<DivisorVector>& out) {
  if (slot == slots) {
    if (static_cast<long double>(prod) < static_cast<long double>(cap)) {
      if (out.size() >= vector_cap)
        throw ResourceError("support enumeration exceeds cap of " +
                            std::to_string(vector_cap) + " vectors");
      out.push_back(cur);
    }
    return;
  }
  cur[slot] = 1;
  enumerate_vectors(pool, slots, cap, vector_cap, slot + 1, cur, prod, used, out);
  for (const PoolEntry& e : pool) {
    unsigned __int128 next = static_cast<unsigned __int128>(prod) * e.value;
    if (static_cast<long double>(next) >= static_cast<long double>(cap)) break;
    if (!((e.index_mask >> slot) & 1)) continue;
    if (shares_prime(e, used)) continue;
    cur[slot] = e.value;
    used.insert(used.end(), e.primes.begin(), e.primes.end());
    enumerate_vectors(pool, slots, cap, vector_cap, slot + 1, cur, static_cast<uint64_t>(next),
                      used, out);
    used.resize(used.size() - e.primes.size());
  }
  cur[slot] = 1;
}

std::vector<DivisorVector> enumerate_lattice(const SieveContext& ctx,
                                             const std::vector<FactoredNat>& moduli,
                                             double cap, uint64_t vector_cap) {
  auto pool = make_pool(ctx, moduli, cap, vector_cap);
  std::vector<DivisorVector> out;
  DivisorVector cur(moduli.size(), 1);
  std::vector<uint64_t> used;
  enumerate_vectors(pool, moduli.size(), cap, vector_cap, 0, cur, 1, used, out);
  return out;
}

uint64_t phi_scalar(uint64_t squarefree) {
  uint64_t v = 1;
  for (const auto& [p, e] : factorize(squarefree).factors) {
    (void)e;
    v *= p - 1;
  }
  return v;
}

uint64_t phi_omega_scalar(const SieveContext& ctx, uint64_t squarefree) {
  uint64_t v = 1;
  for (const auto& [p, e] : factorize(squarefree).factors) {
    (void)e;
    v *= p - ctx.omega(p);
  }
  return v;
}

// Walk all componentwise divisors of `r` (components factored in `primes`),
// calling fn(divisor, scalar product, prime count).
template <typename Fn>
void walk_divisors(const std::vector<std::vector<uint64_t>>& primes, size_t slot,
                   DivisorVector& d, uint64_t prod, unsigned count, Fn&& fn) {
  if (slot == primes.size()) {
    fn(d, prod, count);
    return;
  }
  const auto& pl = primes[slot];
  for (uint64_t mask = 0; mask < (uint64_t{1} << pl.size()); ++mask) {
    uint64_t value = 1;
    unsigned bits = 0;
    for (size_t b = 0; b < pl.size(); ++b)
      if ((mask >> b) & 1) {
        value *= pl[b];
        ++bits;
      }
    d[slot] = value;
    walk_divisors(primes, slot + 1, d, prod * value, count + bits, fn);
  }
  d[slot] = 1;
}

std::vector<std::vector<uint64_t>> component_primes(const DivisorVector& r) {
  std::vector<std::vector<uint64_t>> out(r.size());
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0) throw std::domain_error("divisor components must be >= 1");
    if (r[i] == 1) continue;
    for (const auto& [p, e] : factorize(r[i]).factors) {
      if (e > 1) throw std::domain_error("divisor components must be squarefree here");
      out[i].push_back(p);
    }
  }
  return out;
}

bool divides_componentwise(const DivisorVector& d, const DivisorVector& r) {
  for (size_t i = 0; i < d.size(); ++i)
    if (r[i] % d[i] != 0) return false;
  return true;
}

// Sum of stored values over the cross product of per-index subset divisors,
// looked up in `index_of`.  Enumeration order is fixed by the hit lists.
double table_sum_over_hits(const std::vector<std::vector<uint64_t>>& hits, double cap,
                           const std::unordered_map<DivisorVector, size_t, DivisorVectorHash>&
                               index_of,
                           const std::vector<double>& values) {
  KahanSum<long double> acc;
  DivisorVector d(hits.size(), 1);
  auto rec = [&](auto&& self, size_t slot, uint64_t prod) -> void {
    if (slot == hits.size()) {
      auto it = index_of.find(d);
      if (it != index_of.end()) acc.add(values[it->second]);
      return;
    }
    const auto& pl = hits[slot];
    for (uint64_t mask = 0; mask < (uint64_t{1} << pl.size()); ++mask) {
      uint64_t value = 1;
      for (size_t b = 0; b < pl.size(); ++b)
        if ((mask >> b) & 1) value *= pl[b];
      unsigned __int128 next = static_cast<unsigned __int128>(prod) * value;
      if (static_cast<long double>(next) >= static_cast<long double>(cap)) continue;
      d[slot] = value;
      self(self, slot + 1, static_cast<uint64_t>(next));
    }
    d[slot] = 1;
  };
  rec(rec, 0, 1);
  return static_cast<double>(acc.value());
}

std::vector<uint64_t> divisor_hits(const std::vector<uint64_t>& primes, uint64_t value) {
  std::vector<uint64_t> out;
  for (uint64_t p : primes)
    if (value % p == 0) out.push_back(p);
  return out;
}

}  // namespace

std::vector<DivisorVector> enumerate_support(const SieveContext& ctx, uint64_t cap) {
  return enumerate_lattice(ctx, ctx.Wj, ctx.R, cap);
}

WeightTable build_weight_table(const SieveContext& ctx, const WeightTableOptions& opt) {
  WeightTable t;
  t.ctx = ctx;
  t.support = enumerate_lattice(ctx, ctx.Wj, ctx.R, opt.support_cap);
  t.index_of.reserve(t.support.size() * 2);
  for (size_t i = 0; i < t.support.size(); ++i) t.index_of.emplace(t.support[i], i);

  t.sing_series_WB = singular_series(ctx, ctx.WB, opt.series_pmax).value;
  t.prefactor = std::pow(ctx.WB_over_phi(), static_cast<double>(ctx.k()));

  const size_t n = t.support.size();
  t.y.resize(n);
  t.phi_omega.resize(n);
  std::vector<uint64_t> prod(n);
  std::vector<int> mu(n);
  const double logR = ctx.R > 1 ? std::log(ctx.R) : 0.0;
  SieveFunctionParams params(static_cast<unsigned>(ctx.k()));

  std::vector<std::vector<std::vector<uint64_t>>> comp_primes(n);
  for (size_t i = 0; i < n; ++i) {
    comp_primes[i] = component_primes(t.support[i]);
    uint64_t pr = 1, pw = 1;
    unsigned count = 0;
    for (const auto& pl : comp_primes[i])
      for (uint64_t p : pl) {
        pr *= p;
        pw *= p - ctx.omega(p);
        ++count;
      }
    prod[i] = pr;
    mu[i] = (count % 2 == 0) ? 1 : -1;
    t.phi_omega[i] = pw;

    std::vector<double> ts(ctx.k());
    for (size_t j = 0; j < ctx.k(); ++j)
      ts[j] = t.support[i][j] == 1 ? 0.0 : std::log(static_cast<double>(t.support[i][j])) / logR;
    t.y[i] = t.prefactor * t.sing_series_WB * eval_family(FamilyKind::F, ts, params);
  }

  // lambda(d) = mu(d) d sum_{d | r} y(r)/phi_omega(r): scatter each support
  // vector's contribution to its componentwise divisors (the support set is
  // divisor-closed).  Support order is lexicographic, so each accumulator
  // sees its terms in a fixed order.
  std::vector<KahanSum<long double>> cells(n);
  for (size_t i = 0; i < n; ++i) {
    double c = t.y[i] / static_cast<double>(t.phi_omega[i]);
    DivisorVector d(ctx.k(), 1);
    walk_divisors(comp_primes[i], 0, d, 1, 0,
                  [&](const DivisorVector& dv, uint64_t, unsigned) {
                    auto it = t.index_of.find(dv);
                    if (it == t.index_of.end())
                      throw std::logic_error("support set is not divisor-closed");
                    cells[it->second].add(c);
                  });
  }
  t.lambda.resize(n);
  for (size_t i = 0; i < n; ++i)
    t.lambda[i] = mu[i] * static_cast<double>(prod[i]) * static_cast<double>(cells[i].value());

  KahanSum<long double> abs_sum;
  for (size_t i = 0; i < n; ++i) abs_sum.add(std::abs(t.lambda[i]));
  t.abs_lambda_sum = static_cast<double>(abs_sum.value());

  t.index_primes.resize(ctx.k());
  for (uint64_t p : candidate_primes(ctx, ctx.R, opt.support_cap))
    for (size_t j = 0; j < ctx.k(); ++j)
      if (!ctx.Wj[j].contains_prime(p)) t.index_primes[j].push_back(p);
  return t;
}

double y_of_r(const WeightTable& t, const DivisorVector& r) {
  const SieveContext& ctx = t.ctx;
  if (r.size() != ctx.k()) throw std::domain_error("y_of_r: dimension mismatch");
  if (!(ctx.R > 1.0)) return 0.0;

  std::vector<uint64_t> seen;
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0) throw std::domain_error("y_of_r: components must be >= 1");
    if (r[i] == 1) continue;
    for (const auto& [p, e] : factorize(r[i]).factors) {
      if (e > 1) return 0.0;  // not squarefree
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) return 0.0;
      seen.push_back(p);
      if (ctx.Wj[i].contains_prime(p)) return 0.0;
    }
  }

  const double logR = std::log(ctx.R);
  SieveFunctionParams params(static_cast<unsigned>(ctx.k()));
  std::vector<double> ts(r.size());
  for (size_t i = 0; i < r.size(); ++i)
    ts[i] = r[i] == 1 ? 0.0 : std::log(static_cast<double>(r[i])) / logR;
  return t.prefactor * t.sing_series_WB * eval_family(FamilyKind::F, ts, params);
}

double lambda_of_d(const WeightTable& t, const DivisorVector& d) {
  if (d.size() != t.ctx.k()) throw std::domain_error("lambda_of_d: dimension mismatch");
  unsigned __int128 prod = 1;
  unsigned count = 0;
  std::vector<uint64_t> seen;
  for (uint64_t c : d) {
    if (c == 0) throw std::domain_error("lambda_of_d: components must be >= 1");
    prod *= c;
    if (c == 1) continue;
    for (const auto& [p, e] : factorize(c).factors) {
      if (e > 1) return 0.0;
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) return 0.0;
      seen.push_back(p);
      ++count;
    }
  }
  if (static_cast<long double>(prod) > static_cast<long double>(t.ctx.R)) return 0.0;

  KahanSum<long double> acc;
  for (size_t i = 0; i < t.support.size(); ++i)
    if (divides_componentwise(d, t.support[i]))
      acc.add(t.y[i] / static_cast<double>(t.phi_omega[i]));
  int mu_d = (count % 2 == 0) ? 1 : -1;
  return mu_d * static_cast<double>(static_cast<uint64_t>(prod)) *
         static_cast<double>(acc.value());
}

double invert_lambda(const WeightTable& t, const DivisorVector& r) {
  if (r.size() != t.ctx.k()) throw std::domain_error("invert_lambda: dimension mismatch");
  uint64_t prod = 1;
  for (uint64_t c : r) {
    if (c == 0) throw std::domain_error("invert_lambda: components must be >= 1");
    prod *= c;
  }
  int mu_r = mobius(prod);
  if (mu_r == 0) return 0.0;

  KahanSum<long double> acc;
  for (size_t i = 0; i < t.support.size(); ++i) {
    if (divides_componentwise(r, t.support[i])) {
      uint64_t dprod = 1;
      for (uint64_t c : t.support[i]) dprod *= c;
      acc.add(t.lambda[i] / static_cast<double>(dprod));
    }
  }
  return mu_r * static_cast<double>(phi_omega_scalar(t.ctx, prod)) *
         static_cast<double>(acc.value());
}

bool weight_zero_rule(const SieveContext& ctx, uint64_t n) {
  for (const auto& [p, e] : ctx.W.factors) {
    (void)e;
    for (uint64_t h : ctx.tuple.offsets)
      if ((n + h) % p == 0) return true;
  }
  return false;
}

double lambda_sum_from_hits(const WeightTable& t,
                            const std::vector<std::vector<uint64_t>>& hits) {
  return table_sum_over_hits(hits, t.ctx.R, t.index_of, t.lambda);
}

double weight_w(const WeightTable& t, uint64_t n) {
  if (n == 0) throw std::domain_error("weight_w: n must be >= 1");
  if (weight_zero_rule(t.ctx, n)) return 0.0;
  std::vector<std::vector<uint64_t>> hits(t.ctx.k());
  for (size_t i = 0; i < t.ctx.k(); ++i)
    hits[i] = divisor_hits(t.index_primes[i], n + t.ctx.tuple.offsets[i]);
  double s = lambda_sum_from_hits(t, hits);
  return s * s;
}

double h_correction(const SieveContext& ctx, uint64_t r_product,
                    std::span<const size_t> indices) {
  double v = 1.0;
  for (const auto& [p, e] : factorize(r_product).factors) {
    (void)e;
    for (size_t idx : indices)
      if (!ctx.Wj[idx].contains_prime(p)) v *= 1.0 - 1.0 / static_cast<double>(p);
  }
  return v;
}

MajorantTable build_majorant(const SieveContext& ctx, unsigned m,
                             std::span<const size_t> indices, double bar_y) {
  if (m == 0 || indices.size() != m) throw std::domain_error("build_majorant: need m >= 1 indices");
  for (size_t j = 0; j < m; ++j) {
    if (indices[j] >= ctx.k()) throw std::domain_error("build_majorant: index out of range");
    if (j && indices[j] <= indices[j - 1])
      throw std::domain_error("build_majorant: indices must be strictly increasing");
  }
  if (!(bar_y > 0)) throw std::domain_error("build_majorant: bar_y must be positive");
  if (!(ctx.R > 1.0))
    throw std::domain_error("build_majorant: R must exceed 1 so the trivial vector qualifies");

  MajorantTable maj;
  maj.ctx = ctx;
  maj.m = m;
  maj.indices.assign(indices.begin(), indices.end());
  maj.bar_y = bar_y;

  std::vector<FactoredNat> moduli;
  for (size_t idx : indices) moduli.push_back(ctx.Wj[idx]);
  const double cap = std::pow(ctx.R, 1.0 / 3.0);
  maj.support = enumerate_lattice(ctx, moduli, cap, 10'000'000);
  maj.index_of.reserve(maj.support.size() * 2);
  for (size_t i = 0; i < maj.support.size(); ++i) maj.index_of.emplace(maj.support[i], i);

  const size_t n = maj.support.size();
  std::vector<uint64_t> prod(n), phi(n);
  std::vector<int> mu(n);
  std::vector<std::vector<std::vector<uint64_t>>> comp_primes(n);
  for (size_t i = 0; i < n; ++i) {
    comp_primes[i] = component_primes(maj.support[i]);
    uint64_t pr = 1, ph = 1;
    unsigned count = 0;
    for (const auto& pl : comp_primes[i])
      for (uint64_t p : pl) {
        pr *= p;
        ph *= p - 1;
        ++count;
      }
    prod[i] = pr;
    phi[i] = ph;
    mu[i] = (count % 2 == 0) ? 1 : -1;
  }

  // tilde(e) = phi(e) mu(e) sum_{e | r0} bar_y / phi(r0), scattered over the
  // divisor-closed support like the lambda build.
  std::vector<KahanSum<long double>> cells(n);
  for (size_t i = 0; i < n; ++i) {
    double c = bar_y / static_cast<double>(phi[i]);
    DivisorVector d(m, 1);
    walk_divisors(comp_primes[i], 0, d, 1, 0,
                  [&](const DivisorVector& dv, uint64_t, unsigned) {
                    auto it = maj.index_of.find(dv);
                    if (it == maj.index_of.end())
                      throw std::logic_error("majorant support is not divisor-closed");
                    cells[it->second].add(c);
                  });
  }
  maj.tilde.resize(n);
  for (size_t i = 0; i < n; ++i)
    maj.tilde[i] = static_cast<double>(phi[i]) * mu[i] * static_cast<double>(cells[i].value());

  DivisorVector ones(m, 1);
  maj.tilde_one = maj.tilde[maj.index_of.at(ones)];

  maj.index_primes.resize(m);
  for (uint64_t p : candidate_primes(ctx, cap, 10'000'000))
    for (size_t j = 0; j < m; ++j)
      if (!ctx.Wj[indices[j]].contains_prime(p)) maj.index_primes[j].push_back(p);
  return maj;
}

double majorant_from_hits(const MajorantTable& maj,
                          const std::vector<std::vector<uint64_t>>& hits) {
  const double cap = std::pow(maj.ctx.R, 1.0 / 3.0);
  double s = table_sum_over_hits(hits, cap, maj.index_of, maj.tilde);
  double ratio = s / maj.tilde_one;
  return ratio * ratio;
}

double majorant_value(const MajorantTable& maj, uint64_t n) {
  if (n == 0) throw std::domain_error("majorant_value: n must be >= 1");
  std::vector<std::vector<uint64_t>> hits(maj.m);
  for (size_t j = 0; j < maj.m; ++j)
    hits[j] = divisor_hits(maj.index_primes[j], n + maj.ctx.tuple.offsets[maj.indices[j]]);
  return majorant_from_hits(maj, hits);
}

DerivedY derived_y(const WeightTable& t, const MajorantTable& maj, const DivisorVector& r,
                   const DivisorVector& r0, std::span<const size_t> indices,
                   uint64_t support_cap) {
  if (t.support.size() > support_cap)
    throw ResourceError("derived_y: verification-scale only (support " +
                        std::to_string(t.support.size()) + " > " +
                        std::to_string(support_cap) + ")");
  if (r.size() != t.ctx.k() || r0.size() != maj.m)
    throw std::domain_error("derived_y: dimension mismatch");
  for (size_t idx : indices)
    if (idx >= t.ctx.k() || r[idx] != 1)
      throw std::domain_error("derived_y: r must be 1 on the designated indices");

  uint64_t pr = 1, pr0 = 1;
  for (uint64_t c : r) pr *= c;
  for (uint64_t c : r0) pr0 *= c;

  DerivedY out{0.0, 0.0, 0.0};

  // mu(r0) phi(r0) sum_{r0 | e} tilde(e)/phi(e)
  {
    int mu_r0 = mobius(pr0);
    if (mu_r0 != 0) {
      KahanSum<long double> acc;
      for (size_t i = 0; i < maj.support.size(); ++i)
        if (divides_componentwise(r0, maj.support[i])) {
          uint64_t pe = 1;
          for (uint64_t c : maj.support[i]) pe *= c;
          acc.add(maj.tilde[i] / static_cast<double>(phi_scalar(pe)));
        }
      out.r0_val = mu_r0 * static_cast<double>(phi_scalar(pr0)) *
                   static_cast<double>(acc.value());
    }
  }

  // mu(r) phi_omega(r) sum_{r | d, d = 1 on the indices} lambda(d)/phi(d)
  {
    int mu_r = mobius(pr);
    if (mu_r != 0) {
      KahanSum<long double> acc;
      for (size_t i = 0; i < t.support.size(); ++i) {
        const DivisorVector& d = t.support[i];
        bool fixed = true;
        for (size_t idx : indices)
          if (d[idx] != 1) {
            fixed = false;
            break;
          }
        if (!fixed || !divides_componentwise(r, d)) continue;
        uint64_t pd = 1;
        for (uint64_t c : d) pd *= c;
        acc.add(t.lambda[i] / static_cast<double>(phi_scalar(pd)));
      }
      out.m_val = mu_r * static_cast<double>(phi_omega_scalar(t.ctx, pr)) *
                  static_cast<double>(acc.value());
    }
  }

  // mu(r r0) phi_omega(r r0) sum over coprime pairs of divisor vectors
  {
    int mu_joint = mobius(pr) != 0 && mobius(pr0) != 0 && std::gcd(pr, pr0) == 1
                       ? mobius(pr) * mobius(pr0)
                       : 0;
    if (mu_joint != 0) {
      KahanSum<long double> acc;
      for (size_t i = 0; i < t.support.size(); ++i) {
        const DivisorVector& d = t.support[i];
        bool fixed = true;
        for (size_t idx : indices)
          if (d[idx] != 1) {
            fixed = false;
            break;
          }
        if (!fixed || !divides_componentwise(r, d)) continue;
        uint64_t pd = 1;
        for (uint64_t c : d) pd *= c;
        double phi_d = static_cast<double>(phi_scalar(pd));
        for (size_t j = 0; j < maj.support.size(); ++j) {
          if (!divides_componentwise(r0, maj.support[j])) continue;
          uint64_t pe = 1;
          for (uint64_t c : maj.support[j]) pe *= c;
          if (std::gcd(pd, pe) != 1) continue;
          acc.add(t.lambda[i] * maj.tilde[j] /
                  (phi_d * static_cast<double>(phi_scalar(pe))));
        }
      }
      out.joint = mu_joint * static_cast<double>(phi_omega_scalar(t.ctx, pr * pr0)) *
                  static_cast<double>(acc.value());
    }
  }
  return out;
}

}  // namespace sievelab
