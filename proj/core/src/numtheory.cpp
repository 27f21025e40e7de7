#include "sievelab/numtheory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace sievelab {

uint64_t isqrt64(uint64_t n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n && (r + 1) != 0) ++r;
  return r;
}

FactoredNat FactoredNat::prime(uint64_t p, uint32_t e) {
  if (p < 2 || e == 0) throw std::domain_error("FactoredNat::prime: need p >= 2, e >= 1");
  FactoredNat f;
  f.factors.emplace_back(p, e);
  return f;
}

bool FactoredNat::contains_prime(uint64_t p) const {
  auto it = std::lower_bound(factors.begin(), factors.end(), p,
                             [](const auto& pe, uint64_t q) { return pe.first < q; });
  return it != factors.end() && it->first == p;
}

uint32_t FactoredNat::exponent_of(uint64_t p) const {
  auto it = std::lower_bound(factors.begin(), factors.end(), p,
                             [](const auto& pe, uint64_t q) { return pe.first < q; });
  return (it != factors.end() && it->first == p) ? it->second : 0;
}

uint64_t FactoredNat::largest_prime() const {
  return factors.empty() ? 1 : factors.back().first;
}

double FactoredNat::to_double() const {
  double v = 1.0;
  for (const auto& [p, e] : factors) v *= std::pow(static_cast<double>(p), e);
  return v;
}

std::optional<uint64_t> FactoredNat::to_uint64() const {
  uint64_t v = 1;
  for (const auto& [p, e] : factors) {
    for (uint32_t i = 0; i < e; ++i) {
      if (v > std::numeric_limits<uint64_t>::max() / p) return std::nullopt;
      v *= p;
    }
  }
  return v;
}

uint64_t FactoredNat::to_uint64_checked() const {
  auto v = to_uint64();
  if (!v) throw std::overflow_error("FactoredNat: value exceeds 64 bits");
  return *v;
}

double FactoredNat::n_over_phi() const {
  double v = 1.0;
  for (const auto& [p, e] : factors) {
    (void)e;
    v *= static_cast<double>(p) / static_cast<double>(p - 1);
  }
  return v;
}

FactoredNat FactoredNat::times(const FactoredNat& other) const {
  FactoredNat out;
  out.factors.reserve(factors.size() + other.factors.size());
  size_t i = 0, j = 0;
  while (i < factors.size() || j < other.factors.size()) {
    if (j == other.factors.size() ||
        (i < factors.size() && factors[i].first < other.factors[j].first)) {
      out.factors.push_back(factors[i++]);
    } else if (i == factors.size() || other.factors[j].first < factors[i].first) {
      out.factors.push_back(other.factors[j++]);
    } else {
      out.factors.emplace_back(factors[i].first, factors[i].second + other.factors[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

FactoredNat FactoredNat::radical() const {
  FactoredNat out;
  out.factors.reserve(factors.size());
  for (const auto& [p, e] : factors) {
    (void)e;
    out.factors.emplace_back(p, 1);
  }
  return out;
}

std::string FactoredNat::to_string() const {
  if (factors.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) s += "*";
    s += std::to_string(factors[i].first);
    if (factors[i].second > 1) {
      s += "^";
      s += std::to_string(factors[i].second);
    }
  }
  return s;
}

FactoredNat gcd(const FactoredNat& a, const FactoredNat& b) {
  FactoredNat out;
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    if (a.factors[i].first < b.factors[j].first) {
      ++i;
    } else if (b.factors[j].first < a.factors[i].first) {
      ++j;
    } else {
      out.factors.emplace_back(a.factors[i].first,
                               std::min(a.factors[i].second, b.factors[j].second));
      ++i;
      ++j;
    }
  }
  return out;
}

FactoredNat lcm(const FactoredNat& a, const FactoredNat& b) {
  FactoredNat out;
  size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() ||
        (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first) {
      out.factors.push_back(b.factors[j++]);
    } else {
      out.factors.emplace_back(a.factors[i].first,
                               std::max(a.factors[i].second, b.factors[j].second));
      ++i;
      ++j;
    }
  }
  return out;
}

std::vector<uint64_t> primes_up_to(uint64_t limit) {
  std::vector<uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<uint8_t> mark(limit + 1, 1);
  mark[0] = mark[1] = 0;
  for (uint64_t i = 2; i * i <= limit; ++i)
    if (mark[i])
      for (uint64_t j = i * i; j <= limit; j += i) mark[j] = 0;
  for (uint64_t i = 2; i <= limit; ++i)
    if (mark[i]) primes.push_back(i);
  return primes;
}

PrimalityRange::PrimalityRange(uint64_t lo, uint64_t hi, std::vector<uint64_t> bits)
    : lo_(lo), hi_(hi), bits_(std::move(bits)) {
  if (hi_ <= lo_) throw std::domain_error("PrimalityRange: need hi > lo");
}

bool PrimalityRange::is_prime(uint64_t n) const {
  if (n <= lo_ || n > hi_) throw std::domain_error("PrimalityRange::is_prime: n outside (lo, hi]");
  uint64_t idx = n - lo_ - 1;
  return (bits_[idx >> 6] >> (idx & 63)) & 1;
}

uint64_t PrimalityRange::count() const {
  uint64_t c = 0;
  for (uint64_t w : bits_) c += static_cast<uint64_t>(std::popcount(w));
  return c;
}

PrimalityRange prime_range(uint64_t lo, uint64_t hi, const SieveOptions& opt) {
  if (hi <= lo) throw std::domain_error("prime_range: need hi > lo");
  uint64_t span = hi - lo;
  if (span > opt.max_span)
    throw ResourceError("prime_range: span " + std::to_string(span) +
                        " exceeds configured budget " + std::to_string(opt.max_span));

  std::vector<uint64_t> bits((span + 63) / 64, ~uint64_t{0});
  // Clear the spare high bits so count() is exact.
  if (span % 64) bits.back() = (uint64_t{1} << (span % 64)) - 1;

  auto clear = [&](uint64_t n) {
    uint64_t idx = n - lo - 1;
    bits[idx >> 6] &= ~(uint64_t{1} << (idx & 63));
  };

  for (uint64_t n = lo + 1; n <= hi && n < 2; ++n) clear(n);  // 0 and 1

  const auto base = primes_up_to(isqrt64(hi));
  const uint64_t seg = std::max<uint64_t>(opt.segment_size, 64);
  for (uint64_t seg_lo = lo + 1; seg_lo <= hi; seg_lo += seg) {
    uint64_t seg_hi = std::min(hi, seg_lo + seg - 1);
    for (uint64_t p : base) {
      if (p * p > seg_hi) break;
      uint64_t start = std::max(p * p, ((seg_lo + p - 1) / p) * p);
      for (uint64_t n = start; n <= seg_hi; n += p) clear(n);
    }
  }
  return PrimalityRange(lo, hi, std::move(bits));
}

void for_each_prime(uint64_t lo, uint64_t hi, const std::function<void(uint64_t)>& fn,
                    const SieveOptions& opt) {
  if (hi <= lo) return;
  const uint64_t seg = std::max<uint64_t>(opt.segment_size, 64);
  for (uint64_t seg_lo = lo; seg_lo < hi; seg_lo += seg) {
    uint64_t seg_hi = std::min(hi, seg_lo + seg);
    PrimalityRange r = prime_range(seg_lo, seg_hi, opt);
    for (uint64_t n = seg_lo + 1; n <= seg_hi; ++n)
      if (r.is_prime(n)) fn(n);
  }
}

FactoredNat factorize(uint64_t n) {
  if (n == 0) throw std::domain_error("factorize: n must be >= 1");
  FactoredNat out;
  auto strip = [&](uint64_t p) {
    uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.factors.emplace_back(p, e);
  };
  strip(2);
  strip(3);
  for (uint64_t p = 5; p * p <= n; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (n > 1) out.factors.emplace_back(n, 1);
  return out;
}

int mobius(uint64_t n) {
  if (n == 0) throw std::domain_error("mobius: n must be >= 1");
  FactoredNat f = factorize(n);
  for (const auto& [p, e] : f.factors)
    if (e > 1) return 0;
  return (f.factors.size() % 2 == 0) ? 1 : -1;
}

bool is_squarefree(uint64_t n) { return mobius(n) != 0; }

uint64_t totient(uint64_t n) {
  if (n == 0) throw std::domain_error("totient: n must be >= 1");
  uint64_t v = n;
  for (const auto& [p, e] : factorize(n).factors) {
    (void)e;
    v -= v / p;
  }
  return v;
}

FactoredNat totient_factored(const FactoredNat& n) {
  FactoredNat out;
  for (const auto& [p, e] : n.factors) {
    if (e > 1) out = out.times(FactoredNat::prime(p, e - 1));
    if (p > 2) out = out.times(factorize(p - 1));
  }
  return out;
}

std::pair<FactoredNat, FactoredNat> vec_gcd_lcm(std::span<const uint64_t> d,
                                                std::span<const uint64_t> e) {
  if (d.size() != e.size()) throw std::domain_error("vec_gcd_lcm: length mismatch");
  FactoredNat g, l;
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0 || e[i] == 0) throw std::domain_error("vec_gcd_lcm: components must be >= 1");
    FactoredNat fd = factorize(d[i]);
    FactoredNat fe = factorize(e[i]);
    g = g.times(gcd(fd, fe));
    l = l.times(lcm(fd, fe));
  }
  return {g, l};
}

}  // namespace sievelab
