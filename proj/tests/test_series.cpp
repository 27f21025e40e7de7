#include <algorithm>
#include <cmath>
#include <utility>

#include "doctest.h"
#include "sievelab/kahan.hpp"
#include "sievelab/series.hpp"

using namespace sievelab;

namespace {

SieveContext ctx_for(std::vector<uint64_t> offsets, uint64_t B = 1) {
  return build_context(offsets, factorize(B), 1.0 / 3.0, 1'000'000);
}

// Independent truncation oracle: accumulate the literal factors.
double series_oracle(const SieveContext& ctx, uint64_t D, uint64_t p_max) {
  KahanSum<long double> ls;
  FactoredNat Df = factorize(D);
  for_each_prime(1, p_max, [&](uint64_t p) {
    if (Df.contains_prime(p)) return;
    double om = static_cast<double>(ctx.omega(p));
    double k = static_cast<double>(ctx.k());
    ls.add(std::log(1.0 - om / p) - k * std::log(1.0 - 1.0 / p));
  });
  return static_cast<double>(std::exp(ls.value()));
}

}  // namespace

TEST_SUITE("series") {

TEST_CASE("k = 1 telescopes to exactly 1") {
  SieveContext ctx = ctx_for({0});
  for (uint64_t pmax : {100ull, 10'000ull}) {
    EulerProductResult r = singular_series(ctx, FactoredNat::one(), pmax);
    CHECK(r.value == 1.0);
    CHECK(r.tail_bound > 0.0);
  }
}

TEST_CASE("twin value approaches twice the twin prime constant") {
  SieveContext ctx = ctx_for({0, 2});
  EulerProductResult r = singular_series(ctx, FactoredNat::one(), 1'000'000);
  CHECK(r.value == doctest::Approx(1.3203236316).epsilon(1e-6));
  CHECK(r.value == doctest::Approx(series_oracle(ctx, 1, 1'000'000)).epsilon(1e-12));
}

TEST_CASE("nested truncations agree within the reported tail bound") {
  for (auto offsets : {std::vector<uint64_t>{0, 2}, std::vector<uint64_t>{0, 2, 6},
                       std::vector<uint64_t>{0, 4, 6}, std::vector<uint64_t>{0, 2, 60},
                       std::vector<uint64_t>{0, 6, 12, 30}}) {
    SieveContext ctx = ctx_for(offsets);
    EulerProductResult lo = singular_series(ctx, FactoredNat::one(), 100'000);
    EulerProductResult hi = singular_series(ctx, FactoredNat::one(), 1'000'000);
    CHECK(std::abs(std::log(lo.value) - std::log(hi.value)) <= lo.tail_bound);
    CHECK(hi.tail_bound < lo.tail_bound);
  }
}

TEST_CASE("positivity and the exact-count tail regime") {
  SieveContext ctx = ctx_for({0, 2, 6});
  EulerProductResult r = singular_series(ctx, ctx.WB, 10'000);
  CHECK(r.value > 0.0);
  // past the largest difference the factor is (1 - k/p)(1 - 1/p)^(-k)
  double k = 3.0;
  for (uint64_t p : {101ull, 257ull, 1009ull}) {
    double expect = (1.0 - k / p) * std::pow(1.0 - 1.0 / p, -k);
    double direct = (1.0 - static_cast<double>(ctx.omega(p)) / p) * std::pow(1.0 - 1.0 / p, -k);
    CHECK(direct == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("per-factor tail inequality for the singular series") {
  // |log (1 - k/p)(1 - 1/p)^(-k)| <= k^2/p^2 once p > 2k^2
  for (unsigned k = 2; k <= 8; ++k) {
    uint64_t from = 2 * k * k;
    for_each_prime(from, 100'000, [&](uint64_t p) {
      double lf = std::log1p(-static_cast<double>(k) / p) -
                  static_cast<double>(k) * std::log1p(-1.0 / p);
      CHECK(std::abs(lf) <= static_cast<double>(k) * k / (static_cast<double>(p) * p));
    });
  }
}

TEST_CASE("per-factor tail inequality for the index product") {
  // |log (1 + m/(p-1))(1 - 1/p)^m| <= 4 m^2/p^2 in the exact regime
  for (unsigned m = 1; m <= 4; ++m) {
    uint64_t from = 2 * (m + 1) * (m + 1);
    for_each_prime(from, 100'000, [&](uint64_t p) {
      double lf = std::log1p(static_cast<double>(m) / (p - 1)) +
                  static_cast<double>(m) * std::log1p(-1.0 / p);
      CHECK(std::abs(lf) <= 4.0 * m * m / (static_cast<double>(p) * p));
    });
  }
}

TEST_CASE("prime reciprocal-square tail bound") {
  // sum_{p > P} p^-2 < 1/(P log P), checked against a long partial sum plus
  // an integral remainder for the part beyond 10^7.
  for (uint64_t P : {100ull, 1000ull, 10'000ull}) {
    KahanSum<long double> s;
    for_each_prime(P, 10'000'000, [&](uint64_t p) {
      s.add(1.0 / (static_cast<double>(p) * static_cast<double>(p)));
    });
    double beyond = 1.0 / (1e7 * std::log(1e7));
    CHECK(static_cast<double>(s.value()) + beyond <
          1.0 / (static_cast<double>(P) * std::log(static_cast<double>(P))));
  }
}

TEST_CASE("truncation below the exact regime is rejected") {
  SieveContext ctx = ctx_for({0, 2, 60});  // collision prime 29
  CHECK_THROWS_AS(singular_series(ctx, FactoredNat::one(), 23), std::domain_error);
  std::vector<size_t> idx{0};
  CHECK_THROWS_AS(p_product(ctx, idx, 23), std::domain_error);
  CHECK(singular_series(ctx, FactoredNat::one(), 29).value > 0.0);
}

TEST_CASE("index product is exactly 1 for m = 1") {
  // each factor (1 + 1/(p-1))(1 - 1/p) collapses algebraically
  SieveContext ctx = ctx_for({0, 2, 6});
  for (size_t i = 0; i < 3; ++i) {
    std::vector<size_t> idx{i};
    EulerProductResult r = p_product(ctx, idx, 100'000);
    CHECK(r.value == 1.0);
  }
  SieveContext shifted = ctx_for({0, 2, 60});
  std::vector<size_t> idx{2};  // the modulus carrying 29
  CHECK(p_product(shifted, idx, 100'000).value == 1.0);
}

TEST_CASE("index product shifts with the collision prime at m = 2") {
  SieveContext ctx = ctx_for({0, 2, 60});
  std::vector<size_t> both_clean{0, 1};
  std::vector<size_t> with_shifted{0, 2};
  double p_clean = p_product(ctx, both_clean, 100'000).value;
  double p_shift = p_product(ctx, with_shifted, 100'000).value;
  CHECK(p_clean != doctest::Approx(p_shift).epsilon(1e-6));

  // factor-by-factor oracle
  auto oracle = [&](const std::vector<size_t>& idx) {
    KahanSum<long double> ls;
    for_each_prime(1, 100'000, [&](uint64_t p) {
      if (ctx.divides_WB(p)) return;
      unsigned n_p = 0;
      for (size_t i : idx)
        if (!ctx.Wj[i].contains_prime(p)) ++n_p;
      if (n_p == 0) return;
      ls.add(std::log(1.0 + static_cast<double>(n_p) / (p - 1)) +
             2.0 * std::log(1.0 - 1.0 / p));
    });
    return static_cast<double>(std::exp(ls.value()));
  };
  CHECK(p_clean == doctest::Approx(oracle(both_clean)).epsilon(1e-10));
  CHECK(p_shift == doctest::Approx(oracle(with_shifted)).epsilon(1e-10));
}

TEST_CASE("r-dependent variant drops primes dividing r") {
  SieveContext ctx = ctx_for({0, 2, 60});
  std::vector<size_t> idx{0, 1};
  EulerProductResult base = p_product_with_r(ctx, idx, 1, 100'000);
  CHECK(base.value == doctest::Approx(p_product(ctx, idx, 100'000).value).epsilon(1e-12));
  // r divisible by 23 removes that factor entirely
  EulerProductResult dropped = p_product_with_r(ctx, idx, 23, 100'000);
  double factor23 = (1.0 + 2.0 / 22.0) * std::pow(1.0 - 1.0 / 23.0, 2.0);
  CHECK(dropped.value == doctest::Approx(base.value / factor23).epsilon(1e-10));
  CHECK_THROWS_AS(p_product_with_r(ctx, idx, 0, 100'000), std::domain_error);
}

TEST_CASE("bar_y closed form at m = 1") {
  SieveContext ctx = ctx_for({0, 2, 6});
  std::vector<size_t> idx{0};
  double expect = 3.0 * ctx.WB_over_phi();  // P = 1 and W_1 = WB
  CHECK(bar_y(ctx, idx, 100'000) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(bar_y(ctx, idx, 100'000) > 0.0);
}

TEST_CASE("bar_y is invariant under index permutation") {
  SieveContext ctx = ctx_for({0, 2, 60});
  std::vector<size_t> a{0, 2}, b{2, 0};
  CHECK(bar_y(ctx, a, 100'000) == doctest::Approx(bar_y(ctx, b, 100'000)).epsilon(1e-14));
}

TEST_CASE("bar_y at m = 2 stays within a fitted band of the gcd-lcm form") {
  // the closed comparison value (gcd/phi(gcd)) * (lcm/phi(lcm))
  std::vector<double> ratios;
  for (auto [offsets, idx] :
       {std::pair<std::vector<uint64_t>, std::vector<size_t>>{{0, 2, 6}, {0, 1}},
        std::pair<std::vector<uint64_t>, std::vector<size_t>>{{0, 2, 60}, {0, 1}},
        std::pair<std::vector<uint64_t>, std::vector<size_t>>{{0, 2, 60}, {0, 2}},
        std::pair<std::vector<uint64_t>, std::vector<size_t>>{{0, 58, 174}, {1, 2}}}) {
    SieveContext ctx = ctx_for(offsets);
    FactoredNat g = gcd(ctx.Wj[idx[0]], ctx.Wj[idx[1]]);
    FactoredNat l = lcm(ctx.Wj[idx[0]], ctx.Wj[idx[1]]);
    double closed = g.n_over_phi() * l.n_over_phi();
    double by = bar_y(ctx, idx, 100'000);
    CHECK(by > 0.0);
    ratios.push_back(by / closed);
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi / lo < 1.5);  // a single constant covers every case
}

}  // TEST_SUITE
