#include <cmath>
#include <set>

#include "doctest.h"
#include "sievelab/tuple.hpp"

using namespace sievelab;

namespace {

// Residue-coverage oracle: admissible iff no prime p <= bound has all its
// classes covered by the offsets.
bool admissible_brute(const std::vector<uint64_t>& offsets, uint64_t p_bound) {
  for (uint64_t p : primes_up_to(p_bound)) {
    std::set<uint64_t> classes;
    for (uint64_t h : offsets) classes.insert(h % p);
    if (classes.size() == p) return false;
  }
  return true;
}

// Count n in 1..p with p | prod (n + h_i), by direct evaluation.
uint64_t omega_brute(const std::vector<uint64_t>& offsets, uint64_t p) {
  uint64_t count = 0;
  for (uint64_t n = 1; n <= p; ++n) {
    bool zero = false;
    for (uint64_t h : offsets)
      if ((n + h) % p == 0) {
        zero = true;
        break;
      }
    if (zero) ++count;
  }
  return count;
}

SieveContext ctx_for(std::vector<uint64_t> offsets, uint64_t B = 1) {
  return build_context(offsets, factorize(B), 1.0 / 3.0, 1'000'000);
}

}  // namespace

TEST_SUITE("tuple") {

TEST_CASE("check_admissible examples") {
  CHECK(check_admissible(std::vector<uint64_t>{0, 2, 6}));
  CHECK(!check_admissible(std::vector<uint64_t>{0, 2, 4}));
  CHECK(check_admissible(std::vector<uint64_t>{0}));
  CHECK_THROWS_AS(check_admissible(std::vector<uint64_t>{}), std::domain_error);
  CHECK_THROWS_AS(check_admissible(std::vector<uint64_t>{2, 2}), std::domain_error);
}

TEST_CASE("check_admissible matches brute force for all small tuples") {
  // all tuples of size <= 4 drawn from {0,...,20}
  std::vector<uint64_t> pool(21);
  for (uint64_t i = 0; i <= 20; ++i) pool[i] = i;
  uint64_t checked = 0;
  for (size_t a = 0; a < pool.size(); ++a) {
    CHECK(check_admissible(std::vector<uint64_t>{pool[a]}) ==
          admissible_brute({pool[a]}, 23));
    ++checked;
    for (size_t b = a + 1; b < pool.size(); ++b) {
      CHECK(check_admissible(std::vector<uint64_t>{pool[a], pool[b]}) ==
            admissible_brute({pool[a], pool[b]}, 23));
      ++checked;
      for (size_t c = b + 1; c < pool.size(); ++c) {
        CHECK(check_admissible(std::vector<uint64_t>{pool[a], pool[b], pool[c]}) ==
              admissible_brute({pool[a], pool[b], pool[c]}, 23));
        ++checked;
        for (size_t d = c + 1; d < pool.size(); ++d) {
          CHECK(check_admissible(std::vector<uint64_t>{pool[a], pool[b], pool[c], pool[d]}) ==
                admissible_brute({pool[a], pool[b], pool[c], pool[d]}, 23));
          ++checked;
        }
      }
    }
  }
  CHECK(checked == 21 + 210 + 1330 + 5985);
}

TEST_CASE("omega examples for {0,2,6}") {
  SieveContext ctx = ctx_for({0, 2, 6});
  CHECK(ctx.omega(2) == 1);
  CHECK(ctx.omega(3) == 2);
  CHECK(ctx.omega(5) == 3);
}

TEST_CASE("omega matches brute force for p <= 1000") {
  for (auto offsets : {std::vector<uint64_t>{0, 2, 6}, std::vector<uint64_t>{0, 2, 60},
                       std::vector<uint64_t>{0, 4, 6, 10}, std::vector<uint64_t>{0}}) {
    SieveContext ctx = ctx_for(offsets);
    for (uint64_t p : primes_up_to(1000)) CHECK(ctx.omega(p) == omega_brute(offsets, p));
  }
}

TEST_CASE("omega is 0 on primes dividing B") {
  SieveContext ctx = ctx_for({0, 2, 6}, 7);
  CHECK(ctx.omega(7) == 0);
  CHECK(!ctx.W.contains_prime(7));
  CHECK(ctx.W.to_uint64_checked() == 510510 / 7);
  CHECK(ctx.omega(29) == omega_brute({0, 2, 6}, 29));
}

TEST_CASE("omega equals k past the largest difference") {
  std::vector<uint64_t> offsets{0, 2, 6};
  SieveContext ctx = ctx_for(offsets);
  uint64_t largest_diff = 6;
  uint64_t count = 0;
  for (uint64_t p : primes_up_to(1000)) {
    if (p <= largest_diff) continue;
    CHECK(ctx.omega(p) == offsets.size());
    if (++count >= 100) break;
  }
  CHECK(count == 100);
}

TEST_CASE("chosen indices for {0,2,60} at p=29") {
  SieveContext ctx = ctx_for({0, 2, 60});
  auto table = chosen_indices(ctx, 29);
  REQUIRE(table.size() == 2);
  CHECK(table[0] == std::pair<uint64_t, size_t>{27, 1});  // n+2 and n+60 vanish; smallest is i=2
  CHECK(table[1] == std::pair<uint64_t, size_t>{29, 0});
}

TEST_CASE("chosen indices are distinct and reject p | WB") {
  SieveContext ctx = ctx_for({0, 2, 6});
  CHECK_THROWS_AS(chosen_indices(ctx, 7), std::domain_error);
  for (uint64_t p : {19ull, 23ull, 101ull}) {
    auto table = chosen_indices(ctx, p);
    CHECK(table.size() == ctx.omega(p));
    std::set<size_t> indices;
    for (auto [r, j] : table) {
      CHECK(r >= 1);
      CHECK(r <= p);
      indices.insert(j);
    }
    CHECK(indices.size() == table.size());
  }
}

TEST_CASE("full local count means the index map is a bijection") {
  SieveContext ctx = ctx_for({0, 2, 6});
  auto table = chosen_indices(ctx, 101);  // omega = k here
  REQUIRE(table.size() == 3);
  std::set<size_t> seen;
  for (auto [r, j] : table) seen.insert(j);
  CHECK(seen == std::set<size_t>{0, 1, 2});
}

TEST_CASE("build_context computes W") {
  SieveContext ctx = ctx_for({0, 2});
  CHECK(ctx.W.to_uint64_checked() == 210);  // primes up to 2k^2 = 8
  CHECK(ctx.WB.to_uint64_checked() == 210);
  SieveContext ctx6 = ctx_for({0, 2, 6});
  CHECK(ctx6.W.to_uint64_checked() == 510510);
}

TEST_CASE("W excludes the primes of B") {
  SieveContext ctx = build_context(std::vector<uint64_t>{0, 2}, factorize(5), 1.0 / 3.0, 100);
  CHECK(ctx.W.to_uint64_checked() == 42);  // 2*3*7
  CHECK(ctx.WB.to_uint64_checked() == 210);
}

TEST_CASE("index moduli stay at WB when all difference primes are small") {
  SieveContext ctx = ctx_for({0, 2, 6});
  CHECK(ctx.bad_primes.empty());
  for (const auto& w : ctx.Wj) CHECK(w == ctx.WB);
}

TEST_CASE("index moduli pick up collision primes") {
  SieveContext ctx = ctx_for({0, 2, 60});
  REQUIRE(ctx.bad_primes.size() == 1);
  CHECK(ctx.bad_primes[0].p == 29);
  CHECK(ctx.Wj[0] == ctx.WB);
  CHECK(ctx.Wj[1] == ctx.WB);
  CHECK(ctx.Wj[2] == ctx.WB.times(FactoredNat::prime(29)));
}

TEST_CASE("each collision prime divides exactly k - omega(p) of the moduli") {
  for (auto offsets : {std::vector<uint64_t>{0, 2, 60}, std::vector<uint64_t>{0, 58, 174},
                       std::vector<uint64_t>{0, 6, 30, 210}}) {
    SieveContext ctx = ctx_for(offsets);
    for (const auto& b : ctx.bad_primes) {
      size_t dividing = 0;
      for (const auto& w : ctx.Wj)
        if (w.contains_prime(b.p)) ++dividing;
      CHECK(dividing == ctx.k() - ctx.omega(b.p));
    }
  }
}

TEST_CASE("build_context validates input") {
  CHECK_THROWS_AS(ctx_for({0, 2, 4}), std::domain_error);
  CHECK_THROWS_AS(build_context(std::vector<uint64_t>{0, 2}, FactoredNat::one(), 0.0, 100),
                  std::domain_error);
  CHECK_THROWS_AS(build_context(std::vector<uint64_t>{0, 2}, FactoredNat::one(), 1.0, 100),
                  std::domain_error);
  CHECK_THROWS_AS(build_context_with_R(std::vector<uint64_t>{0, 2}, FactoredNat::one(), 0.0, 100),
                  std::domain_error);
}

TEST_CASE("R defaults to x^(theta/3)") {
  SieveContext ctx = build_context(std::vector<uint64_t>{0, 2}, FactoredNat::one(), 0.9, 512);
  CHECK(ctx.R == doctest::Approx(std::pow(512.0, 0.3)).epsilon(1e-12));
  SieveContext fixed = build_context_with_R(std::vector<uint64_t>{0, 2}, FactoredNat::one(),
                                            50.0, 512);
  CHECK(fixed.R == 50.0);
}

TEST_CASE("derived moduli examples") {
  {
    SieveContext ctx = ctx_for({0, 2, 6});
    std::vector<size_t> idx{0, 1};
    DerivedModuli dm = derived_moduli(ctx, idx);
    // gcd(0-6, 2-6) = 2 already divides W, so nothing changes
    CHECK(dm.Wprime[2] == ctx.Wj[2].radical());
    CHECK(dm.Delta.to_uint64_checked() == 2);
  }
  {
    SieveContext ctx = ctx_for({0, 2, 60});
    std::vector<size_t> idx{0, 1};
    DerivedModuli dm = derived_moduli(ctx, idx);
    CHECK(dm.Delta.to_uint64_checked() == 2);  // gcd(60, 58)
    CHECK(dm.Wprime[2] == ctx.Wj[2].radical());
  }
  {
    // a gcd carrying a genuinely new prime enlarges the sharpened modulus
    SieveContext ctx = ctx_for({0, 58, 174});
    std::vector<size_t> idx{1, 2};
    DerivedModuli dm = derived_moduli(ctx, idx);
    CHECK(dm.Delta.to_uint64_checked() == 58);  // gcd(58, 174) = 2*29
    CHECK(dm.Wprime[0] == ctx.Wj[0].radical().times(FactoredNat::prime(29)));
    CHECK(!ctx.Wj[0].contains_prime(29));
  }
  {
    // a collision prime enters the sharpened modulus of another index
    SieveContext ctx = ctx_for({0, 2, 60});
    std::vector<size_t> idx{1, 2};  // differences against i=0: gcd(2, 60) = 2
    DerivedModuli dm = derived_moduli(ctx, idx);
    CHECK(dm.Delta.to_uint64_checked() == 2);
    CHECK(dm.Wprime[0] == ctx.Wj[0].radical());
  }
}

TEST_CASE("derived moduli validation") {
  SieveContext ctx = ctx_for({0, 2, 6});
  std::vector<size_t> too_many{0, 1, 2, 3};
  CHECK_THROWS_AS(derived_moduli(ctx, too_many), std::domain_error);
  std::vector<size_t> unordered{1, 0};
  CHECK_THROWS_AS(derived_moduli(ctx, unordered), std::domain_error);
  std::vector<size_t> none{};
  CHECK_THROWS_AS(derived_moduli(ctx, none), std::domain_error);
}

}  // TEST_SUITE
