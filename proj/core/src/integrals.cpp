#include "sievelab/integrals.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/kahan.hpp"

namespace sievelab {

namespace {

// Gauss-Kronrod (7,15) on [-1,1].
constexpr double kKNodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
constexpr double kKWeights[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292,
};
// Gauss-7 weights at kKNodes indices 0, 2, 4, 6.
constexpr double kGWeights[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct GKResult {
  double kronrod;
  double err;
};

GKResult gk15(const std::function<double(double)>& f, double a, double b, uint64_t* evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk = 0.0, fg = 0.0;
  {
    double v = f(c);
    fk += v * kKWeights[0];
    fg += v * kGWeights[0];
  }
  for (int i = 1; i < 8; ++i) {
    double v1 = f(c - h * kKNodes[i]);
    double v2 = f(c + h * kKNodes[i]);
    fk += (v1 + v2) * kKWeights[i];
    if (i % 2 == 0) fg += (v1 + v2) * kGWeights[i / 2];
  }
  if (evals) *evals += 15;
  return {fk * h, std::abs(fk - fg) * h};
}

void adaptive_rec(const std::function<double(double)>& f, double a, double b, double tol,
                  int depth, KahanSum<long double>& acc, uint64_t* evals) {
  GKResult r = gk15(f, a, b, evals);
  if (r.err <= tol || depth >= 48) {
    acc.add(r.kronrod);
    return;
  }
  double c = 0.5 * (a + b);
  adaptive_rec(f, a, c, tol * 0.5, depth + 1, acc, evals);
  adaptive_rec(f, c, b, tol * 0.5, depth + 1, acc, evals);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, uint64_t* evals) {
  if (!(b > a)) return 0.0;
  KahanSum<long double> acc;
  adaptive_rec(f, a, b, abs_tol, 0, acc, evals);
  return static_cast<double>(acc.value());
}

OneDimBlocks one_dim_blocks(const SieveFunctionParams& params, double abs_tol) {
  OneDimBlocks out{};
  out.evals = 0;
  auto g = [&](double t) { return coord_factor(t, params); };
  auto gw = [&](double t) { return coord_factor_wide(t, params); };
  out.A = adaptive_integrate(g, 0.0, params.U, abs_tol, &out.evals);
  out.A2 = adaptive_integrate([&](double t) { return g(t) * g(t); }, 0.0, params.U, abs_tol,
                              &out.evals);
  out.Ahat = adaptive_integrate(gw, 0.0, 2.0, abs_tol, &out.evals);
  out.AB = adaptive_integrate([&](double t) { return g(t) * gw(t); }, 0.0, params.U, abs_tol,
                              &out.evals);
  out.B2 = adaptive_integrate([&](double t) { return gw(t) * gw(t); }, 0.0, 2.0, abs_tol,
                              &out.evals);
  return out;
}

// ---------------------------------------------------------------------------
// Counter-based RNG (splitmix64 finalizer over a mixed 3-word counter).

namespace {

uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

double uniform01(uint64_t seed, uint64_t sample, uint64_t dim) {
  uint64_t z = mix64(seed ^ 0x5851f42d4c957f2dull);
  z = mix64(z ^ sample);
  z = mix64(z ^ (dim * 0xda942042e4dd58b5ull));
  // 53 random bits into (0,1).
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Piecewise-constant importance table for the density ~ coord_factor^2.

namespace {

class CoordinateSampler {
 public:
  CoordinateSampler(const std::function<double(double)>& weight, double lo, double hi,
                    size_t cells = 4096)
      : lo_(lo), hi_(hi), cells_(cells) {
    weights_.resize(cells_);
    cum_.resize(cells_ + 1, 0.0);
    uint64_t evals = 0;
    const double h = (hi_ - lo_) / static_cast<double>(cells_);
    for (size_t c = 0; c < cells_; ++c) {
      double a = lo_ + h * static_cast<double>(c);
      double b = a + h;
      GKResult r = gk15(weight, a, b, &evals);
      weights_[c] = std::max(r.kronrod, 0.0);
      cum_[c + 1] = cum_[c] + weights_[c];
    }
    Z_ = cum_.back();
  }

  double Z() const { return Z_; }

  // Returns t drawn from the cell density, and writes h_cell / w_cell to
  // *h_over_w.  The sampling density is w_cell / (Z * h_cell), so an
  // unbiased estimate of int f is Z^dims * mean of f(t) * prod h_over_w.
  double sample(double u_cell, double u_pos, double* h_over_w) const {
    double target = u_cell * Z_;
    size_t lo = 0, hi = cells_;
    while (lo + 1 < hi) {
      size_t mid = (lo + hi) / 2;
      if (cum_[mid] <= target)
        lo = mid;
      else
        hi = mid;
    }
    const double h = (hi_ - lo_) / static_cast<double>(cells_);
    double a = lo_ + h * static_cast<double>(lo);
    double t = a + u_pos * h;
    *h_over_w = h / weights_[lo];
    return t;
  }

 private:
  double lo_, hi_;
  size_t cells_;
  std::vector<double> weights_;
  std::vector<double> cum_;
  double Z_ = 0;
};

CoordinateSampler narrow_sampler(const SieveFunctionParams& params) {
  return CoordinateSampler(
      [&params](double t) {
        double g = coord_factor(t, params);
        return g * g;
      },
      0.0, params.U);
}

// Deterministic parallel map over fixed-size sample blocks: each block is
// reduced sequentially, blocks are combined in index order, so the result is
// independent of the worker count.
struct BlockStats {
  long double sum = 0;
  long double sum_sq = 0;
};

template <typename PerSample>
std::pair<double, double> blocked_mean(uint64_t budget, unsigned workers,
                                       const PerSample& per_sample) {
  constexpr uint64_t kBlock = 1 << 16;
  const uint64_t n_blocks = (budget + kBlock - 1) / kBlock;
  std::vector<BlockStats> stats(n_blocks);

  auto run_block = [&](uint64_t bi) {
    uint64_t begin = bi * kBlock;
    uint64_t end = std::min(budget, begin + kBlock);
    KahanSum<long double> s, s2;
    for (uint64_t i = begin; i < end; ++i) {
      double v = per_sample(i);
      s.add(v);
      s2.add(static_cast<long double>(v) * v);
    }
    stats[bi].sum = s.value();
    stats[bi].sum_sq = s2.value();
  };

  if (workers <= 1 || n_blocks <= 1) {
    for (uint64_t bi = 0; bi < n_blocks; ++bi) run_block(bi);
  } else {
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    unsigned n = std::min<uint64_t>(workers, n_blocks);
    for (unsigned w = 0; w < n; ++w)
      pool.emplace_back([&] {
        for (;;) {
          uint64_t bi = next.fetch_add(1);
          if (bi >= n_blocks) return;
          run_block(bi);
        }
      });
    for (auto& th : pool) th.join();
  }

  KahanSum<long double> total, total_sq;
  for (const auto& b : stats) {
    total.add(b.sum);
    total_sq.add(b.sum_sq);
  }
  double mean = static_cast<double>(total.value() / static_cast<long double>(budget));
  long double var_num =
      total_sq.value() - static_cast<long double>(budget) * static_cast<long double>(mean) *
                             static_cast<long double>(mean);
  double var = budget > 1 ? static_cast<double>(var_num / static_cast<long double>(budget - 1))
                          : 0.0;
  double sem = var > 0 ? std::sqrt(var / static_cast<double>(budget)) : 0.0;
  return {mean, sem};
}

// ---------------------------------------------------------------------------
// Dense quadrature for integral_I: peel one coordinate at a time.
// D_0(s) = psi(s)^2, D_j(s) = int_0^U coord_factor(t)^2 D_{j-1}(s+t) dt,
// and the estimate is D_k(0).  Each level is tabulated on [0,1].

class LevelTable {
 public:
  explicit LevelTable(size_t nodes) : nodes_(nodes), values_(nodes, 0.0) {}

  void set(size_t i, double v) { values_[i] = v; }
  double x_at(size_t i) const { return static_cast<double>(i) / static_cast<double>(nodes_ - 1); }

  // 4-point cubic interpolation on the uniform grid; 0 beyond [0,1].
  double eval(double s) const {
    if (s >= 1.0) return 0.0;
    if (s <= 0.0) return values_[0];
    double pos = s * static_cast<double>(nodes_ - 1);
    size_t i = static_cast<size_t>(pos);
    if (i >= nodes_ - 1) return values_[nodes_ - 1];
    double u = pos - static_cast<double>(i);
    size_t i0 = i == 0 ? 0 : i - 1;
    size_t i2 = i + 1;
    size_t i3 = std::min(i + 2, nodes_ - 1);
    double p0 = values_[i0], p1 = values_[i], p2 = values_[i2], p3 = values_[i3];
    if (i == 0) p0 = 3.0 * p1 - 3.0 * p2 + p3;  // quadratic extrapolation at the edge
    double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    double c = 0.5 * (p2 - p0);
    return ((a * u + b) * u + c) * u + p1;
  }

  size_t nodes() const { return nodes_; }

 private:
  size_t nodes_;
  std::vector<double> values_;
};

double integral_I_quadrature(unsigned k, uint64_t* nodes_used) {
  SieveFunctionParams params(k);
  constexpr size_t kNodes = 8193;
  const double tol = 1e-11;

  auto g2 = [&](double t) {
    double v = coord_factor(t, params);
    return v * v;
  };

  LevelTable prev(kNodes);
  for (size_t i = 0; i < kNodes; ++i) {
    double s = prev.x_at(i);
    double p = psi(s);
    prev.set(i, p * p);
  }

  for (unsigned level = 1; level < k; ++level) {
    LevelTable next(kNodes);
    for (size_t i = 0; i < kNodes; ++i) {
      double s = next.x_at(i);
      double upper = std::min(params.U, 1.0 - s);
      double v = upper > 0
                     ? adaptive_integrate(
                           [&](double t) { return g2(t) * prev.eval(s + t); }, 0.0, upper,
                           tol, nodes_used)
                     : 0.0;
      next.set(i, v);
    }
    prev = std::move(next);
  }
  return adaptive_integrate([&](double t) { return g2(t) * prev.eval(t); }, 0.0,
                            std::min(params.U, 1.0), tol, nodes_used);
}

double integral_I_montecarlo(unsigned k, uint64_t budget, uint64_t seed, unsigned workers,
                             double* sem_out) {
  SieveFunctionParams params(k);
  CoordinateSampler sampler = narrow_sampler(params);
  const double zk = std::pow(sampler.Z(), static_cast<double>(k));

  auto per_sample = [&](uint64_t i) {
    double ratio_prod = 1.0;
    double sum_t = 0.0;
    for (unsigned d = 0; d < k; ++d) {
      double u1 = uniform01(seed, i, 2 * d);
      double u2 = uniform01(seed, i, 2 * d + 1);
      double h_over_w;
      double t = sampler.sample(u1, u2, &h_over_w);
      double g = coord_factor(t, params);
      ratio_prod *= g * g * h_over_w;
      sum_t += t;
    }
    double p = sum_t < 1.0 ? psi(sum_t) : 0.0;
    return ratio_prod * p * p;
  };

  auto [mean, sem] = blocked_mean(budget, workers, per_sample);
  *sem_out = sem * zk;
  return mean * zk;
}

}  // namespace

IntegralEstimate integral_I(unsigned k, IntegralMethod method, uint64_t budget, uint64_t seed,
                            unsigned workers) {
  if (k == 0) throw std::domain_error("integral_I: k must be >= 1");
  if (budget == 0) throw std::domain_error("integral_I: budget must be positive");
  IntegralEstimate est;
  est.method = method;
  est.seed = seed;
  if (method == IntegralMethod::NestedQuadrature) {
    if (k > 4)
      throw UnsupportedMethodError("nested quadrature supported for k <= 4 only");
    est.samples_or_nodes = 0;
    est.value = integral_I_quadrature(k, &est.samples_or_nodes);
    est.std_error = 0.0;
    est.seed = 0;
  } else {
    double sem = 0.0;
    est.value = integral_I_montecarlo(k, budget, seed, workers, &sem);
    est.std_error = sem;
    est.samples_or_nodes = budget;
  }
  return est;
}

IntegralEstimate integral_L(FamilyKind kind, unsigned k, unsigned m, IntegralMethod method,
                            uint64_t budget, uint64_t seed, unsigned workers) {
  if (kind == FamilyKind::F) throw std::domain_error("integral_L: kind must be F1 or F2");
  if (k == 0 || m == 0 || m + 1 > k)
    throw std::domain_error("integral_L: need 1 <= m and m+1 <= k");

  SieveFunctionParams params(k);
  IntegralEstimate est;
  est.method = method;
  est.seed = method == IntegralMethod::MonteCarlo ? seed : 0;

  uint64_t evals = 0;
  OneDimBlocks blocks = one_dim_blocks(params);
  evals += blocks.evals;
  const unsigned inner = m + 1;
  const unsigned outer = k - inner;

  // Inner integral over the first m+1 coordinates:
  //   F1: A^(m+1) * prod_outer coord_factor
  //   F2: alpha * prod_outer coord_factor + beta * sum_j wide_j * prod_{i != j}
  const double alpha = kind == FamilyKind::F1
                           ? std::pow(blocks.A, static_cast<double>(inner))
                           : static_cast<double>(inner) * blocks.Ahat *
                                 std::pow(blocks.A, static_cast<double>(m));
  const double beta = kind == FamilyKind::F1 ? 0.0 : std::pow(blocks.A, static_cast<double>(inner));

  if (method == IntegralMethod::NestedQuadrature) {
    // Outer integral of (alpha prod a + beta sum_j b_j prod_{i!=j} a_i)^2,
    // expanded in the one-dimensional blocks.
    double v = alpha * alpha * std::pow(blocks.A2, static_cast<double>(outer));
    if (beta != 0.0) {
      if (outer >= 1) {
        v += 2.0 * alpha * beta * static_cast<double>(outer) * blocks.AB *
             std::pow(blocks.A2, static_cast<double>(outer - 1));
        v += beta * beta * static_cast<double>(outer) * blocks.B2 *
             std::pow(blocks.A2, static_cast<double>(outer - 1));
      }
      if (outer >= 2)
        v += beta * beta * static_cast<double>(outer) * static_cast<double>(outer - 1) *
             blocks.AB * blocks.AB * std::pow(blocks.A2, static_cast<double>(outer - 2));
    }
    est.value = v;
    est.std_error = 0.0;
    est.samples_or_nodes = evals;
    return est;
  }

  // Monte Carlo over the outer coordinates with the exact inner integral.
  if (outer == 0) {
    est.value = alpha * alpha;  // no outer coordinates left
    est.std_error = 0.0;
    est.samples_or_nodes = 0;
    return est;
  }
  if (budget == 0) throw std::domain_error("integral_L: budget must be positive");
  if (outer > 64) throw std::domain_error("integral_L: k - m - 1 capped at 64");
  // F2 carries a widened factor on one coordinate, so its outer coordinates
  // need a proposal covering [0, 2]; F1 lives inside [0, U].
  CoordinateSampler sampler =
      kind == FamilyKind::F1
          ? narrow_sampler(params)
          : CoordinateSampler(
                [&params](double t) {
                  double g = coord_factor(t, params);
                  double w = coord_factor_wide(t, params);
                  return g * g + w * w;
                },
                0.0, 2.0, 8192);
  const double z_out = std::pow(sampler.Z(), static_cast<double>(outer));

  auto per_sample = [&](uint64_t i) {
    std::array<double, 64> ts;
    double hw_prod = 1.0;
    for (unsigned d = 0; d < outer; ++d) {
      double h_over_w;
      ts[d] = sampler.sample(uniform01(seed, i, 2 * d), uniform01(seed, i, 2 * d + 1),
                             &h_over_w);
      hw_prod *= h_over_w;
    }
    double prod_a = 1.0;
    for (unsigned d = 0; d < outer; ++d) prod_a *= coord_factor(ts[d], params);
    double inner_val = alpha * prod_a;
    if (beta != 0.0) {
      for (unsigned j = 0; j < outer; ++j) {
        double term = coord_factor_wide(ts[j], params);
        for (unsigned d = 0; d < outer; ++d)
          if (d != j) term *= coord_factor(ts[d], params);
        inner_val += beta * term;
      }
    }
    return inner_val * inner_val * hw_prod;
  };

  auto [mean, sem] = blocked_mean(budget, workers, per_sample);
  est.value = mean * z_out;
  est.std_error = sem * z_out;
  est.samples_or_nodes = budget;
  return est;
}

}  // namespace sievelab
