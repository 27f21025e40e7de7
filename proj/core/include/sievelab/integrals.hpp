#pragma once

#include <cstdint>
#include <functional>

#include "sievelab/cutoff.hpp"

namespace sievelab {

enum class IntegralMethod { NestedQuadrature, MonteCarlo };

struct IntegralEstimate {
  double value = 0;
  double std_error = 0;  // 0 for deterministic quadrature
  IntegralMethod method = IntegralMethod::NestedQuadrature;
  uint64_t samples_or_nodes = 0;
  uint64_t seed = 0;  // meaningful for Monte Carlo only
};

// integral over [0,inf)^k of F^2.  The integrand lives on the box
// [0, U]^k cut by the simplex sum t_i < 1.  Dense recursive quadrature is
// supported for k <= 4; Monte Carlo (importance-sampled from the product
// density ~ prod coord_factor^2, with the simplex cutoff in the estimator)
// for any k.  Monte Carlo results are reproducible from the seed and
// independent of the worker count.
IntegralEstimate integral_I(unsigned k, IntegralMethod method, uint64_t budget,
                            uint64_t seed, unsigned workers = 1);

// Outer integral over t_{m+2},...,t_k of the square of the inner integral of
// F1 (or F2) over t_1,...,t_{m+1}.  Both families factor through
// one-dimensional integrals, so the quadrature path composes those exactly;
// Monte Carlo samples the outer coordinates only.
IntegralEstimate integral_L(FamilyKind kind, unsigned k, unsigned m, IntegralMethod method,
                            uint64_t budget, uint64_t seed, unsigned workers = 1);

// Adaptive Gauss-Kronrod (7,15) bisection to an absolute tolerance.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, uint64_t* evals = nullptr);

// The one-dimensional pieces every estimate above reduces to:
//   A  = int coord_factor,  A2 = int coord_factor^2,
//   Ahat = int coord_factor_wide, AB = int of the cross product, B2 = wide^2.
struct OneDimBlocks {
  double A, Ahat, A2, AB, B2;
  uint64_t evals;
};
OneDimBlocks one_dim_blocks(const SieveFunctionParams& params, double abs_tol = 1e-10);

// Counter-based uniform(0,1): a pure function of (seed, sample, dim), so
// parallel sample generation is order-independent and reproducible.
double uniform01(uint64_t seed, uint64_t sample, uint64_t dim);

}  // namespace sievelab
