#pragma once

#include <span>

namespace sievelab {

// Shape constants of the plateau cutoff.  The bridge is the standard
// partition-of-unity blend of exp(-1/u), clamped to its limits once u is
// within `clamp` of an endpoint.
struct CutoffSpec {
  static constexpr double plateau_end = 0.9;
  static constexpr double support_end = 1.0;
  static constexpr double clamp = 1e-12;
};

// Smooth non-increasing plateau cutoff on [0, infinity): identically 1 on
// [0, 9/10], identically 0 from 1 on, with a C-infinity monotone bridge in
// between, symmetric about t = 0.95 (so psi(0.95) = 1/2 exactly).
double psi(double t);

// Per-dimension shape parameters of the sieve functions: a taper scale
// T = k log k and a per-coordinate cap U = 1/sqrt(k).
struct SieveFunctionParams {
  unsigned k;
  double T;
  double U;
  explicit SieveFunctionParams(unsigned k);
};

enum class FamilyKind { F, F1, F2 };

// psi(t/U) / (1 + T t): the per-coordinate factor shared by all families.
double coord_factor(double t, const SieveFunctionParams& params);
// psi(t/2) / (1 + T t): the widened factor carried by one coordinate of F2.
double coord_factor_wide(double t, const SieveFunctionParams& params);

// F  = psi(sum t_i) * prod coord_factor(t_i)        (vanishes once sum >= 1)
// F1 = prod coord_factor(t_i)                        (no simplex cutoff)
// F2 = sum_j coord_factor_wide(t_j) * prod_{i != j} coord_factor(t_i)
double eval_family(FamilyKind kind, std::span<const double> t,
                   const SieveFunctionParams& params);

// F2 via a single prefix/suffix product pass instead of the literal k^2
// sum-of-products; agrees with eval_family(F2, ...) to rounding.
double eval_f2_factored(std::span<const double> t, const SieveFunctionParams& params);

}  // namespace sievelab
