#include "sievelab/cutoff.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sievelab {

namespace {

constexpr double kPlateauEnd = CutoffSpec::plateau_end;
constexpr double kSupportEnd = CutoffSpec::support_end;
constexpr double kClamp = CutoffSpec::clamp;

// Standard partition-of-unity bridge sigma(u) = f(u)/(f(u)+f(1-u)) with
// f(u) = exp(-1/u) for u > 0.  Monotone from 0 to 1, all derivatives vanish
// at both ends, symmetric about u = 1/2.
double bridge(double u) {
  if (u < kClamp) return 0.0;
  if (u > 1.0 - kClamp) return 1.0;
  double fu = std::exp(-1.0 / u);
  double fv = std::exp(-1.0 / (1.0 - u));
  return fu / (fu + fv);
}

}  // namespace

double psi(double t) {
  if (t < 0.0) throw std::domain_error("psi: t must be >= 0");
  if (t <= kPlateauEnd) return 1.0;
  if (t >= kSupportEnd) return 0.0;
  // parametrized by the distance from the bridge midpoint, so the center
  // evaluates to exactly 1/2
  constexpr double kMid = 0.5 * (kPlateauEnd + kSupportEnd);
  return bridge(0.5 - (t - kMid) / (kSupportEnd - kPlateauEnd));
}

SieveFunctionParams::SieveFunctionParams(unsigned k_in) : k(k_in) {
  if (k == 0) throw std::domain_error("SieveFunctionParams: k must be >= 1");
  T = k * std::log(static_cast<double>(k));
  U = 1.0 / std::sqrt(static_cast<double>(k));
}

double coord_factor(double t, const SieveFunctionParams& params) {
  return psi(t / params.U) / (1.0 + params.T * t);
}

double coord_factor_wide(double t, const SieveFunctionParams& params) {
  return psi(t / 2.0) / (1.0 + params.T * t);
}

double eval_family(FamilyKind kind, std::span<const double> t,
                   const SieveFunctionParams& params) {
  if (t.size() != params.k) throw std::domain_error("eval_family: dimension mismatch");
  for (double v : t)
    if (v < 0.0) throw std::domain_error("eval_family: coordinates must be >= 0");

  switch (kind) {
    case FamilyKind::F: {
      double sum = 0.0;
      double prod = 1.0;
      for (double v : t) {
        sum += v;
        prod *= coord_factor(v, params);
      }
      return psi(sum) * prod;
    }
    case FamilyKind::F1: {
      double prod = 1.0;
      for (double v : t) prod *= coord_factor(v, params);
      return prod;
    }
    case FamilyKind::F2: {
      double total = 0.0;
      for (size_t j = 0; j < t.size(); ++j) {
        double term = coord_factor_wide(t[j], params);
        for (size_t i = 0; i < t.size(); ++i)
          if (i != j) term *= coord_factor(t[i], params);
        total += term;
      }
      return total;
    }
  }
  throw std::logic_error("eval_family: unknown kind");
}

double eval_f2_factored(std::span<const double> t, const SieveFunctionParams& params) {
  if (t.size() != params.k) throw std::domain_error("eval_f2_factored: dimension mismatch");
  const size_t k = t.size();
  std::vector<double> narrow(k);
  for (size_t i = 0; i < k; ++i) narrow[i] = coord_factor(t[i], params);

  std::vector<double> suffix(k + 1, 1.0);
  for (size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * narrow[i];

  double total = 0.0;
  double prefix = 1.0;
  for (size_t j = 0; j < k; ++j) {
    total += prefix * coord_factor_wide(t[j], params) * suffix[j + 1];
    prefix *= narrow[j];
  }
  return total;
}

}  // namespace sievelab
