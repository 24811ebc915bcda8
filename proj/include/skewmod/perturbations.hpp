#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skewmod/bases.hpp"
#include "skewmod/numerics.hpp"
#include "skewmod/rng.hpp"

namespace skewmod {

enum class Parity { odd, exchange_antisymmetric, even, none_declared };

enum class PerturbationKind {
  linear_odd,
  poly_exchange,
  product_even,
  product_rho,
  pit_2d,
  sin_diff
};

/// Distribution function of the product of two independent uniform(0,1)
/// variables: p(t) = t (1 - log t) on (0,1], continuously extended by
/// p(0) = 0.  Feeding it the product of two continuous cdf values yields a
/// uniform variate.
inline double product_pit(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * (1.0 - std::log(t));
}

/// A real-valued modulation function w on the plane together with its
/// declared parity class.  Factories cover the built-in families; each
/// declaration is spot-checked numerically at construction.
class Perturbation {
 public:
  double operator()(Vec2 z) const { return fn_(z); }
  PerturbationKind kind() const { return kind_; }
  Parity parity() const { return parity_; }
  double alpha() const { return alpha_; }
  double rho() const { return rho_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// w(z) = a1 z1 + a2 z2.
  static Perturbation linear_odd(double a1, double a2) {
    Perturbation w;
    w.kind_ = PerturbationKind::linear_odd;
    w.parity_ = Parity::odd;
    w.coeffs_ = {a1, a2};
    w.fn_ = [a1, a2](Vec2 z) { return a1 * z.x + a2 * z.y; };
    w.check_declared_parity();
    return w;
  }

  /// w(z) = sum_k c_k (z1^k - z2^k) with c_k = coeffs[k-1].  Always
  /// antisymmetric under coordinate exchange; odd when only odd powers
  /// carry nonzero coefficients.
  static Perturbation poly_exchange(std::vector<double> coeffs) {
    if (coeffs.empty())
      throw std::domain_error("poly_exchange: need at least one coefficient");
    Perturbation w;
    w.kind_ = PerturbationKind::poly_exchange;
    bool only_odd = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const bool odd_power = (i % 2 == 0);  // coeffs[i] multiplies power i+1
      if (!odd_power && coeffs[i] != 0.0) only_odd = false;
    }
    w.parity_ = only_odd ? Parity::odd : Parity::exchange_antisymmetric;
    w.fn_ = [coeffs](Vec2 z) {
      double px = 1.0, py = 1.0, acc = 0.0;
      for (double c : coeffs) {
        px *= z.x;
        py *= z.y;
        acc += c * (px - py);
      }
      return acc;
    };
    w.coeffs_ = std::move(coeffs);
    w.check_declared_parity();
    return w;
  }

  /// w(z) = alpha z1 z2.
  static Perturbation product_even(double alpha) {
    Perturbation w;
    w.kind_ = PerturbationKind::product_even;
    w.parity_ = Parity::even;
    w.alpha_ = alpha;
    w.fn_ = [alpha](Vec2 z) { return alpha * z.x * z.y; };
    w.check_declared_parity();
    return w;
  }

  /// w(z) = alpha z1 (z2 - rho z1), or with the roles of the coordinates
  /// exchanged for form 2.  Even in z; pairs with a correlated normal base.
  static Perturbation product_rho(double alpha, double rho, int form = 1) {
    if (form != 1 && form != 2)
      throw std::domain_error("product_rho: form must be 1 or 2");
    Perturbation w;
    w.kind_ = PerturbationKind::product_rho;
    w.parity_ = Parity::even;
    w.alpha_ = alpha;
    w.rho_ = rho;
    if (form == 1)
      w.fn_ = [alpha, rho](Vec2 z) { return alpha * z.x * (z.y - rho * z.x); };
    else
      w.fn_ = [alpha, rho](Vec2 z) { return alpha * z.y * (z.x - rho * z.y); };
    w.check_declared_parity();
    return w;
  }

  /// w(z) = sin(alpha (z1 - z2)).
  static Perturbation sin_diff(double alpha) {
    Perturbation w;
    w.kind_ = PerturbationKind::sin_diff;
    w.parity_ = Parity::exchange_antisymmetric;
    w.alpha_ = alpha;
    w.fn_ = [alpha](Vec2 z) { return std::sin(alpha * (z.x - z.y)); };
    w.check_declared_parity();
    return w;
  }

  /// w(z) = w1( p(F1(z1) F2(z2)) - 1/2 ) where p is the product
  /// probability-integral transform above and w1 is odd on (-1/2, 1/2).
  static Perturbation pit_2d(std::function<double(double)> cdf1,
                             std::function<double(double)> cdf2,
                             std::function<double(double)> inner_odd) {
    for (double u : {0.05, 0.15, 0.25, 0.35, 0.45}) {
      if (std::fabs(inner_odd(u) + inner_odd(-u)) > 1e-12)
        throw std::domain_error("pit_2d: inner function is not odd");
    }
    Perturbation w;
    w.kind_ = PerturbationKind::pit_2d;
    w.parity_ = Parity::none_declared;
    w.fn_ = [cdf1 = std::move(cdf1), cdf2 = std::move(cdf2),
             inner = std::move(inner_odd)](Vec2 z) {
      return inner(product_pit(cdf1(z.x) * cdf2(z.y)) - 0.5);
    };
    return w;
  }

  /// Same function with the opposite sign; the parity class is unchanged.
  Perturbation negated() const {
    Perturbation w(*this);
    auto f = fn_;
    w.fn_ = [f = std::move(f)](Vec2 z) { return -f(z); };
    return w;
  }

 private:
  Perturbation() = default;

  void check_declared_parity() const {
    Rng probe(0x5eedf00d);
    for (int i = 0; i < 32; ++i) {
      const Vec2 z{6.0 * (probe.uniform() - 0.5), 6.0 * (probe.uniform() - 0.5)};
      switch (parity_) {
        case Parity::odd:
          if (std::fabs(fn_({-z.x, -z.y}) + fn_(z)) > 1e-12 * (1.0 + std::fabs(fn_(z))))
            throw std::logic_error("perturbation declared odd is not odd");
          break;
        case Parity::exchange_antisymmetric:
          if (std::fabs(fn_({z.y, z.x}) + fn_(z)) > 1e-12 * (1.0 + std::fabs(fn_(z))))
            throw std::logic_error(
                "perturbation declared exchange-antisymmetric is not");
          break;
        case Parity::even:
          if (std::fabs(fn_({-z.x, -z.y}) - fn_(z)) > 1e-12 * (1.0 + std::fabs(fn_(z))))
            throw std::logic_error("perturbation declared even is not even");
          break;
        case Parity::none_declared:
          break;
      }
    }
  }

  std::function<double(Vec2)> fn_;
  PerturbationKind kind_ = PerturbationKind::linear_odd;
  Parity parity_ = Parity::none_declared;
  double alpha_ = 0.0;
  double rho_ = 0.0;
  std::vector<double> coeffs_;
};

enum class PitOrientation { plus, minus };

/// Ingredients of the one-dimensional probability-integral-transform
/// construction: a scalar base with distribution function F0, an odd inner
/// function on (-1/2, 1/2) and the sign of the transformed argument.
struct Pit1dSpec {
  UnivariateBase base;
  std::function<double(double)> inner;
  PitOrientation orientation = PitOrientation::plus;
};

enum class SymmetryVerdict { symmetric, asymmetric, inconclusive };

struct SymmetryTestResult {
  SymmetryVerdict verdict = SymmetryVerdict::inconclusive;
  double p_value = 0.0;
  double statistic = 0.0;
};

/// Empirical check that w(Y) is symmetrically distributed about zero when
/// Y follows the base: a two-sample KS test of {w(Y)} against {-w(Y')} on
/// independent draws.  Declares symmetric above p = 0.01 and asymmetric
/// below p = 1e-4; anything between is inconclusive.
inline SymmetryTestResult symmetry_test(const Perturbation& w,
                                        const BivariateBase& base,
                                        std::size_t n, Rng& rng) {
  if (n < 1000) throw std::domain_error("symmetry_test: need n >= 1000");
  std::vector<double> wy(n), neg_wy(n);
  for (std::size_t i = 0; i < n; ++i) wy[i] = w(base.sample(rng));
  for (std::size_t i = 0; i < n; ++i) neg_wy[i] = -w(base.sample(rng));
  const KsResult ks = ks_two_sample(std::move(wy), std::move(neg_wy));
  SymmetryTestResult out;
  out.p_value = ks.p_value;
  out.statistic = ks.statistic;
  if (ks.p_value > 0.01)
    out.verdict = SymmetryVerdict::symmetric;
  else if (ks.p_value < 1e-4)
    out.verdict = SymmetryVerdict::asymmetric;
  else
    out.verdict = SymmetryVerdict::inconclusive;
  return out;
}

}  // namespace skewmod
