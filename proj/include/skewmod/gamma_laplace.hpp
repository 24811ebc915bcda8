#pragma once

#include <cmath>
#include <stdexcept>

#include "skewmod/modulated.hpp"
#include "skewmod/numerics.hpp"

namespace skewmod {

// Closed forms for the product-gamma base (unit rate, integer shape omega)
// modulated by a Laplace cdf through w(y) = alpha (y1 - y2).  The selection
// event X <= alpha (Y1 - Y2) rewrites as T < Y1 with T = X/alpha + Y2, and
// everything below follows from the density of that comparison variable.

namespace detail {

inline double pow_int(double base, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc *= base;
  return acc;
}

inline double factorial(int n) {
  double acc = 1.0;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

}  // namespace detail

/// Density of T = X/alpha + Y2 with X standard Laplace and Y2 gamma(omega).
/// Piecewise closed form; requires alpha > 0 and integer omega >= 1.
inline double threshold_pdf(double t, double alpha, int omega) {
  if (!(alpha > 0.0)) throw std::domain_error("threshold_pdf: need alpha > 0");
  if (omega < 1) throw std::domain_error("threshold_pdf: need omega >= 1");
  if (t <= 0.0)
    return 0.5 * alpha * std::exp(alpha * t) / detail::pow_int(1.0 + alpha, omega);

  // sum_k t^k / (k! c^{omega-k}) for k = 0..omega-1
  auto tail_sum = [&](double c) {
    double acc = 0.0;
    double tk = 1.0;  // t^k / k!
    for (int k = 0; k < omega; ++k) {
      acc += tk / detail::pow_int(c, omega - k);
      tk *= t / static_cast<double>(k + 1);
    }
    return acc;
  };

  const double plus = std::exp(-t) * tail_sum(1.0 + alpha);
  if (alpha == 1.0) {
    const double tpow = detail::pow_int(t, omega) /
                        (static_cast<double>(omega) * detail::factorial(omega - 1));
    return 0.5 * (std::exp(-t) * tpow + plus);
  }
  const double head = std::exp(-alpha * t) / detail::pow_int(1.0 - alpha, omega);
  const double minus = std::exp(-t) * tail_sum(1.0 - alpha);
  return 0.5 * alpha * (head - minus + plus);
}

/// Distribution function of T for omega = 1; three closed-form branches.
inline double threshold_cdf(double t, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("threshold_cdf: need alpha > 0");
  if (t <= 0.0) return std::exp(alpha * t) / (2.0 * (1.0 + alpha));
  if (alpha == 1.0) return 1.0 - std::exp(-t) * (0.75 + 0.5 * t);
  return 1.0 - alpha * alpha / (alpha * alpha - 1.0) * std::exp(-t) +
         std::exp(-alpha * t) / (2.0 * (alpha - 1.0));
}

enum class Component { z1, z2 };

/// Marginal density of one component of the omega = 1 construction.
/// For alpha > 0: 2 f1(z) F_T(z) for Z1 and 2 f1(z) (1 - F_T(z)) for Z2;
/// a negative alpha exchanges the two roles and uses |alpha|.
inline double marginal_pdf(Component which, double z, double alpha) {
  if (alpha == 0.0) throw std::domain_error("marginal_pdf: need alpha != 0");
  if (z <= 0.0) return 0.0;
  Component effective = which;
  if (alpha < 0.0) {
    effective = which == Component::z1 ? Component::z2 : Component::z1;
    alpha = -alpha;
  }
  const double ft = threshold_cdf(z, alpha);
  const double f1 = std::exp(-z);
  return effective == Component::z1 ? 2.0 * f1 * ft : 2.0 * f1 * (1.0 - ft);
}

/// Raw moment E{Z^r} of one component for omega = 1, any real r > 0.
inline double moment(Component which, double r, double alpha) {
  if (!(r > 0.0)) throw std::domain_error("moment: need r > 0");
  if (alpha == 0.0) throw std::domain_error("moment: need alpha != 0");
  Component effective = which;
  if (alpha < 0.0) {
    effective = which == Component::z1 ? Component::z2 : Component::z1;
    alpha = -alpha;
  }
  const double gamma_r1 = std::exp(log_gamma(r + 1.0));
  double ez1;
  if (alpha == 1.0) {
    ez1 = gamma_r1 * (2.0 - (r + 4.0) / std::pow(2.0, r + 2.0));
  } else {
    const double bracket = (alpha * alpha / std::pow(2.0, r) -
                            std::pow(1.0 + alpha, -r)) /
                           (alpha * alpha - 1.0);
    ez1 = gamma_r1 * (2.0 - bracket);
  }
  return effective == Component::z1 ? ez1 : 2.0 * gamma_r1 - ez1;
}

/// Correlation of (Z1, Z2) for omega = 1, assembled from the first two
/// moments and E{Z1 Z2} = 1.  Even in alpha; zero at alpha = 0 and rising
/// towards 1/sqrt(5) as |alpha| grows.
inline double correlation(double alpha) {
  if (alpha == 0.0) return 0.0;
  const double a = std::fabs(alpha);
  const double m1 = moment(Component::z1, 1.0, a);
  const double m2 = moment(Component::z2, 1.0, a);
  const double q1 = moment(Component::z1, 2.0, a);
  const double q2 = moment(Component::z2, 2.0, a);
  const double v1 = q1 - m1 * m1;
  const double v2 = q2 - m2 * m2;
  return (1.0 - m1 * m2) / std::sqrt(v1 * v2);
}

/// Parameter pack for the exponential-Laplace construction; density() gives
/// the full bivariate object 2 f1(z1) f1(z2) G(alpha (z1 - z2)).
struct ExpLaplaceSkew {
  int omega = 1;
  double alpha = 1.0;

  ModulatedDensity density(ModulationCdf g = ModulationCdf::laplace()) const {
    if (omega < 1) throw std::domain_error("ExpLaplaceSkew: need omega >= 1");
    return ModulatedDensity(BivariateBase::product_gamma(omega), g,
                            Perturbation::poly_exchange({alpha}));
  }
};

}  // namespace skewmod
