#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "skewmod/numerics.hpp"
#include "skewmod/rng.hpp"

namespace skewmod {

enum class Support2d { full_plane, positive_quadrant };

/// Machine-checkable symmetry declarations of a base density.
struct SymmetryMeta {
  bool centrally_symmetric = false;   // f0(y) == f0(-y)
  bool exchange_symmetric = false;    // f0(y1, y2) == f0(y2, y1)
  Support2d support = Support2d::full_plane;
};

enum class BaseKind { bivariate_normal, product_gamma, gumbel_biv_exp };

/// Quadratic form z' Omega^{-1} z for the equicorrelation matrix with
/// off-diagonal rho.
inline double mahalanobis(Vec2 z, double rho) {
  return (z.x * z.x - 2.0 * rho * z.x * z.y + z.y * z.y) / (1.0 - rho * rho);
}

/// A bivariate base density: pdf, exact sampler, truncated integration box
/// and symmetry metadata.  Instances are immutable; samplers touch only the
/// stream they are handed.
class BivariateBase {
 public:
  double pdf(Vec2 y) const { return pdf_(y); }
  Vec2 sample(Rng& rng) const { return sample_(rng); }
  const SymmetryMeta& meta() const { return meta_; }
  const Rect& support_box() const { return box_; }
  BaseKind kind() const { return kind_; }
  double param() const { return param_; }  // rho, omega or lambda

  /// Centred bivariate normal with unit variances and correlation rho.
  static BivariateBase bivariate_normal(double rho) {
    if (!(std::fabs(rho) < 1.0))
      throw std::domain_error("bivariate_normal: need |rho| < 1");
    BivariateBase b;
    b.kind_ = BaseKind::bivariate_normal;
    b.param_ = rho;
    b.meta_ = {true, true, Support2d::full_plane};
    b.box_ = {-8.0, 8.0, -8.0, 8.0};
    const double det = 1.0 - rho * rho;
    const double norm_c = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    b.pdf_ = [rho, norm_c](Vec2 y) {
      return norm_c * std::exp(-0.5 * mahalanobis(y, rho));
    };
    const double cross = std::sqrt(det);
    b.sample_ = [rho, cross](Rng& rng) -> Vec2 {
      const double n1 = rng.normal();
      const double n2 = rng.normal();
      return {n1, rho * n1 + cross * n2};
    };
    return b;
  }

  /// Product of two unit-rate gamma densities with common shape omega.
  /// Shapes below one put an integrable y^(omega-1) singularity on the
  /// axes; the pdf and sampler stay exact there, but the panel-based 2-D
  /// normalization verifier converges slowly against that edge.
  static BivariateBase product_gamma(double omega) {
    if (!(omega > 0.0)) throw std::domain_error("product_gamma: need omega > 0");
    BivariateBase b;
    b.kind_ = BaseKind::product_gamma;
    b.param_ = omega;
    b.meta_ = {false, true, Support2d::positive_quadrant};
    const double hi = omega + 40.0 * std::max(1.0, std::sqrt(omega));
    b.box_ = {0.0, hi, 0.0, hi};
    const double lg = log_gamma(omega);
    b.pdf_ = [omega, lg](Vec2 y) {
      if (y.x <= 0.0 || y.y <= 0.0) return 0.0;
      return std::exp((omega - 1.0) * (std::log(y.x) + std::log(y.y)) - y.x -
                      y.y - 2.0 * lg);
    };
    b.sample_ = [omega](Rng& rng) -> Vec2 {
      return {rng.gamma(omega), rng.gamma(omega)};
    };
    return b;
  }

  /// Gumbel bivariate exponential: survival exp(-y1 - y2 - lambda y1 y2).
  /// The density is the mixed second derivative of the survival function.
  /// Sampling is exact: Y1 is unit exponential and Y2 | Y1 is the mixture
  /// (1 - lambda/a) Exp(a) + (lambda/a) Gamma(2, a) with a = 1 + lambda Y1.
  static BivariateBase gumbel_biv_exp(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
      throw std::domain_error("gumbel_biv_exp: need 0 <= lambda < 1");
    BivariateBase b;
    b.kind_ = BaseKind::gumbel_biv_exp;
    b.param_ = lambda;
    b.meta_ = {false, true, Support2d::positive_quadrant};
    b.box_ = {0.0, 40.0, 0.0, 40.0};
    b.pdf_ = [lambda](Vec2 y) {
      if (y.x < 0.0 || y.y < 0.0) return 0.0;
      const double factor = (1.0 + lambda * y.x) * (1.0 + lambda * y.y) - lambda;
      return std::exp(-y.x - y.y - lambda * y.x * y.y) * factor;
    };
    b.sample_ = [lambda](Rng& rng) -> Vec2 {
      const double y1 = rng.exponential();
      const double a = 1.0 + lambda * y1;
      double y2 = rng.exponential();
      if (rng.uniform() < lambda / a) y2 += rng.exponential();
      return {y1, y2 / a};
    };
    return b;
  }

  /// Survival function of the Gumbel base; used by its tests.
  static double gumbel_survival(Vec2 y, double lambda) {
    return std::exp(-y.x - y.y - lambda * y.x * y.y);
  }

 private:
  BivariateBase() = default;
  std::function<double(Vec2)> pdf_;
  std::function<Vec2(Rng&)> sample_;
  SymmetryMeta meta_;
  Rect box_;
  BaseKind kind_ = BaseKind::bivariate_normal;
  double param_ = 0.0;
};

/// Scalar base density with distribution function, used by the
/// probability-integral-transform constructions.
class UnivariateBase {
 public:
  double pdf(double x) const { return pdf_(x); }
  double cdf(double x) const { return cdf_(x); }
  double sample(Rng& rng) const { return sample_(rng); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool centrally_symmetric() const { return centrally_symmetric_; }

  static UnivariateBase unit_exponential() {
    UnivariateBase b;
    b.pdf_ = [](double x) { return x >= 0.0 ? std::exp(-x) : 0.0; };
    b.cdf_ = [](double x) { return x >= 0.0 ? 1.0 - std::exp(-x) : 0.0; };
    b.sample_ = [](Rng& rng) { return rng.exponential(); };
    b.lo_ = 0.0;
    b.hi_ = 40.0;
    b.centrally_symmetric_ = false;
    return b;
  }

  static UnivariateBase std_normal() {
    UnivariateBase b;
    b.pdf_ = [](double x) { return std_normal_pdf(x); };
    b.cdf_ = [](double x) { return std_normal_cdf(x); };
    b.sample_ = [](Rng& rng) { return rng.normal(); };
    b.lo_ = -8.0;
    b.hi_ = 8.0;
    b.centrally_symmetric_ = true;
    return b;
  }

  /// Caller-supplied scalar density; the sampler may be omitted when only
  /// pdf/cdf evaluation is needed.
  static UnivariateBase custom(std::function<double(double)> pdf,
                               std::function<double(double)> cdf, double lo,
                               double hi,
                               std::function<double(Rng&)> sampler = {},
                               bool centrally_symmetric = false) {
    if (!(lo < hi)) throw std::domain_error("UnivariateBase: need lo < hi");
    UnivariateBase b;
    b.pdf_ = std::move(pdf);
    b.cdf_ = std::move(cdf);
    if (sampler)
      b.sample_ = std::move(sampler);
    else
      b.sample_ = [](Rng&) -> double {
        throw std::logic_error("UnivariateBase: no sampler attached");
      };
    b.lo_ = lo;
    b.hi_ = hi;
    b.centrally_symmetric_ = centrally_symmetric;
    return b;
  }

  /// Uniform density on (-1/2, 1/2).
  static UnivariateBase uniform_symmetric() {
    UnivariateBase b;
    b.pdf_ = [](double x) { return (x > -0.5 && x < 0.5) ? 1.0 : 0.0; };
    b.cdf_ = [](double x) {
      if (x <= -0.5) return 0.0;
      if (x >= 0.5) return 1.0;
      return x + 0.5;
    };
    b.sample_ = [](Rng& rng) { return rng.uniform() - 0.5; };
    b.lo_ = -0.5;
    b.hi_ = 0.5;
    b.centrally_symmetric_ = true;
    return b;
  }

 private:
  UnivariateBase() = default;
  std::function<double(double)> pdf_, cdf_;
  std::function<double(Rng&)> sample_;
  double lo_ = 0.0, hi_ = 0.0;
  bool centrally_symmetric_ = false;
};

}  // namespace skewmod
