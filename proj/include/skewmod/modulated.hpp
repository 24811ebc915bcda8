#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "skewmod/bases.hpp"
#include "skewmod/numerics.hpp"
#include "skewmod/perturbations.hpp"
#include "skewmod/rng.hpp"

namespace skewmod {

/// Scalar distribution G with G(-x) = 1 - G(x), its density, and a sampler.
class ModulationCdf {
 public:
  enum class Kind { normal, laplace };

  static ModulationCdf normal() { return ModulationCdf(Kind::normal); }
  static ModulationCdf laplace() { return ModulationCdf(Kind::laplace); }

  double cdf(double x) const {
    return kind_ == Kind::normal ? std_normal_cdf(x) : laplace_cdf(x);
  }
  double density(double x) const {
    return kind_ == Kind::normal ? std_normal_pdf(x) : laplace_pdf(x);
  }
  double sample(Rng& rng) const {
    return kind_ == Kind::normal ? rng.normal() : rng.laplace();
  }
  Kind kind() const { return kind_; }

 private:
  explicit ModulationCdf(Kind k) : kind_(k) {}
  Kind kind_;
};

/// The assembled density f(z) = 2 f0(z) G(w(z)).
class ModulatedDensity {
 public:
  ModulatedDensity(BivariateBase base, ModulationCdf g, Perturbation w)
      : base_(std::move(base)), g_(g), w_(std::move(w)) {}

  double pdf(Vec2 z) const { return 2.0 * base_.pdf(z) * g_.cdf(w_(z)); }

  /// Density obtained by reversing the selection inequality:
  /// 2 f0(z) (1 - G(w(z))) = 2 f0(z) G(-w(z)).
  double dual_pdf(Vec2 z) const {
    return 2.0 * base_.pdf(z) * (1.0 - g_.cdf(w_(z)));
  }

  /// The dual as a density object in its own right (w replaced by -w).
  ModulatedDensity dual() const {
    return ModulatedDensity(base_, g_, w_.negated());
  }

  const BivariateBase& base() const { return base_; }
  const ModulationCdf& g() const { return g_; }
  const Perturbation& w() const { return w_; }
  const Rect& support_box() const { return base_.support_box(); }

 private:
  BivariateBase base_;
  ModulationCdf g_;
  Perturbation w_;
};

struct NormalizationReport {
  QuadratureResult quadrature;
  bool pass = false;
};

/// Integrates the density over the truncated support of its base; passes
/// when the quadrature converged and the mass is within 10x the requested
/// absolute tolerance of one.  The factor of ten separates quadrature noise
/// from a genuinely non-normalized construction.
inline NormalizationReport verify_normalization(const ModulatedDensity& m,
                                                const Tolerance& tol = Tolerance{1e-7, 0.0, 4'000'000}) {
  NormalizationReport rep;
  rep.quadrature =
      integrate_2d([&m](Vec2 z) { return m.pdf(z); }, m.support_box(), tol);
  rep.pass = rep.quadrature.converged &&
             std::fabs(rep.quadrature.value - 1.0) <= 10.0 * tol.abs_tol;
  return rep;
}

/// Density values at the cell centres of a regular grid; values are stored
/// row-major with the y index as the row.
struct DensityGrid {
  std::size_t nx = 0, ny = 0;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
  double x_center(std::size_t ix) const {
    return x_lo + (static_cast<double>(ix) + 0.5) * (x_hi - x_lo) / static_cast<double>(nx);
  }
  double y_center(std::size_t iy) const {
    return y_lo + (static_cast<double>(iy) + 0.5) * (y_hi - y_lo) / static_cast<double>(ny);
  }
};

inline DensityGrid density_grid(const ModulatedDensity& m, double x_lo,
                                double x_hi, double y_lo, double y_hi,
                                std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw std::domain_error("density_grid: need nx, ny >= 2");
  if (!(x_lo < x_hi) || !(y_lo < y_hi))
    throw std::domain_error("density_grid: empty range");
  DensityGrid g{nx, ny, x_lo, x_hi, y_lo, y_hi, {}};
  g.values.resize(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      g.values[iy * nx + ix] = m.pdf({g.x_center(ix), g.y_center(iy)});
  return g;
}

/// Number of strict local maxima over the 8-neighbourhood, interior cells
/// only.  Evaluating at cell centres keeps the count stable on coarse grids.
inline int count_modes(const DensityGrid& g) {
  int modes = 0;
  for (std::size_t iy = 1; iy + 1 < g.ny; ++iy) {
    for (std::size_t ix = 1; ix + 1 < g.nx; ++ix) {
      const double v = g.at(ix, iy);
      bool strict_max = true;
      for (int dy = -1; dy <= 1 && strict_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (g.at(ix + dx, iy + dy) >= v) {
            strict_max = false;
            break;
          }
        }
      if (strict_max) ++modes;
    }
  }
  return modes;
}

/// Univariate counterpart of ModulatedDensity, produced by the
/// probability-integral-transform construction.
class ModulatedDensity1D {
 public:
  ModulatedDensity1D(UnivariateBase base, ModulationCdf g,
                     std::function<double(double)> w)
      : base_(std::move(base)), g_(g), w_(std::move(w)) {}

  double pdf(double x) const { return 2.0 * base_.pdf(x) * g_.cdf(w_(x)); }
  const UnivariateBase& base() const { return base_; }
  const ModulationCdf& g() const { return g_; }
  const std::function<double(double)>& w() const { return w_; }
  double lo() const { return base_.lo(); }
  double hi() const { return base_.hi(); }

 private:
  UnivariateBase base_;
  ModulationCdf g_;
  std::function<double(double)> w_;
};

/// Builds 2 f0(x) G(w1(F0(x) - 1/2)) on the support of f0, or the variant
/// with the argument sign reversed.  The distribution function is required
/// to be strictly increasing; this is checked on a grid before building.
inline ModulatedDensity1D build_pit_1d(const Pit1dSpec& spec,
                                       const ModulationCdf& g) {
  for (double u : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    if (std::fabs(spec.inner(u) + spec.inner(-u)) > 1e-12)
      throw std::domain_error("build_pit_1d: inner function is not odd");
  }
  const int grid_n = 512;
  double prev = spec.base.cdf(spec.base.lo());
  for (int i = 1; i <= grid_n; ++i) {
    const double x = spec.base.lo() +
                     (spec.base.hi() - spec.base.lo()) * i / grid_n;
    const double fx = spec.base.cdf(x);
    if (fx < prev)
      throw std::domain_error("build_pit_1d: distribution function decreases");
    // flat stretches are only tolerated where the cdf has saturated
    if (fx == prev && fx > 1e-12 && fx < 1.0 - 1e-12)
      throw std::domain_error("build_pit_1d: distribution function is not strictly increasing");
    prev = fx;
  }
  const bool plus = spec.orientation == PitOrientation::plus;
  auto inner = spec.inner;
  auto cdf = [base = spec.base](double x) { return base.cdf(x); };
  std::function<double(double)> w;
  if (plus)
    w = [cdf, inner](double x) { return inner(cdf(x) - 0.5); };
  else
    w = [cdf, inner](double x) { return inner(0.5 - cdf(x)); };
  return ModulatedDensity1D(spec.base, g, std::move(w));
}

}  // namespace skewmod
