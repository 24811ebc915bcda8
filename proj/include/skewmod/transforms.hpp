#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "skewmod/bases.hpp"
#include "skewmod/numerics.hpp"
#include "skewmod/perturbations.hpp"
#include "skewmod/rng.hpp"

namespace skewmod {

/// Real solutions z of the pair D(z) = D(z0), w(z) = -w(z0) for the
/// correlated product function w(z) = alpha z1 (z2 - rho z1).  Writing
/// u = z1^2 reduces the system to the quadratic
///   (1 - rho^2) u^2 - D0 (1 - rho^2) u + w0^2 = 0
/// whose roots give up to four points z1 = +-sqrt(u),
/// z2 = (rho u - w0) / z1 (here w0 is the alpha-free part of w(z0)).
struct ProductRhoCandidates {
  std::vector<Vec2> points;           // ordered: small root first, + before -
  bool negative_discriminant = false; // flagged; should not occur off tangency
};

inline ProductRhoCandidates solve_R_product_rho(Vec2 z0, double rho,
                                                double alpha) {
  (void)alpha;  // the target w(z) = -w(z0) does not depend on the scale
  if (z0.x == 0.0)
    throw std::domain_error("solve_R_product_rho: z1 = 0 is degenerate");
  if (!(std::fabs(rho) < 1.0))
    throw std::domain_error("solve_R_product_rho: need |rho| < 1");
  const double d0 = mahalanobis(z0, rho);
  const double w0 = z0.x * z0.y - rho * z0.x * z0.x;
  const double c = w0 * w0 / (1.0 - rho * rho);  // product of the roots
  const double disc = d0 * d0 - 4.0 * c;
  ProductRhoCandidates out;
  if (disc < 0.0) {
    out.negative_discriminant = true;
    return out;
  }
  const double u_hi = 0.5 * (d0 + std::sqrt(disc));
  const double u_lo = u_hi > 0.0 ? c / u_hi : 0.0;
  std::vector<double> roots;
  roots.push_back(u_lo);
  if (u_hi - u_lo > 1e-12 * d0) roots.push_back(u_hi);
  for (double u : roots) {
    if (!(u > 0.0)) continue;  // z1 = 0 degenerates are excluded
    const double r = std::sqrt(u);
    for (double z1 : {r, -r}) {
      const double z2 = (rho * u - w0) / z1;
      out.points.push_back({z1, z2});
    }
  }
  return out;
}

/// An invertible candidate transform for the generalized-symmetry
/// conditions: base-density invariance, unit Jacobian and sign reversal of
/// the modulation function.
class GenSymTransform {
 public:
  enum class Kind {
    negation,
    swap_xy,
    rot_plus,
    rot_minus,
    reflect_x,
    reflect_y,
    product_rho_reflect,
    product_rho_rotate,
    product_rho_branch
  };

  Vec2 forward(Vec2 z) const { return forward_(z); }
  Vec2 inverse(Vec2 z) const { return inverse_(z); }
  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ != Kind::product_rho_branch; }

  /// Row-major 2x2 matrix; linear kinds only.
  const std::array<double, 4>& matrix() const {
    if (!is_linear())
      throw std::logic_error("GenSymTransform: nonlinear kind has no matrix");
    return mat_;
  }

  static GenSymTransform negation() {
    return linear(Kind::negation, {-1.0, 0.0, 0.0, -1.0});
  }
  static GenSymTransform swap_xy() {
    return linear(Kind::swap_xy, {0.0, 1.0, 1.0, 0.0});
  }
  /// Quarter-turn rotation (x, y) -> (-y, x).
  static GenSymTransform rot_plus() {
    return linear(Kind::rot_plus, {0.0, -1.0, 1.0, 0.0});
  }
  static GenSymTransform rot_minus() {
    return linear(Kind::rot_minus, {0.0, 1.0, -1.0, 0.0});
  }
  static GenSymTransform reflect_x() {
    return linear(Kind::reflect_x, {-1.0, 0.0, 0.0, 1.0});
  }
  static GenSymTransform reflect_y() {
    return linear(Kind::reflect_y, {1.0, 0.0, 0.0, -1.0});
  }

  /// Involution (z1, z2) -> (z1, 2 rho z1 - z2).  It negates the residual
  /// z2 - rho z1 while fixing z1, so it preserves every correlation-rho
  /// normal density, has determinant -1, and reverses the sign of
  /// alpha z1 (z2 - rho z1).  The candidate solver below always returns this
  /// map's value among its candidates.
  static GenSymTransform product_rho_reflect(double rho) {
    return linear(Kind::product_rho_reflect, {1.0, 0.0, 2.0 * rho, -1.0});
  }

  /// Unimodular rotation analogue of the quarter turn for correlation rho:
  /// (1-rho^2)^{-1/2} [[-rho, 1], [-1, rho]].  Same three properties as the
  /// reflection; its inverse is its negative.
  static GenSymTransform product_rho_rotate(double rho) {
    if (!(std::fabs(rho) < 1.0))
      throw std::domain_error("product_rho_rotate: need |rho| < 1");
    const double s = std::sqrt(1.0 - rho * rho);
    return linear(Kind::product_rho_rotate,
                  {-rho / s, 1.0 / s, -1.0 / s, rho / s});
  }

  /// One of the four nonlinear solutions of the correlated-product system,
  /// selected by its position in the canonical candidate order.  The
  /// selection is continuous in a neighbourhood of any point where the two
  /// quadratic roots stay separated and z1 != 0.
  static GenSymTransform product_rho_branch(int index, double rho, double alpha) {
    if (index < 1 || index > 4)
      throw std::domain_error("product_rho_branch: index must be 1..4");
    GenSymTransform t;
    t.kind_ = Kind::product_rho_branch;
    t.forward_ = [index, rho, alpha](Vec2 z) -> Vec2 {
      const auto cands = solve_R_product_rho(z, rho, alpha);
      if (static_cast<std::size_t>(index) > cands.points.size())
        throw std::domain_error("product_rho_branch: candidate unavailable here");
      return cands.points[static_cast<std::size_t>(index) - 1];
    };
    t.inverse_ = [fwd = t.forward_, rho, alpha](Vec2 zp) -> Vec2 {
      const auto cands = solve_R_product_rho(zp, rho, alpha);
      if (cands.points.empty())
        throw std::domain_error("product_rho_branch: no inverse candidates");
      double best = std::numeric_limits<double>::infinity();
      Vec2 pick = cands.points.front();
      for (const Vec2& c : cands.points) {
        double res = std::numeric_limits<double>::infinity();
        try {
          const Vec2 img = fwd(c);
          res = norm({img.x - zp.x, img.y - zp.y});
        } catch (const std::domain_error&) {
        }
        if (res < best) {
          best = res;
          pick = c;
        }
      }
      return pick;
    };
    return t;
  }

 private:
  static GenSymTransform linear(Kind kind, std::array<double, 4> m) {
    GenSymTransform t;
    t.kind_ = kind;
    t.mat_ = m;
    const double det = m[0] * m[3] - m[1] * m[2];
    const std::array<double, 4> inv{m[3] / det, -m[1] / det, -m[2] / det,
                                    m[0] / det};
    t.forward_ = [m](Vec2 z) -> Vec2 {
      return {m[0] * z.x + m[1] * z.y, m[2] * z.x + m[3] * z.y};
    };
    t.inverse_ = [inv](Vec2 z) -> Vec2 {
      return {inv[0] * z.x + inv[1] * z.y, inv[2] * z.x + inv[3] * z.y};
    };
    return t;
  }

  std::function<Vec2(Vec2)> forward_, inverse_;
  std::array<double, 4> mat_{};
  Kind kind_ = Kind::negation;
};

/// Central-finite-difference Jacobian determinant with the step scaled to
/// the magnitude of the point.
inline double jacobian_det_numeric(const std::function<Vec2(Vec2)>& map, Vec2 z) {
  const double h = 1e-5 * (1.0 + norm(z));
  const Vec2 fxp = map({z.x + h, z.y});
  const Vec2 fxm = map({z.x - h, z.y});
  const Vec2 fyp = map({z.x, z.y + h});
  const Vec2 fym = map({z.x, z.y - h});
  const double j00 = (fxp.x - fxm.x) / (2.0 * h);
  const double j10 = (fxp.y - fxm.y) / (2.0 * h);
  const double j01 = (fyp.x - fym.x) / (2.0 * h);
  const double j11 = (fyp.y - fym.y) / (2.0 * h);
  return j00 * j11 - j01 * j10;
}

/// Worst-case deviations of the three generalized-symmetry conditions over
/// points sampled from the base itself.
struct RConditionReport {
  double density_match = 0.0;   // max |f0(y) - f0(R(y))|
  double jacobian_dev = 0.0;    // max ||det R'(y)| - 1|
  double w_antisym = 0.0;       // max |w(R(y)) + w(y)|
  std::size_t failed_evals = 0; // probes where the transform was undefined
  double tol = 0.0;
  bool pass = false;
};

inline RConditionReport verify_R_conditions(const BivariateBase& base,
                                            const Perturbation& w,
                                            const GenSymTransform& R,
                                            std::size_t probes, double tol,
                                            Rng& rng) {
  if (probes < 100)
    throw std::domain_error("verify_R_conditions: need probes >= 100");
  RConditionReport rep;
  rep.tol = tol;
  for (std::size_t i = 0; i < probes; ++i) {
    const Vec2 y = base.sample(rng);
    try {
      const Vec2 ry = R.forward(y);
      rep.density_match =
          std::max(rep.density_match, std::fabs(base.pdf(y) - base.pdf(ry)));
      rep.w_antisym = std::max(rep.w_antisym, std::fabs(w(ry) + w(y)));
      const double det =
          jacobian_det_numeric([&R](Vec2 z) { return R.forward(z); }, y);
      rep.jacobian_dev = std::max(rep.jacobian_dev, std::fabs(std::fabs(det) - 1.0));
    } catch (const std::domain_error&) {
      ++rep.failed_evals;
    }
  }
  rep.pass = rep.failed_evals == 0 && rep.density_match < tol &&
             rep.jacobian_dev < tol && rep.w_antisym < tol;
  return rep;
}

}  // namespace skewmod
