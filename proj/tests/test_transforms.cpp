#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "skewmod/transforms.hpp"

using namespace skewmod;

namespace {

Vec2 apply_matrix(const std::array<double, 4>& m, Vec2 z) {
  return {m[0] * z.x + m[1] * z.y, m[2] * z.x + m[3] * z.y};
}

double matrix_det(const std::array<double, 4>& m) {
  return m[0] * m[3] - m[1] * m[2];
}

std::vector<GenSymTransform> linear_kinds() {
  return {GenSymTransform::negation(),     GenSymTransform::swap_xy(),
          GenSymTransform::rot_plus(),     GenSymTransform::rot_minus(),
          GenSymTransform::reflect_x(),    GenSymTransform::reflect_y(),
          GenSymTransform::product_rho_reflect(0.4),
          GenSymTransform::product_rho_rotate(0.4)};
}

}  // namespace

TEST_CASE("linear kinds agree with their matrices and invert exactly") {
  Rng rng(10);
  for (const auto& t : linear_kinds()) {
    CHECK(t.is_linear());
    for (int i = 0; i < 50; ++i) {
      const Vec2 z{3.0 * (rng.uniform() - 0.5), 3.0 * (rng.uniform() - 0.5)};
      const Vec2 img = t.forward(z);
      const Vec2 want = apply_matrix(t.matrix(), z);
      CHECK(std::fabs(img.x - want.x) < 1e-14);
      CHECK(std::fabs(img.y - want.y) < 1e-14);
      const Vec2 back = t.inverse(img);
      CHECK(norm({back.x - z.x, back.y - z.y}) < 1e-10);
    }
  }
}

TEST_CASE("quarter-turn algebra") {
  auto r1 = GenSymTransform::rot_plus();
  auto r2 = GenSymTransform::rot_minus();
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vec2 z{rng.normal(), rng.normal()};
    // R2 = R1^T = R1^{-1}
    const Vec2 a = r2.forward(z);
    const Vec2 b = r1.inverse(z);
    CHECK(norm({a.x - b.x, a.y - b.y}) < 1e-14);
    // R1^4 = identity
    Vec2 w = z;
    for (int k = 0; k < 4; ++k) w = r1.forward(w);
    CHECK(norm({w.x - z.x, w.y - z.y}) < 1e-14);
  }
  // swap is its own inverse
  auto r0 = GenSymTransform::swap_xy();
  const Vec2 z{0.3, -1.2};
  const Vec2 twice = r0.forward(r0.forward(z));
  CHECK(norm({twice.x - z.x, twice.y - z.y}) == 0.0);
}

TEST_CASE("numeric jacobian matches the exact determinant for linear kinds") {
  Rng rng(4);
  for (const auto& t : linear_kinds()) {
    const double want = matrix_det(t.matrix());
    for (int i = 0; i < 50; ++i) {
      const Vec2 z{4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)};
      const double det =
          jacobian_det_numeric([&t](Vec2 p) { return t.forward(p); }, z);
      CHECK(std::fabs(det - want) < 1e-6);
    }
  }
}

TEST_CASE("solver candidates satisfy both defining equations") {
  for (double rho : {1.0 / 3.0, 2.0 / 3.0}) {
    const Vec2 z0{2.0, 1.0};
    const double d0 = mahalanobis(z0, rho);
    const double w0 = z0.x * z0.y - rho * z0.x * z0.x;
    auto c = solve_R_product_rho(z0, rho, 1.0);
    CHECK_FALSE(c.negative_discriminant);
    CHECK(c.points.size() == 4);
    for (const Vec2& p : c.points) {
      CHECK(std::fabs(mahalanobis(p, rho) - d0) < 1e-9);
      CHECK(std::fabs((p.x * p.y - rho * p.x * p.x) + w0) < 1e-9);
      CHECK(p.x != 0.0);
    }
  }
}

TEST_CASE("at rho = 0 the candidates are the four matrix images") {
  const Vec2 z0{2.0, 1.0};
  auto c = solve_R_product_rho(z0, 0.0, 1.0);
  REQUIRE(c.points.size() == 4);
  std::vector<Vec2> want = {
      GenSymTransform::rot_plus().forward(z0),
      GenSymTransform::rot_minus().forward(z0),
      GenSymTransform::reflect_x().forward(z0),
      GenSymTransform::reflect_y().forward(z0),
  };
  for (const Vec2& w : want) {
    bool found = false;
    for (const Vec2& p : c.points)
      if (norm({p.x - w.x, p.y - w.y}) < 1e-12) found = true;
    CHECK(found);
  }
}

TEST_CASE("the sign of w at the probe flips between the two correlations") {
  // at (2,1) the product function is positive for rho = 1/3 and negative
  // for rho = 2/3, which is what changes the intersection pattern of the
  // two loci
  const Vec2 z0{2.0, 1.0};
  const double w_third = z0.x * z0.y - (1.0 / 3.0) * z0.x * z0.x;
  const double w_two_thirds = z0.x * z0.y - (2.0 / 3.0) * z0.x * z0.x;
  CHECK(w_third > 0.0);
  CHECK(w_two_thirds < 0.0);
}

TEST_CASE("solver rejects degenerate input") {
  CHECK_THROWS_AS(solve_R_product_rho({0.0, 1.0}, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(solve_R_product_rho({1.0, 1.0}, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(GenSymTransform::product_rho_branch(0, 0.5, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(GenSymTransform::product_rho_branch(5, 0.5, 1.0),
                  std::domain_error);
}

// The four candidate maps are pointwise values of the linear maps
// product_rho_reflect and +-product_rho_rotate; in particular their local
// Jacobian determinants all have modulus one.  (The commonly stated claim
// that these transformations are non-linear with |det R'| != 1 does not
// survive the algebra: u = z1^2 always solves the quadratic.)
TEST_CASE("branch maps through a generic point are measure preserving") {
  const double rho = 2.0 / 3.0;
  const Vec2 z0{2.0, 1.0};
  for (int idx = 1; idx <= 4; ++idx) {
    auto r = GenSymTransform::product_rho_branch(idx, rho, 1.0);
    const double det =
        jacobian_det_numeric([&r](Vec2 p) { return r.forward(p); }, z0);
    CHECK(std::fabs(std::fabs(det) - 1.0) < 1e-6);
    // right-inverse property: forward(inverse(z')) returns z'
    const Vec2 img = r.forward(z0);
    const Vec2 pre = r.inverse(img);
    const Vec2 again = r.forward(pre);
    CHECK(norm({again.x - img.x, again.y - img.y}) < 1e-10);
  }
}

TEST_CASE("candidate values coincide with the closed-form linear maps") {
  const double rho = 2.0 / 3.0;
  auto reflect = GenSymTransform::product_rho_reflect(rho);
  auto rotate = GenSymTransform::product_rho_rotate(rho);
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Vec2 z{3.0 * (rng.uniform() - 0.5), 3.0 * (rng.uniform() - 0.5)};
    if (std::fabs(z.x) < 0.05) continue;
    auto c = solve_R_product_rho(z, rho, 1.0);
    for (const Vec2 want : {reflect.forward(z), rotate.forward(z)}) {
      bool found = false;
      for (const Vec2& p : c.points)
        if (norm({p.x - want.x, p.y - want.y}) < 1e-9) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("verify_R_conditions passes the classical pairings") {
  Rng rng(20);
  const double tol = 1e-6;

  // negation with an odd function and a centrally symmetric base
  auto rep = verify_R_conditions(BivariateBase::bivariate_normal(0.3),
                                 Perturbation::linear_odd(2.0, -1.0),
                                 GenSymTransform::negation(), 200, tol, rng);
  CHECK(rep.pass);

  // coordinate swap with an exchange-antisymmetric function
  rep = verify_R_conditions(BivariateBase::bivariate_normal(2.0 / 3.0),
                            Perturbation::poly_exchange({1.0, -1.0}),
                            GenSymTransform::swap_xy(), 200, tol, rng);
  CHECK(rep.pass);
  rep = verify_R_conditions(BivariateBase::product_gamma(2.0),
                            Perturbation::poly_exchange({1.5}),
                            GenSymTransform::swap_xy(), 200, tol, rng);
  CHECK(rep.pass);
  rep = verify_R_conditions(BivariateBase::gumbel_biv_exp(0.5),
                            Perturbation::sin_diff(1.0),
                            GenSymTransform::swap_xy(), 200, tol, rng);
  CHECK(rep.pass);

  // all four unimodular maps work for the independent product function
  for (auto t : {GenSymTransform::rot_plus(), GenSymTransform::rot_minus(),
                 GenSymTransform::reflect_x(), GenSymTransform::reflect_y()}) {
    rep = verify_R_conditions(BivariateBase::bivariate_normal(0.0),
                              Perturbation::product_even(1.0), t, 200, tol, rng);
    CHECK(rep.pass);
  }
}

TEST_CASE("verify_R_conditions fails when the base is not invariant") {
  Rng rng(21);
  // rotation does not preserve a correlated normal
  auto rep = verify_R_conditions(BivariateBase::bivariate_normal(0.5),
                                 Perturbation::product_even(1.0),
                                 GenSymTransform::rot_plus(), 200, 1e-6, rng);
  CHECK_FALSE(rep.pass);
  CHECK(rep.density_match > 1e-6);
  CHECK(rep.jacobian_dev < 1e-6);
  CHECK(rep.w_antisym < 1e-6);
}

TEST_CASE("verify_R_conditions accepts the correlated product transforms") {
  Rng rng(22);
  const double rho = 2.0 / 3.0;
  auto base = BivariateBase::bivariate_normal(rho);
  auto w = Perturbation::product_rho(1.0, rho);
  for (auto t : {GenSymTransform::product_rho_reflect(rho),
                 GenSymTransform::product_rho_rotate(rho)}) {
    auto rep = verify_R_conditions(base, w, t, 300, 1e-6, rng);
    CHECK(rep.pass);
  }
}

TEST_CASE("verify_R_conditions validates the probe count") {
  Rng rng(2);
  CHECK_THROWS_AS(verify_R_conditions(BivariateBase::bivariate_normal(0.0),
                                      Perturbation::product_even(1.0),
                                      GenSymTransform::rot_plus(), 99, 1e-6, rng),
                  std::domain_error);
}
