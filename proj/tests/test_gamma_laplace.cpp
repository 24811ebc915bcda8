#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "skewmod/gamma_laplace.hpp"
#include "skewmod/samplers.hpp"

using namespace skewmod;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double gamma_pdf(double x, int omega) {
  if (x <= 0.0) return 0.0;
  return std::exp((omega - 1) * std::log(x) - x - log_gamma(omega));
}

// quadrature oracle for the density of T = X/alpha + Y2: integrate
// f1(y2) g(alpha (t - y2)) alpha over y2, split at the Laplace kink.
double threshold_pdf_oracle(double t, double alpha, int omega) {
  auto f = [&](double y2) {
    return gamma_pdf(y2, omega) * laplace_pdf(alpha * (t - y2)) * alpha;
  };
  const double hi = omega + 40.0 * std::max(1.0, std::sqrt(double(omega))) +
                    std::fabs(t) + 20.0;
  const Tolerance tol{1e-12, 0.0, 2'000'000};
  if (t <= 0.0) return integrate_1d(f, 0.0, hi, tol).value;
  return integrate_1d(f, 0.0, t, tol).value + integrate_1d(f, t, hi, tol).value;
}

}  // namespace

TEST_CASE("threshold density: left branch closed form") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (int omega : {1, 2, 3}) {
      for (double t : {-3.0, -1.0, -0.1, 0.0}) {
        const double want = 0.5 * alpha * std::exp(alpha * t) /
                            std::pow(1.0 + alpha, omega);
        CHECK(threshold_pdf(t, alpha, omega) ==
              doctest::Approx(want).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("threshold density matches the quadrature oracle") {
  const std::vector<std::pair<double, int>> params = {
      {0.5, 1}, {1.0, 1}, {2.0, 1}, {2.0, 3}, {3.0, 2}};
  for (auto [alpha, omega] : params) {
    for (double t : {-1.0, 0.5, 1.0, 3.0}) {
      const double want = threshold_pdf_oracle(t, alpha, omega);
      CHECK(std::fabs(threshold_pdf(t, alpha, omega) - want) < 1e-8);
    }
  }
}

TEST_CASE("threshold density is non-negative and integrates to one") {
  const std::vector<std::pair<double, int>> params = {
      {0.5, 1}, {1.0, 1}, {2.0, 1}, {2.0, 3}, {3.0, 2}};
  for (auto [alpha, omega] : params) {
    for (double t = -5.0; t <= 20.0; t += 0.25)
      CHECK(threshold_pdf(t, alpha, omega) >= 0.0);
    auto r = integrate_1d(
        [alpha, omega](double t) { return threshold_pdf(t, alpha, omega); },
        -kInf, kInf, Tolerance{1e-10, 0.0, 4'000'000});
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 1.0) < 1e-8);
  }
}

TEST_CASE("threshold cdf: fixed values and continuity") {
  CHECK(threshold_cdf(0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(threshold_cdf(0.0, alpha) ==
          doctest::Approx(1.0 / (2.0 * (1.0 + alpha))).epsilon(1e-14));
    // continuity across t = 0
    CHECK(std::fabs(threshold_cdf(1e-12, alpha) - threshold_cdf(-1e-12, alpha)) <
          1e-10);
    // limits
    CHECK(threshold_cdf(-80.0, alpha) < 1e-12);
    CHECK(threshold_cdf(60.0, alpha) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // the alpha = 1 branch is the limit of the general branch
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::fabs(threshold_cdf(t, 1.0001) - threshold_cdf(t, 1.0)) < 1e-3);
    CHECK(std::fabs(threshold_cdf(t, 0.9999) - threshold_cdf(t, 1.0)) < 1e-3);
  }
}

TEST_CASE("threshold cdf is the integral of the density") {
  int probes = 0;
  for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
    for (double t : {-2.0, -0.5, 0.3, 1.0, 2.5}) {
      auto r = integrate_1d(
          [alpha](double s) { return threshold_pdf(s, alpha, 1); }, -kInf, t,
          Tolerance{1e-11, 0.0, 2'000'000});
      CHECK(std::fabs(threshold_cdf(t, alpha) - r.value) < 1e-8);
      ++probes;
    }
  }
  CHECK(probes == 20);
}

TEST_CASE("threshold cdf derivative recovers the density") {
  const double h = 1e-6;
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double t : {-1.0, 0.4, 1.1, 3.2}) {
      const double fd =
          (threshold_cdf(t + h, alpha) - threshold_cdf(t - h, alpha)) / (2.0 * h);
      CHECK(std::fabs(fd - threshold_pdf(t, alpha, 1)) < 1e-6);
    }
  }
}

TEST_CASE("threshold cdf is monotone") {
  for (double alpha : {0.5, 1.0, 3.0}) {
    double prev = 0.0;
    for (double t = -10.0; t <= 15.0; t += 0.05) {
      const double v = threshold_cdf(t, alpha);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("marginal densities partition twice the exponential") {
  for (double alpha : {0.5, 2.0, -2.0}) {
    for (double z : {0.1, 0.7, 1.5, 4.0}) {
      const double sum = marginal_pdf(Component::z1, z, alpha) +
                         marginal_pdf(Component::z2, z, alpha);
      CHECK(std::fabs(sum - 2.0 * std::exp(-z)) < 1e-12);
    }
  }
  CHECK(marginal_pdf(Component::z1, -1.0, 2.0) == 0.0);
  CHECK(marginal_pdf(Component::z1, 0.0, 2.0) == 0.0);
  CHECK_THROWS_AS(marginal_pdf(Component::z1, 1.0, 0.0), std::domain_error);
}

TEST_CASE("marginal densities integrate to one") {
  for (double alpha : {0.5, 2.0}) {
    for (Component which : {Component::z1, Component::z2}) {
      auto r = integrate_1d(
          [which, alpha](double z) { return marginal_pdf(which, z, alpha); },
          0.0, 40.0, Tolerance{1e-9, 0.0, 2'000'000});
      CHECK(std::fabs(r.value - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("negative alpha exchanges the marginal roles exactly") {
  for (double z : {0.2, 1.0, 3.0}) {
    CHECK(marginal_pdf(Component::z1, z, -2.0) ==
          marginal_pdf(Component::z2, z, 2.0));
    CHECK(marginal_pdf(Component::z2, z, -2.0) ==
          marginal_pdf(Component::z1, z, 2.0));
  }
}

TEST_CASE("sampled first component follows the closed-form marginal") {
  // cdf of Z1 tabulated by cumulative quadrature, then a KS test of the
  // rejection-sampled component against it
  const double alpha = 2.0;
  const int cells = 4000;
  const double hi = 30.0;
  std::vector<double> cdf_grid(cells + 1, 0.0);
  const Tolerance tol{1e-12, 0.0, 100'000};
  for (int i = 0; i < cells; ++i) {
    const double a = hi * i / cells, b = hi * (i + 1) / cells;
    cdf_grid[i + 1] =
        cdf_grid[i] +
        integrate_1d([alpha](double z) { return marginal_pdf(Component::z1, z, alpha); },
                     a, b, tol)
            .value;
  }
  auto cdf = [&](double z) {
    if (z <= 0.0) return 0.0;
    if (z >= hi) return 1.0;
    const double u = z / hi * cells;
    const int i = static_cast<int>(u);
    const double frac = u - i;
    return cdf_grid[i] * (1.0 - frac) + cdf_grid[i + 1] * frac;
  };

  auto m = ExpLaplaceSkew{1, alpha}.density();
  Rng rng(500);
  auto zs = rejection_sample(m, 1'000'000, rng);
  std::vector<double> z1(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) z1[i] = zs[i].x;
  auto r = ks_one_sample(std::move(z1), cdf);
  CHECK(r.p_value > 0.01);
}

TEST_CASE("moments: closed forms and identities") {
  // alpha -> 0 limit restores the exponential moments
  for (double r : {0.5, 1.0, 2.0, 3.5}) {
    const double gamma_r1 = std::exp(log_gamma(r + 1.0));
    CHECK(moment(Component::z1, r, 1e-8) ==
          doctest::Approx(gamma_r1).epsilon(1e-6));
  }
  CHECK(moment(Component::z1, 1.0, 1.0) == doctest::Approx(1.375).epsilon(1e-14));
  CHECK(moment(Component::z2, 1.0, 1.0) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(moment(Component::z1, 2.0, 1.0) == doctest::Approx(3.25).epsilon(1e-13));
  CHECK(moment(Component::z2, 2.0, 1.0) == doctest::Approx(0.75).epsilon(1e-13));

  for (double r : {0.5, 1.0, 2.0, 3.0}) {
    for (double alpha : {0.3, 1.0, 2.0, 10.0}) {
      const double gamma_r1 = std::exp(log_gamma(r + 1.0));
      const double sum =
          moment(Component::z1, r, alpha) + moment(Component::z2, r, alpha);
      CHECK(std::fabs(sum - 2.0 * gamma_r1) < 1e-12 * gamma_r1);
      // subscript swap under a sign change, exact
      CHECK(moment(Component::z1, r, -alpha) == moment(Component::z2, r, alpha));
    }
  }
  CHECK_THROWS_AS(moment(Component::z1, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(moment(Component::z1, 1.0, 0.0), std::domain_error);
}

TEST_CASE("closed-form mean confirmed by Monte Carlo") {
  auto m = ExpLaplaceSkew{1, 1.0}.density();
  Rng rng(501);
  auto zs = rejection_sample(m, 1'000'000, rng);
  double s = 0.0, s2 = 0.0;
  for (const Vec2& z : zs) {
    s += z.x;
    s2 += z.x * z.x;
  }
  const double n = static_cast<double>(zs.size());
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::fabs(mean - 1.375) < 3.0 * sd / std::sqrt(n));
}

TEST_CASE("correlation curve") {
  CHECK(correlation(0.0) == 0.0);
  CHECK(std::fabs(correlation(1.0) - 0.2012) < 1e-3);
  CHECK(std::fabs(correlation(1e4) - 1.0 / std::sqrt(5.0)) < 1e-3);
  double prev = -1.0;
  for (double a : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 1e4}) {
    const double c = correlation(a);
    CHECK(c >= prev);
    prev = c;
  }
  for (double a : {0.5, 1.0, 3.0})
    CHECK(correlation(-a) == doctest::Approx(correlation(a)).epsilon(1e-14));
}

TEST_CASE("parameter validation for the closed forms") {
  CHECK_THROWS_AS(threshold_pdf(1.0, -1.0, 1), std::domain_error);
  CHECK_THROWS_AS(threshold_pdf(1.0, 0.0, 1), std::domain_error);
  CHECK_THROWS_AS(threshold_pdf(1.0, 1.0, 0), std::domain_error);
  CHECK_THROWS_AS(threshold_cdf(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS((ExpLaplaceSkew{0, 1.0}.density()), std::domain_error);
}

TEST_CASE("assembled density agrees with the spot value") {
  auto m = ExpLaplaceSkew{1, 2.0}.density();
  CHECK(m.pdf({1.0, 1.0}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}
