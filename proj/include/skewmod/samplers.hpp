#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewmod/modulated.hpp"
#include "skewmod/numerics.hpp"
#include "skewmod/rng.hpp"
#include "skewmod/transforms.hpp"

namespace skewmod {

/// Thrown when a flip representation is requested without a transform that
/// passes the generalized-symmetry conditions.
class representation_unavailable : public std::runtime_error {
 public:
  explicit representation_unavailable(const std::string& what)
      : std::runtime_error(what) {}
};

struct SamplerStats {
  std::size_t draws_attempted = 0;
  std::size_t draws_accepted = 0;
  std::size_t flips = 0;
  /// Set when, after at least 1e4 attempts, the acceptance proportion falls
  /// outside the 5-sigma binomial band around 1/2 -- a signal that w(Y) is
  /// not symmetrically distributed and the construction is not a density.
  bool acceptance_warning = false;

  double acceptance_rate() const {
    return draws_attempted == 0
               ? 0.0
               : static_cast<double>(draws_accepted) /
                     static_cast<double>(draws_attempted);
  }
};

/// Exact i.i.d. draws by selection: keep Y when X <= w(Y), X ~ G independent
/// of Y ~ f0.  With reverse_inequality the complementary half is kept, which
/// samples the dual density.  Ties X == w(Y) count as acceptance.
inline std::vector<Vec2> rejection_sample(const ModulatedDensity& m,
                                          std::size_t n, Rng& rng,
                                          SamplerStats* stats = nullptr,
                                          bool reverse_inequality = false) {
  if (n < 1) throw std::domain_error("rejection_sample: need n >= 1");
  std::vector<Vec2> out;
  out.reserve(n);
  SamplerStats local;
  while (out.size() < n) {
    const Vec2 y = m.base().sample(rng);
    const double x = m.g().sample(rng);
    ++local.draws_attempted;
    const bool keep = reverse_inequality ? (x >= m.w()(y)) : (x <= m.w()(y));
    if (keep) {
      ++local.draws_accepted;
      out.push_back(y);
    }
  }
  if (local.draws_attempted >= 10'000) {
    const double band =
        5.0 * std::sqrt(0.25 / static_cast<double>(local.draws_attempted));
    if (std::fabs(local.acceptance_rate() - 0.5) > band)
      local.acceptance_warning = true;
  }
  if (stats) *stats = local;
  return out;
}

/// Exact i.i.d. draws with zero rejection: Z = Y when X <= w(Y) and
/// Z = R^{-1}(Y) otherwise.  The three generalized-symmetry conditions are
/// verified on probe points before any draw; a transform that fails them
/// would silently produce the wrong distribution, so failure refuses.
inline std::vector<Vec2> flip_sample(const ModulatedDensity& m,
                                     const GenSymTransform& R, std::size_t n,
                                     Rng& rng, SamplerStats* stats = nullptr,
                                     std::size_t verify_probes = 200,
                                     double verify_tol = 1e-6) {
  if (n < 1) throw std::domain_error("flip_sample: need n >= 1");
  const RConditionReport rep =
      verify_R_conditions(m.base(), m.w(), R, verify_probes, verify_tol, rng);
  if (!rep.pass) {
    throw representation_unavailable(
        "flip_sample: transform fails the generalized-symmetry conditions "
        "(density match " + std::to_string(rep.density_match) +
        ", jacobian deviation " + std::to_string(rep.jacobian_dev) +
        ", antisymmetry " + std::to_string(rep.w_antisym) +
        ", undefined probes " + std::to_string(rep.failed_evals) + ")");
  }
  std::vector<Vec2> out;
  out.reserve(n);
  SamplerStats local;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 y = m.base().sample(rng);
    const double x = m.g().sample(rng);
    ++local.draws_attempted;
    ++local.draws_accepted;
    if (x <= m.w()(y)) {
      out.push_back(y);
    } else {
      out.push_back(R.inverse(y));
      ++local.flips;
    }
  }
  if (stats) *stats = local;
  return out;
}

/// Scalar counterpart of rejection_sample for the 1-D constructions.
inline std::vector<double> rejection_sample_1d(const ModulatedDensity1D& m,
                                               std::size_t n, Rng& rng,
                                               SamplerStats* stats = nullptr) {
  if (n < 1) throw std::domain_error("rejection_sample_1d: need n >= 1");
  std::vector<double> out;
  out.reserve(n);
  SamplerStats local;
  while (out.size() < n) {
    const double y = m.base().sample(rng);
    const double x = m.g().sample(rng);
    ++local.draws_attempted;
    if (x <= m.w()(y)) {
      ++local.draws_accepted;
      out.push_back(y);
    }
  }
  if (local.draws_attempted >= 10'000) {
    const double band =
        5.0 * std::sqrt(0.25 / static_cast<double>(local.draws_attempted));
    if (std::fabs(local.acceptance_rate() - 0.5) > band)
      local.acceptance_warning = true;
  }
  if (stats) *stats = local;
  return out;
}

struct InvarianceReport {
  double statistic = 0.0;
  double p_value = 0.0;
  double mean_base = 0.0;       // mean of t(Y)
  double mean_modulated = 0.0;  // mean of t(Z)
  std::size_t n = 0;
};

/// Distribution check of the invariance t(Z) =d t(Y) for statistics t that
/// are even with respect to R, i.e. t(z) = t(R^{-1}(z)).  The evenness is
/// spot-checked on base draws first; the comparison itself is a two-sample
/// KS between t over flip samples and t over base samples.
inline InvarianceReport invariance_check(const ModulatedDensity& m,
                                         const GenSymTransform& R,
                                         const std::function<double(Vec2)>& t,
                                         std::size_t n, Rng& rng) {
  for (int i = 0; i < 64; ++i) {
    const Vec2 y = m.base().sample(rng);
    const double a = t(y);
    const double b = t(R.inverse(y));
    if (std::fabs(a - b) > 1e-9 * (1.0 + std::fabs(a)))
      throw std::domain_error(
          "invariance_check: statistic is not even with respect to R");
  }
  const std::vector<Vec2> z = flip_sample(m, R, n, rng);
  std::vector<double> tz(n), ty(n);
  for (std::size_t i = 0; i < n; ++i) tz[i] = t(z[i]);
  for (std::size_t i = 0; i < n; ++i) ty[i] = t(m.base().sample(rng));
  InvarianceReport rep;
  rep.n = n;
  double sz = 0, sy = 0;
  for (double v : tz) sz += v;
  for (double v : ty) sy += v;
  rep.mean_modulated = sz / static_cast<double>(n);
  rep.mean_base = sy / static_cast<double>(n);
  const KsResult ks = ks_two_sample(std::move(tz), std::move(ty));
  rep.statistic = ks.statistic;
  rep.p_value = ks.p_value;
  return rep;
}

}  // namespace skewmod
