// skewmod command line: density grids, samples and verification reports for
// the modulated-symmetry families  f(z) = 2 f0(z) G(w(z)).
//
// Exit codes: 0 success / all checks pass, 1 numeric failure or failed
// check, 2 usage or parameter error, 3 requested representation unavailable.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skewmod/skewmod.hpp"

namespace {

using namespace skewmod;

constexpr std::uint64_t kDefaultSeed = 12345;

// flags accept plain decimals and simple fractions like "2/3"
double parse_real(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    const double n = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(text);
    const double d = std::stod(den, &used);
    if (used != den.size() || d == 0.0) throw std::invalid_argument(text);
    return n / d;
  } catch (const std::exception&) {
    throw CLI::ValidationError("'" + text + "' is not a number or fraction");
  }
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  if (out.empty())
    throw CLI::ValidationError("'" + text + "' is not a comma-separated list");
  return out;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("SKEWMOD_SEED");
  if (!env || !*env) return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw CLI::ValidationError("SKEWMOD_SEED is not an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------------------
// family specification and assembly
// ---------------------------------------------------------------------------

struct FamilyOptions {
  std::string family;
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<double> omega;
  std::optional<std::vector<double>> coeffs;
  int form = 1;
  bool form_given = false;
  std::string orientation = "plus";
  bool orientation_given = false;
  std::string g;  // empty: family default
};

struct FamilyRuntime {
  std::optional<ModulatedDensity> density;       // bivariate families
  std::optional<ModulatedDensity1D> density_1d;  // pit1d
  std::optional<GenSymTransform> flip;           // default flip transform
  std::function<double(Vec2)> invariance_stat;   // even w.r.t. flip
  std::string invariance_name;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw CLI::ValidationError(message);
}

ModulationCdf pick_g(const FamilyOptions& o, const char* family_default) {
  const std::string name = o.g.empty() ? family_default : o.g;
  if (name == "normal") return ModulationCdf::normal();
  if (name == "laplace") return ModulationCdf::laplace();
  throw CLI::ValidationError("--g must be 'normal' or 'laplace'");
}

// check that only the parameters meaningful for the family were given
void check_allowed(const FamilyOptions& o, bool alpha, bool rho, bool omega,
                   bool coeffs, bool form, bool orientation) {
  require(alpha || !o.alpha.has_value(),
          o.family + " does not take --alpha");
  require(rho || !o.rho.has_value(), o.family + " does not take --rho");
  require(omega || !o.omega.has_value(), o.family + " does not take --omega");
  require(coeffs || !o.coeffs.has_value(),
          o.family + " does not take --coeffs");
  require(form || !o.form_given, o.family + " does not take --form");
  require(orientation || !o.orientation_given,
          o.family + " does not take --orientation");
}

FamilyRuntime build_family(const FamilyOptions& o) {
  FamilyRuntime rt;
  const double rho = o.rho.value_or(0.0);

  if (o.family == "sn-diff-sq") {
    check_allowed(o, true, true, false, false, false, false);
    require(o.alpha.has_value(), "sn-diff-sq requires --alpha");
    rt.density = ModulatedDensity(BivariateBase::bivariate_normal(rho),
                                  pick_g(o, "normal"),
                                  Perturbation::poly_exchange({0.0, *o.alpha}));
    rt.flip = GenSymTransform::swap_xy();
    rt.invariance_stat = [rho](Vec2 z) { return mahalanobis(z, rho); };
    rt.invariance_name = "mahalanobis";
  } else if (o.family == "sn-poly") {
    check_allowed(o, false, true, false, true, false, false);
    require(o.coeffs.has_value(), "sn-poly requires --coeffs");
    rt.density = ModulatedDensity(BivariateBase::bivariate_normal(rho),
                                  pick_g(o, "normal"),
                                  Perturbation::poly_exchange(*o.coeffs));
    rt.flip = GenSymTransform::swap_xy();
    rt.invariance_stat = [rho](Vec2 z) { return mahalanobis(z, rho); };
    rt.invariance_name = "mahalanobis";
  } else if (o.family == "sn-product") {
    check_allowed(o, true, true, false, false, false, false);
    require(o.alpha.has_value(), "sn-product requires --alpha");
    rt.density = ModulatedDensity(BivariateBase::bivariate_normal(rho),
                                  pick_g(o, "normal"),
                                  Perturbation::product_even(*o.alpha));
    rt.flip = GenSymTransform::rot_plus();
    rt.invariance_stat = [](Vec2 z) { return z.x * z.x + z.y * z.y; };
    rt.invariance_name = "radius_sq";
  } else if (o.family == "sn-product-rho") {
    check_allowed(o, true, true, false, false, true, false);
    require(o.alpha.has_value() && o.rho.has_value(),
            "sn-product-rho requires --alpha and --rho");
    rt.density =
        ModulatedDensity(BivariateBase::bivariate_normal(rho), pick_g(o, "normal"),
                         Perturbation::product_rho(*o.alpha, rho, o.form));
    // no flip transform is exposed for this family
  } else if (o.family == "gamma-laplace") {
    check_allowed(o, true, false, true, false, false, false);
    require(o.alpha.has_value(), "gamma-laplace requires --alpha");
    const double omega = o.omega.value_or(1.0);
    require(omega > 0.0, "gamma-laplace requires --omega > 0");
    rt.density = ModulatedDensity(BivariateBase::product_gamma(omega),
                                  pick_g(o, "laplace"),
                                  Perturbation::poly_exchange({*o.alpha}));
    rt.flip = GenSymTransform::swap_xy();
    rt.invariance_stat = [](Vec2 z) { return z.x + z.y; };
    rt.invariance_name = "sum";
  } else if (o.family == "pit1d") {
    check_allowed(o, true, false, false, false, false, true);
    require(o.alpha.has_value(), "pit1d requires --alpha");
    require(o.orientation == "plus" || o.orientation == "minus",
            "--orientation must be 'plus' or 'minus'");
    const double a = *o.alpha;
    Pit1dSpec spec{UnivariateBase::unit_exponential(),
                   [a](double u) { return a * u; },
                   o.orientation == "plus" ? PitOrientation::plus
                                           : PitOrientation::minus};
    rt.density_1d = build_pit_1d(spec, pick_g(o, "normal"));
  } else if (o.family == "pit2d") {
    check_allowed(o, true, false, false, false, false, false);
    require(o.alpha.has_value(), "pit2d requires --alpha");
    const double a = *o.alpha;
    auto exp_cdf = [](double x) { return x >= 0.0 ? 1.0 - std::exp(-x) : 0.0; };
    rt.density = ModulatedDensity(
        BivariateBase::product_gamma(1.0), pick_g(o, "normal"),
        Perturbation::pit_2d(exp_cdf, exp_cdf, [a](double u) { return a * u; }));
  } else {
    throw CLI::ValidationError("unknown family '" + o.family + "'");
  }
  return rt;
}

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int run_grid(const FamilyOptions& fam, double xmin, double xmax, double ymin,
             double ymax, std::size_t nx, std::size_t ny,
             const std::string& out_path) {
  FamilyRuntime rt = build_family(fam);
  if (!rt.density) {
    std::cerr << "error: grid output needs a bivariate family; '" << fam.family
              << "' is univariate\n";
    return 2;
  }
  const DensityGrid grid = density_grid(*rt.density, xmin, xmax, ymin, ymax, nx, ny);
  OutputTarget out(out_path);
  out.stream() << "x,y,density\n";
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      out.stream() << fmt12(grid.x_center(ix)) << ',' << fmt12(grid.y_center(iy))
                   << ',' << fmt12(grid.at(ix, iy)) << '\n';
  return 0;
}

int run_sample(const FamilyOptions& fam, std::size_t n, std::uint64_t seed,
               const std::string& method, const std::string& out_path) {
  FamilyRuntime rt = build_family(fam);
  Rng rng(seed);
  SamplerStats stats;
  OutputTarget out(out_path);

  if (rt.density_1d) {
    if (method != "rejection") {
      std::cerr << "error: no flip representation is wired for '" << fam.family
                << "'; use --method rejection\n";
      return 3;
    }
    const auto xs = rejection_sample_1d(*rt.density_1d, n, rng, &stats);
    out.stream() << "z1\n";
    for (double x : xs) out.stream() << fmt12(x) << '\n';
  } else {
    std::vector<Vec2> zs;
    if (method == "rejection") {
      zs = rejection_sample(*rt.density, n, rng, &stats);
    } else if (method == "flip") {
      if (!rt.flip) {
        std::cerr << "error: flip sampling is not available for '" << fam.family
                  << "'; use --method rejection\n";
        return 3;
      }
      zs = flip_sample(*rt.density, *rt.flip, n, rng, &stats);
    } else {
      std::cerr << "error: --method must be 'rejection' or 'flip'\n";
      return 2;
    }
    out.stream() << "z1,z2\n";
    for (const Vec2& z : zs)
      out.stream() << fmt12(z.x) << ',' << fmt12(z.y) << '\n';
  }
  if (stats.acceptance_warning)
    std::cerr << "warning: acceptance rate far from 1/2; the construction may "
                 "not be a density\n";
  std::cerr << "acceptance rate: " << fmt12(stats.acceptance_rate()) << '\n';
  return 0;
}

int run_verify(const FamilyOptions& fam, double tol_abs, std::size_t n,
               std::uint64_t seed) {
  FamilyRuntime rt = build_family(fam);
  Rng rng(seed);
  bool all_pass = true;
  auto report = [&all_pass](const std::string& name, bool pass,
                            const std::string& value) {
    std::cout << "CHECK " << name << (pass ? " PASS " : " FAIL ") << value << '\n';
    all_pass = all_pass && pass;
  };

  const Tolerance quad_tol{tol_abs, 0.0, 20'000'000};

  if (rt.density_1d) {
    const auto& m = *rt.density_1d;
    auto r = integrate_1d([&m](double x) { return m.pdf(x); }, m.lo(), m.hi(),
                          quad_tol);
    const bool pass = r.converged && std::fabs(r.value - 1.0) <= 10.0 * tol_abs;
    report("normalization", pass, fmt12(r.value));

    // scalar symmetry check of w(X) about zero
    std::vector<double> wy(n), neg(n);
    for (auto& v : wy) v = m.w()(m.base().sample(rng));
    for (auto& v : neg) v = -m.w()(m.base().sample(rng));
    const auto ks = ks_two_sample(std::move(wy), std::move(neg));
    report("w_symmetry", ks.p_value > 0.01, "p=" + fmt12(ks.p_value));

    SamplerStats stats;
    rejection_sample_1d(m, n, rng, &stats);
    report("acceptance_rate", !stats.acceptance_warning,
           fmt12(stats.acceptance_rate()));
    return all_pass ? 0 : 1;
  }

  const ModulatedDensity& m = *rt.density;
  auto nr = verify_normalization(m, quad_tol);
  report("normalization", nr.pass, fmt12(nr.quadrature.value));

  const auto sym = symmetry_test(m.w(), m.base(), n, rng);
  report("w_symmetry", sym.verdict == SymmetryVerdict::symmetric,
         "p=" + fmt12(sym.p_value));

  SamplerStats stats;
  rejection_sample(m, n, rng, &stats);
  report("acceptance_rate", !stats.acceptance_warning,
         fmt12(stats.acceptance_rate()));

  if (rt.flip) {
    const auto rc = verify_R_conditions(m.base(), m.w(), *rt.flip, 300, 1e-6, rng);
    report("r_conditions", rc.pass,
           "density=" + fmt12(rc.density_match) + " jacobian=" +
               fmt12(rc.jacobian_dev) + " antisym=" + fmt12(rc.w_antisym));
    if (rc.pass) {
      const auto inv = invariance_check(m, *rt.flip, rt.invariance_stat, n, rng);
      report("invariance_" + rt.invariance_name, inv.p_value > 0.01,
             "p=" + fmt12(inv.p_value));
    }
  }

  if (fam.family == "gamma-laplace" && fam.omega.value_or(1.0) == 1.0) {
    // closed-form first moment against Monte Carlo
    const double alpha = *fam.alpha;
    const double closed = moment(Component::z1, 1.0, alpha);
    const auto zs = rejection_sample(m, n, rng);
    double s = 0.0, s2 = 0.0;
    for (const Vec2& z : zs) {
      s += z.x;
      s2 += z.x * z.x;
    }
    const double mean = s / static_cast<double>(n);
    const double sd = std::sqrt(std::max(0.0, s2 / static_cast<double>(n) - mean * mean));
    const double band = 4.0 * sd / std::sqrt(static_cast<double>(n));
    report("moment_z1", std::fabs(mean - closed) <= band,
           fmt12(mean) + " vs " + fmt12(closed));
  }
  return all_pass ? 0 : 1;
}

int run_moments(const FamilyOptions& fam, const std::vector<double>& r_list,
                const std::string& out_path) {
  require(fam.family == "gamma-laplace",
          "moments supports only --family gamma-laplace");
  require(fam.alpha.has_value(), "moments requires --alpha");
  require(fam.omega.value_or(1.0) == 1.0,
          "closed-form moments require omega = 1");
  const double alpha = *fam.alpha;
  require(alpha != 0.0, "moments requires --alpha != 0");
  const double corr = correlation(alpha);
  OutputTarget out(out_path);
  out.stream() << "r,EZ1r,EZ2r,correlation\n";
  for (double r : r_list) {
    out.stream() << fmt12(r) << ',' << fmt12(moment(Component::z1, r, alpha))
                 << ',' << fmt12(moment(Component::z2, r, alpha)) << ','
                 << fmt12(corr) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modulated-symmetry densities: grids, samples, verification"};
  app.require_subcommand(1);

  FamilyOptions fam;
  std::string alpha_s, rho_s, omega_s, coeffs_s, rlist_s;
  std::string out_path, method = "rejection";
  std::string seed_s, tol_s = "1e-7";
  double xmin = -3.0, xmax = 3.0, ymin = -3.0, ymax = 3.0;
  std::size_t nx = 201, ny = 201, nsamples = 20'000;

  std::vector<CLI::Option*> form_opts, orientation_opts;
  auto add_family_opts = [&](CLI::App* cmd) {
    cmd->add_option("--family", fam.family, "family name")->required();
    cmd->add_option("--alpha", alpha_s, "modulation strength (number or p/q)");
    cmd->add_option("--rho", rho_s, "base correlation (number or p/q)");
    cmd->add_option("--omega", omega_s, "gamma shape");
    cmd->add_option("--coeffs", coeffs_s, "comma list of polynomial coefficients");
    form_opts.push_back(
        cmd->add_option("--form", fam.form, "variant 1 or 2 of the correlated product"));
    orientation_opts.push_back(
        cmd->add_option("--orientation", fam.orientation, "pit1d orientation: plus|minus"));
    cmd->add_option("--g", fam.g, "modulation cdf: normal|laplace");
  };

  CLI::App* grid = app.add_subcommand("grid", "density values on a regular grid (CSV)");
  add_family_opts(grid);
  grid->add_option("--xmin", xmin);
  grid->add_option("--xmax", xmax);
  grid->add_option("--ymin", ymin);
  grid->add_option("--ymax", ymax);
  grid->add_option("--nx", nx);
  grid->add_option("--ny", ny);
  grid->add_option("--out", out_path, "output file (stdout if absent)");

  CLI::App* sample = app.add_subcommand("sample", "draw seeded samples (CSV)");
  add_family_opts(sample);
  sample->add_option("--n", nsamples, "sample size");
  sample->add_option("--seed", seed_s, "random seed (default: SKEWMOD_SEED)");
  sample->add_option("--method", method, "rejection|flip");
  sample->add_option("--out", out_path, "output file (stdout if absent)");

  CLI::App* verify = app.add_subcommand("verify", "run the family checks");
  add_family_opts(verify);
  verify->add_option("--tol", tol_s, "absolute quadrature tolerance");
  verify->add_option("--n", nsamples, "sample size for the empirical checks");
  verify->add_option("--seed", seed_s, "random seed (default: SKEWMOD_SEED)");

  CLI::App* moments = app.add_subcommand("moments", "closed-form moments (CSV)");
  add_family_opts(moments);
  moments->add_option("--r-list", rlist_s, "comma list of moment orders")->required();
  moments->add_option("--out", out_path, "output file (stdout if absent)");

  try {
    app.parse(argc, argv);

    if (!alpha_s.empty()) fam.alpha = parse_real(alpha_s);
    if (!rho_s.empty()) fam.rho = parse_real(rho_s);
    if (!omega_s.empty()) fam.omega = parse_real(omega_s);
    if (!coeffs_s.empty()) fam.coeffs = parse_real_list(coeffs_s);
    for (const CLI::Option* o : form_opts) fam.form_given |= o->count() > 0;
    for (const CLI::Option* o : orientation_opts)
      fam.orientation_given |= o->count() > 0;
    const std::uint64_t seed =
        seed_s.empty() ? default_seed()
                       : static_cast<std::uint64_t>(std::stoull(seed_s));

    if (grid->parsed()) return run_grid(fam, xmin, xmax, ymin, ymax, nx, ny, out_path);
    if (sample->parsed()) return run_sample(fam, nsamples, seed, method, out_path);
    if (verify->parsed()) return run_verify(fam, parse_real(tol_s), nsamples, seed);
    if (moments->parsed()) return run_moments(fam, parse_real_list(rlist_s), out_path);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const skewmod::representation_unavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
