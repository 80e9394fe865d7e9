#include "susy/verify.hpp"

#include "susy/brownian.hpp"
#include "susy/colorflavor.hpp"
#include "susy/duality.hpp"
#include "susy/ensembles.hpp"
#include "susy/genfun.hpp"
#include "susy/quadrature.hpp"
#include "susy/random_elements.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace susy {

namespace {

using testgen::rand_element;
using testgen::rand_supermatrix;

constexpr double kPi = std::numbers::pi;

double rel(double err, double scale) { return err / std::max(1.0, scale); }

// Runs body, which returns (cases, residual); the check passes when residual <= tol.
// A numeric failure inside a check fails that check and the suite carries on.
CheckResult timed(const VerifyOptions& opt, const std::string& name, double tol,
                  const std::function<std::pair<int, double>()>& body, std::string note = {}) {
  CheckResult r;
  r.name = name;
  r.tol = opt.tolerance(name, tol);
  const auto t0 = std::chrono::steady_clock::now();
  r.note = std::move(note);
  try {
    const auto [cases, residual] = body();
    r.cases = cases;
    r.residual = residual;
  } catch (const NumericError& e) {
    r.residual = std::numeric_limits<double>::infinity();
    r.note = std::string("numeric failure: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = std::isfinite(r.residual) && r.residual <= r.tol;
  return r;
}

template <class C>
double diff(const BasicGrassmann<C>& a, const BasicGrassmann<C>& b) {
  if constexpr (CoeffTraits<C>::exact) {
    return a == b ? 0.0 : std::max(max_abs_diff(a, b), 1.0);  // any exact mismatch counts fully
  } else {
    return rel(max_abs_diff(a, b), std::max(max_abs_coeff(a), max_abs_coeff(b)));
  }
}

template <class C>
std::vector<CheckResult> algebra_mode(const VerifyOptions& opt, const std::string& mode, double tol) {
  const int n = 1000, pairs = 3;
  auto rng = [&](int salt) { return std::mt19937_64(opt.seed * 1000003ULL + static_cast<std::uint64_t>(salt)); };
  using G = BasicGrassmann<C>;
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "grassmann.anticommutativity." + mode, tol, [&] {
    auto g = rng(1);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const G o1 = rand_element<C>(g, pairs, 1, 4), o2 = rand_element<C>(g, pairs, 1, 4);
      const G e = rand_element<C>(g, pairs, 0, 4), x = rand_element<C>(g, pairs, -1, 4);
      worst = std::max({worst, diff(G(o1 * o2), G(-(o2 * o1))), diff(G(e * x), G(x * e))});
    }
    return std::pair{n, worst};
  }));
  out.push_back(timed(opt, "grassmann.associativity." + mode, tol, [&] {
    auto g = rng(2);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const G a = rand_element<C>(g, pairs, -1, 5), b = rand_element<C>(g, pairs, -1, 5),
              c = rand_element<C>(g, pairs, -1, 5);
      worst = std::max(worst, diff(G((a * b) * c), G(a * (b * c))));
    }
    return std::pair{n, worst};
  }));
  out.push_back(timed(opt, "grassmann.nilpotency." + mode, tol, [&] {
    auto g = rng(3);
    double worst = 0.0;
    const G zero(pairs);
    for (int i = 0; i < n; ++i) {
      const G o = rand_element<C>(g, pairs, 1, 6);
      worst = std::max(worst, diff(G(o * o), zero));
      // a soul of even degree >= 2 dies at power pairs + 1
      const G s = rand_element<C>(g, pairs, 0, 6, false);
      G p = s;
      for (int k = 0; k < pairs; ++k) p = p * s;
      worst = std::max(worst, diff(p, zero));
    }
    return std::pair{n, worst};
  }));
  out.push_back(timed(opt, "grassmann.conjugation_involution." + mode, tol, [&] {
    auto g = rng(4);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const G x = rand_element<C>(g, pairs, -1, 6);
      worst = std::max(worst, diff(conjugate(conjugate(x, Conjugation::OrderReversal), Conjugation::OrderReversal), x));
      // the sign convention flips the odd part on a double conjugation
      std::vector<typename G::Term> flipped;
      for (const auto& t : x.terms()) flipped.push_back({t.mask, std::popcount(t.mask) % 2 ? C(-t.coeff) : t.coeff});
      worst = std::max(worst, diff(conjugate(conjugate(x)), G::from_terms(pairs, flipped)));
    }
    return std::pair{n, worst};
  }));
  out.push_back(timed(opt, "grassmann.berezin_exp." + mode, tol, [&] {
    auto g = rng(5);
    double worst = 0.0;
    // int exp(a zeta* zeta) dzeta dzeta* = a * norm^2
    const G mod = G::zeta_star(1, 0) * G::zeta(1, 0);
    for (int i = 0; i < n; ++i) {
      const C a = testgen::rand_coeff<C>(g);
      if constexpr (CoeffTraits<C>::exact) {
        const G r = berezin_integrate(gexp(G(a * mod)), {zeta_id(0), zeta_star_id(0)}, CoeffTraits<C>::from_int(1));
        worst = std::max(worst, diff(r, G(1, a)));
      } else {
        const G r = berezin_integrate(gexp(G(a * mod)), {zeta_id(0), zeta_star_id(0)}, default_berezin_norm());
        worst = std::max(worst, std::abs(r.body() - a / (2.0 * kPi)) / std::max(1.0, std::abs(a)));
      }
    }
    return std::pair{n, worst};
  }));
  return out;
}

}  // namespace

double VerifyOptions::tolerance(const std::string& check, double fallback) const {
  auto it = tol.find(check);
  return it == tol.end() ? fallback : it->second;
}

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> SuiteReport::failing() const {
  std::vector<std::string> f;
  for (const auto& c : checks) {
    if (!c.pass) f.push_back(c.name);
  }
  return f;
}

std::vector<CheckResult> check_grassmann_algebra(const VerifyOptions& opt) {
  auto out = algebra_mode<GaussRational>(opt, "exact", 0.0);
  auto fl = algebra_mode<Complex>(opt, "float", 1e-12);
  out.insert(out.end(), fl.begin(), fl.end());
  return out;
}

std::vector<CheckResult> check_supermatrix(const VerifyOptions& opt) {
  const int n = 500;
  std::mt19937_64 rng(opt.seed * 7919ULL + 23);
  std::vector<SuperMatrix> s1, s2, small;
  for (int i = 0; i < n; ++i) {
    s1.push_back(rand_supermatrix<Complex>(rng, 2, 2, 2, 2, 3.0));
    s2.push_back(rand_supermatrix<Complex>(rng, 2, 2, 2, 2, 3.0));
    small.push_back(Complex(0.3) * rand_supermatrix<Complex>(rng, 2, 2, 2, 3));
  }
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "supermatrix.str_cyclicity", 1e-10, [&] {
    double w = 0.0;
    for (int i = 0; i < n; ++i) w = std::max(w, diff(supertrace(s1[i] * s2[i]), supertrace(s2[i] * s1[i])));
    return std::pair{n, w};
  }));
  out.push_back(timed(opt, "supermatrix.sdet_multiplicativity", 1e-10, [&] {
    double w = 0.0;
    for (int i = 0; i < n; ++i) w = std::max(w, diff(sdet(s1[i] * s2[i]), Grassmann(sdet(s1[i]) * sdet(s2[i]))));
    return std::pair{n, w};
  }));
  out.push_back(timed(opt, "supermatrix.sdet_forms", 1e-10, [&] {
    double w = 0.0;
    for (int i = 0; i < n; ++i)
      w = std::max(w, diff(sdet(s1[i], SdetForm::BosonSchur), sdet(s1[i], SdetForm::FermionSchur)));
    return std::pair{n, w};
  }));
  out.push_back(timed(opt, "supermatrix.dagger_involution", 1e-10, [&] {
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
      const SuperMatrix d = dagger(dagger(s1[i]));
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) w = std::max(w, diff(d(r, c), s1[i](r, c)));
      }
    }
    return std::pair{n, w};
  }));
  out.push_back(timed(opt, "supermatrix.sdet_exp_str", 1e-10, [&] {
    double w = 0.0;
    for (int i = 0; i < n; ++i) w = std::max(w, diff(sdet(sexp(small[i])), gexp(supertrace(small[i]))));
    return std::pair{n, w};
  }));
  return out;
}

std::vector<CheckResult> check_trace_duality(const VerifyOptions& opt) {
  const std::vector<int> betas = opt.beta ? std::vector<int>{*opt.beta} : std::vector<int>{1, 2, 4};
  std::vector<CheckResult> out;
  for (int beta : betas) {
    out.push_back(timed(opt, "duality.trace_powers.beta" + std::to_string(beta), 0.0, [&] {
      const int bundles = 50;
      double worst = 0.0;
      int cases = 0;
      for (int i = 0; i < bundles; ++i) {
        const int N = opt.N ? *opt.N : 1 + i % 4;
        const int k = opt.k ? *opt.k : 1 + (i / 4) % 2;
        std::vector<int> L(static_cast<std::size_t>(k), 1);
        if (i % 3 == 1) L.back() = -1;
        const auto b = random_bundle<GaussRational>(beta, N, k, opt.seed * 100003ULL + 1000 * beta + i, L);
        const auto layout = i % 2 ? AdjointLayout::Physics : AdjointLayout::Plain;
        const auto rep = verify_trace_duality(b, 4, layout);
        for (double d : rep.max_deviation) worst = std::max(worst, d);
        if (!rep.pass) worst = std::max(worst, 1.0);
        ++cases;
      }
      return std::pair{cases, worst};
    }, "tr K^m = str B^m, m <= 4, exact"));
  }
  return out;
}

std::vector<CheckResult> check_keystone(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  for (int beta : {1, 2}) {
    if (opt.beta && *opt.beta != beta) continue;
    out.push_back(timed(opt, "duality.keystone.beta" + std::to_string(beta), 0.0, [&] {
      double worst = 0.0;
      int cases = 0;
      for (int N = 1; N <= 3; ++N) {
        if (opt.N && *opt.N != N) continue;
        for (int k = 1; k <= 2; ++k) {
          if (opt.k && *opt.k != k) continue;
          for (int rep = 0; rep < 2; ++rep) {
            const auto b = random_bundle<GaussRational>(beta, N, k, opt.seed * 7777ULL + 100 * N + 10 * k + rep);
            const auto r = verify_keystone(b, rep ? AdjointLayout::Plain : AdjointLayout::Physics);
            worst = std::max(worst, r.pass ? r.max_deviation : std::max(1.0, r.max_deviation));
            ++cases;
          }
        }
      }
      return std::pair{cases, worst};
    }, "Phi(K) against exp(-str B^2 / 2 beta), exact"));
  }
  return out;
}

std::vector<CheckResult> check_hubbard_stratonovich(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "genfun.hubbard_stratonovich", 1e-6, [&] {
    double worst = 0.0;
    int cases = 0;
    std::vector<SuperMatrix> Bs{SuperMatrix::zero(1, 1, 1)};
    for (std::uint64_t s = 0; s < 3; ++s)
      Bs.push_back(build_dual_pair(random_bundle<Complex>(2, 1, 1, opt.seed + s), AdjointLayout::Physics).B);
    for (const auto& B : Bs) {
      const auto rep = hs_verify(B);
      // both the comparison and the quadrature convergence count
      worst = std::max({worst, rep.max_deviation, rep.doubling_residual > 1e-7 ? 1.0 : 0.0});
      ++cases;
    }
    return std::pair{cases, worst};
  }, "all Grassmann coefficients; node-doubling residual < 1e-7"));
  return out;
}

std::vector<CheckResult> check_genfun_normalization(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "genfun.z_super_k1_normalization", 1e-3, [&] {
    double worst = 0.0;
    int cases = 0;
    for (int N : {1, 5, 20}) {
      const double edge = std::sqrt(2.0 * N);
      for (double f : {-0.8, -0.4, 0.0, 0.3, 0.7}) {
        worst = std::max(worst, std::abs(z_super_k1(SourceConfig::k1(f * edge, 0.0, 0.05), N) - 1.0));
        ++cases;
      }
    }
    return std::pair{cases, worst};
  }));
  out.push_back(timed(opt, "genfun.zk_direct_normalization", 0.0, [&] {
    double worst = 0.0;
    int cases = 0;
    for (auto cls : {EnsembleClass::GOE, EnsembleClass::GUE, EnsembleClass::GSE}) {
      EnsembleSpec s;
      s.cls = cls;
      s.N = 6;
      s.samples = 200;
      s.seed = opt.seed;
      SourceConfig src = SourceConfig::k1(0.3, 0.0, 0.1);
      src.beta = s.beta();
      const auto z = zk_direct(s, src);
      worst = std::max({worst, std::abs(z.mean - 1.0), z.variance});
      ++cases;
    }
    return std::pair{cases, worst};
  }, "exactly 1 with zero variance"));
  return out;
}

std::vector<CheckResult> check_ingham_siegel(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "genfun.ingham_siegel_exponent", 1e-6, [&] {
    double worst = 0.0;
    int cases = 0;
    for (int N : {1, 2}) {
      for (int m : {0, 1}) {
        const auto rep = ingham_siegel_check(N, m);
        worst = std::max(worst, std::abs(rep.fitted_exponent - rep.expected_exponent));
        if (!rep.pass) worst = std::max(worst, 1.0);
        ++cases;
      }
    }
    return std::pair{cases, worst};
  }, "fitted power of det R against m + N"));
  return out;
}

std::vector<CheckResult> check_one_point(const VerifyOptions& opt) {
  EnsembleSpec s;
  s.cls = EnsembleClass::GUE;
  s.N = 50;
  s.samples = 10000;
  s.seed = opt.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r1 = estimate_R1(sample(s, opt.threads));
  const double sample_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double R = std::sqrt(2.0 * s.N / s.gamma());
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "ensembles.r1_semicircle_fraction", 0.05, [&] {
    const auto gl = quad::gauss_legendre(8);
    int tot = 0, ok = 0;
    for (std::size_t i = 0; i < r1.grid.size(); ++i) {
      if (std::abs(r1.grid[i]) > 0.8 * R) continue;
      const double a = r1.edges[i], b = r1.edges[i + 1];
      double ref = 0.0;
      for (std::size_t j = 0; j < gl.size(); ++j)
        ref += 0.5 * gl.w[j] * semicircle_density(0.5 * (a + b) + 0.5 * (b - a) * gl.x[j], s.N, s.gamma());
      ++tot;
      if (std::abs(r1.values[i] - ref) <= 3.0 * r1.stderr_[i]) ++ok;
    }
    return std::pair{tot, 1.0 - static_cast<double>(ok) / tot};
  }, "fraction of central bins outside 3 standard errors of the bin-averaged semicircle"));
  out.back().seconds += sample_time;
  out.push_back(timed(opt, "ensembles.r1_support_edge", 1.0, [&] {
    const double width = r1.edges[1] - r1.edges[0];
    return std::pair{1, std::abs(fitted_support_edge(r1, R) - R) / width};
  }, "distance of the fitted edge from sqrt(2N/gamma), in bin widths"));
  return out;
}

std::vector<CheckResult> check_universality(const VerifyOptions& opt) {
  EnsembleSpec g;
  g.cls = EnsembleClass::GUE;
  g.N = 100;
  g.samples = 5000;
  g.seed = opt.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ug = unfold(sample(g, opt.threads));
  const auto ls = local_statistics(ug);
  const double gue_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<CheckResult> out;
  out.push_back(timed(opt, "ensembles.y2_sine_kernel", 3.0, [&] {
    double worst = 0.0;
    int cases = 0;
    for (std::size_t i = 0; i < ls.y2.grid.size(); ++i) {
      const double xi = ls.y2.grid[i];
      if (xi < 0.1 || xi > 3.0) continue;
      worst = std::max(worst, std::abs(ls.y2.values[i] - sine_kernel_y2(xi)) / ls.y2.stderr_[i]);
      ++cases;
    }
    return std::pair{cases, worst};
  }, "largest |z| over bins in [0.1, 3]"));
  out.back().seconds += gue_time;
  out.push_back(timed(opt, "ensembles.y2_at_zero", 0.05, [&] {
    return std::pair{1, std::abs(y2_at_zero(ls.y2) - 1.0)};
  }));
  out.push_back(timed(opt, "ensembles.cue_gue_spacing_ks", 0.02, [&] {
    EnsembleSpec c = g;
    c.cls = EnsembleClass::CUE;
    c.samples = 2000;
    c.seed = opt.seed + 1;
    return std::pair{1, ks_two_sample(pooled_spacings(ug), pooled_spacings(unfold(sample(c, opt.threads))))};
  }));
  return out;
}

std::vector<CheckResult> check_diffusion(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const auto r = radial_from_sources(0.3, 0.2, 0.3);
  out.push_back(timed(opt, "brownian.propagator_normalization", 1e-4, [&] {
    double w = 0.0;
    for (double t : ts) w = std::max(w, std::abs(propagator_normalization(r, t).value - 1.0));
    return std::pair{static_cast<int>(ts.size()), w};
  }, "boundary term plus int Gamma B"));
  out.push_back(timed(opt, "brownian.semigroup", 1e-4, [&] {
    const RadialPoint s{Complex(0.3, 0.2), Complex(-0.4, 0.1)};
    double w = 0.0;
    int cases = 0;
    for (auto [t1, t2] : {std::pair{0.2, 0.3}, std::pair{0.05, 1.0}}) {
      const auto rep = semigroup_check(s, r, t1, t2);
      w = std::max(w, rep.residual / std::max(1.0, std::abs(rep.rhs)));
      ++cases;
    }
    return std::pair{cases, w};
  }));
  Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(2, 2);
  h0(0, 0) = 1.0;
  h0(1, 1) = -1.0;
  for (double t : ts) {
    char name[64];
    std::snprintf(name, sizeof name, "brownian.convolution_vs_mc.t%.1f", t);
    double cart = 0.0;
    out.push_back(timed(opt, name, 1e-2, [&] {
      const auto rep = convolution_check(h0, 0.3, 0.2, 0.3, t, 200000, opt.seed);
      cart = rep.radial_vs_cartesian;
      return std::pair{rep.monte_carlo.samples, rep.radial_vs_cartesian > 1e-6 ? 1.0 : rep.radial_vs_mc};
    }, "H0 = diag(1, -1), x = 0.3, J = 0.2, eps = 0.3; radial route also checked against Cartesian"));
    char note[96];
    std::snprintf(note, sizeof note, "; radial vs Cartesian %.2e", cart);
    out.back().note += note;
  }
  return out;
}

std::vector<CheckResult> check_color_flavor(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  CFTComparison rep;
  CFTConfig cfg;
  cfg.M = 4;
  out.push_back(timed(opt, "colorflavor.series_m4", 1e-8, [&] {
    rep = compare_cft(cfg, 20, opt.seed);
    return std::pair{rep.seeds, std::max(rep.max_coefficient_diff, rep.max_evaluated_diff)};
  }, "N = 1, k+ = k- = 1, 20 seeded source assignments"));
  out.push_back(timed(opt, "colorflavor.normalization", 1e-14, [&] {
    return std::pair{1, std::abs(rep.normalization - 1.0)};
  }, "rhs at Psi = 0"));
  out.push_back(timed(opt, "colorflavor.cue_identity", 0.0, [&] {
    EnsembleSpec s;
    s.cls = EnsembleClass::CUE;
    s.N = 5;
    s.samples = 200;
    s.seed = opt.seed;
    const Complex t(0.4, 0.2), u(-1.0, 0.3);
    const auto z = cue_genfun_mc(s, {{t}, {t}, {u}, {u}});
    return std::pair{z.samples, std::abs(z.mean - 1.0) + z.variance};
  }, "phi = theta gives exactly 1"));
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra",  "duality",     "genfun", "ensembles",
                                              "brownian", "colorflavor", "all"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opt) {
  using Group = std::vector<CheckResult> (*)(const VerifyOptions&);
  static const std::map<std::string, std::vector<Group>> groups{
      {"algebra", {check_grassmann_algebra, check_supermatrix}},
      {"duality", {check_trace_duality, check_keystone}},
      {"genfun", {check_hubbard_stratonovich, check_genfun_normalization, check_ingham_siegel}},
      {"ensembles", {check_one_point, check_universality}},
      {"brownian", {check_diffusion}},
      {"colorflavor", {check_color_flavor}},
  };
  SuiteReport rep;
  rep.suite = name;
  auto add = [&](const std::vector<Group>& gs) {
    for (auto g : gs) {
      auto c = g(opt);
      rep.checks.insert(rep.checks.end(), c.begin(), c.end());
    }
  };
  if (name == "all") {
    for (const auto& n : suite_names()) {
      if (n != "all") add(groups.at(n));
    }
  } else {
    auto it = groups.find(name);
    if (it == groups.end()) throw DomainError("unknown suite: " + name);
    add(it->second);
  }
  return rep;
}

}  // namespace susy
