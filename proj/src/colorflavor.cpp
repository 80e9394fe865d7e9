#include "susy/colorflavor.hpp"

#include "susy/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace susy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSourcePairs = 2;
constexpr int kPairs = 4;  // sources, then (sigma, tau), then (sigma~, tau~)

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Coefficients over the 16 monomials of the source pool, indexed by mask.
using SourceCoeffs = std::array<Complex, 16>;

Grassmann to_grassmann(const SourceCoeffs& c, double drop = 0.0) {
  std::vector<Grassmann::Term> terms;
  for (std::uint64_t m = 0; m < 16; ++m) {
    if (std::abs(c[m]) > drop) terms.push_back({m, c[m]});
  }
  return Grassmann::from_terms(kSourcePairs, std::move(terms));
}

struct RhsAccum {
  // acc[eps][m][n]: weighted a^m a~^n moments of the Berezin-reduced integrand
  std::vector<SourceCoeffs> acc;
  int M = 0;
  SourceCoeffs& at(int e, int m, int n) { return acc[(e * (M + 1) + m) * (M + 1) + n]; }
};

RhsAccum rhs_moments(const CFTConfig& cfg, int r_nodes, int theta_nodes) {
  const int M = cfg.M;
  RhsAccum out;
  out.M = M;
  out.acc.assign(static_cast<std::size_t>(16 * (M + 1) * (M + 1)), SourceCoeffs{});

  using G = Grassmann;
  const G fp = G::zeta(kPairs, 0), fps = G::zeta_star(kPairs, 0);
  const G fm = G::zeta(kPairs, 1), fms = G::zeta_star(kPairs, 1);
  const G sig = G::zeta(kPairs, 2), tau = G::zeta_star(kPairs, 2);
  const G sigt = G::zeta(kPairs, 3), taut = G::zeta_star(kPairs, 3);
  // odd pieces attached to b+*, b-, b-*, b+ in the exponent
  const G odd[4] = {sig * fm, fps * tau, sigt * fp, fms * taut};
  const int order[4] = {zeta_id(2), zeta_star_id(2), zeta_id(3), zeta_star_id(3)};
  const G one(kPairs, 1.0);

  const auto rr = quad::gauss_legendre(r_nodes, 0.0, 1.0);
  const auto rt = quad::gauss_legendre(theta_nodes, 0.0, kPi / 2.0);
  const auto ra = quad::periodic_trapezoid(cfg.angle_nodes, 2.0 * kPi);

  std::vector<Complex> apow(M + 1), atpow(M + 1);
  // one (a, b) node: weight w multiplies the sdet factor `sd`
  auto node = [&](Complex a, Complex b, double w, bool boundary) {
    const Complex at = std::conj(a);
    const Complex bt = -std::conj(b);
    apow[0] = atpow[0] = 1.0;
    for (int m = 1; m <= M; ++m) {
      apow[m] = apow[m - 1] * a;
      atpow[m] = atpow[m - 1] * at;
    }
    // 1 - Lambda~ Lambda, blocks by hand; sdet = (A0 - n) / D with A0 = 1 - |a|^2
    const G A = one - (at * a) * one - sigt * tau;
    const G B = -(at * sig + b * sigt);
    const G C = -(a * taut + bt * tau);
    const G D = one - (bt * b) * one - taut * sig;
    const G Dinv = ginverse(D);
    const G schur = A - B * Dinv * C;
    G sd;
    if (boundary) {
      // N -> 1 limit of N(N-1)/2 A0^{N-2} n^2 / D^N: half of n^2 / D on |a| = 1
      const G n = (1.0 - std::norm(a)) * one - schur;
      sd = 0.5 * (n * n) * Dinv;
    } else {
      sd = schur * Dinv;
      for (int k = 1; k < cfg.N; ++k) sd = sd * (schur * Dinv);
    }
    const G base = sd * gexp(fps * b * fm + fms * bt * fp);
    for (int e = 0; e < 16; ++e) {
      G g = base;
      for (int q = 0; q < 4; ++q) {
        if (e & (1 << q)) g = g * odd[q];
      }
      const G red = berezin_integrate(g, std::span<const int>(order, 4), Complex(1.0));
      SourceCoeffs rc{};
      for (const auto& t : red.terms()) rc[t.mask] = t.coeff * w;
      for (int m = 0; m <= M; ++m) {
        for (int n = 0; m + n <= M; ++n) {
          const Complex f = apow[m] * atpow[n];
          auto& dst = out.at(e, m, n);
          for (int q = 0; q < 16; ++q) dst[q] += f * rc[q];
        }
      }
    }
  };

  for (std::size_t it = 0; it < rt.size(); ++it) {
    const double rho = std::tan(rt.x[it]);
    const double c = std::cos(rt.x[it]);
    // rho drho dchi with rho = tan theta
    const double wb = rt.w[it] * rho / (c * c);
    for (std::size_t ic = 0; ic < ra.size(); ++ic) {
      const Complex b = std::polar(rho, ra.x[ic]);
      for (std::size_t ip = 0; ip < ra.size(); ++ip) {
        const double wang = ra.w[ip] * ra.w[ic] * wb;
        for (std::size_t ir = 0; ir < rr.size(); ++ir) {
          const double r = rr.x[ir];
          node(std::polar(r, ra.x[ip]), b, rr.w[ir] * r * wang, false);
        }
        // r dr = dx / 2 and the boundary value replaces the x integral
        if (cfg.N == 1) node(std::polar(1.0, ra.x[ip]), b, 0.5 * wang, true);
      }
    }
  }
  return out;
}

CFTSeries moments_to_series(RhsAccum& acc, int M, Complex norm) {
  CFTSeries s;
  for (int e = 0; e < 16; ++e) {
    const int e1 = e & 1, e2 = (e >> 1) & 1, e3 = (e >> 2) & 1, e4 = (e >> 3) & 1;
    for (int m = 0; m <= M; ++m) {
      for (int n = 0; m + n <= M; ++n) {
        const CFTKey key{m + e1, n + e4, n + e3, m + e2};
        if (cft_degree(key) > 2 * M) continue;
        SourceCoeffs c = acc.at(e, m, n);
        for (auto& v : c) v /= norm * factorial(m) * factorial(n);
        auto it = s.find(key);
        if (it == s.end()) {
          s.emplace(key, to_grassmann(c));
        } else {
          it->second += to_grassmann(c);
        }
      }
    }
  }
  return s;
}

double series_diff(const CFTSeries& a, const CFTSeries& b) {
  double d = 0.0;
  const Grassmann zero(kSourcePairs);
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    d = std::max(d, max_abs_diff(v, it == b.end() ? zero : it->second));
  }
  for (const auto& [k, v] : b) {
    if (!a.count(k)) d = std::max(d, max_abs_coeff(v));
  }
  return d;
}

}  // namespace

void CFTConfig::validate() const {
  if (N < 1 || N > 4) throw DomainError("color-flavor rhs implemented for 1 <= N <= 4");
  if (kplus != 1 || kminus != 1) throw DomainError("color-flavor series implemented for k+ = k- = 1");
  if (M < 0 || M > 12) throw DomainError("truncation order out of range");
  if (r_nodes < 2 || theta_nodes < 2) throw DomainError("too few quadrature nodes");
  // phases up to e^{i(M+2)phi} occur; the trapezoid must resolve them
  if (angle_nodes < M + 3) throw DomainError("angle_nodes must exceed M + 2");
}

int cft_degree(const CFTKey& k) { return k[0] + k[1] + k[2] + k[3]; }

CFTSeries cft_lhs(const CFTConfig& cfg) {
  cfg.validate();
  if (cfg.N != 1) throw DomainError("color-flavor lhs implemented for N = 1");
  using G = Grassmann;
  const G one(kSourcePairs, 1.0);
  const G Fp = G::zeta_star(kSourcePairs, 0) * G::zeta(kSourcePairs, 0);
  const G Fm = G::zeta_star(kSourcePairs, 1) * G::zeta(kSourcePairs, 1);
  // sum_n (XY)^n / n!^2, X^n = (b+* b+)^n + n (b+* b+)^{n-1} F+ since F+^2 = 0
  CFTSeries s;
  for (int n = 0; n <= cfg.M + 1; ++n) {
    const double c = 1.0 / (factorial(n) * factorial(n));
    for (int dp = 0; dp <= 1; ++dp) {
      for (int dm = 0; dm <= 1; ++dm) {
        const int p = n - dp, q = n - dm;
        if (p < 0 || q < 0) continue;
        const CFTKey key{p, p, q, q};
        if (cft_degree(key) > 2 * cfg.M) continue;
        G term = one * c;
        if (dp) term = term * Fp * static_cast<double>(n);
        if (dm) term = term * Fm * static_cast<double>(n);
        auto it = s.find(key);
        if (it == s.end()) {
          s.emplace(key, term);
        } else {
          it->second += term;
        }
      }
    }
  }
  return s;
}

CFTRhsResult cft_rhs_detailed(const CFTConfig& cfg) {
  cfg.validate();
  auto run = [&](int rn, int tn, Complex& norm) {
    RhsAccum acc = rhs_moments(cfg, rn, tn);
    norm = acc.at(0, 0, 0)[0];
    if (std::abs(norm) < 1e-300) throw NumericError("color-flavor measure normalization vanishes");
    return moments_to_series(acc, cfg.M, norm);
  };
  CFTRhsResult out;
  Complex n2;
  out.series = run(cfg.r_nodes, cfg.theta_nodes, out.raw_normalization);
  const CFTSeries fine = run(cfg.r_nodes + cfg.r_nodes / 2, cfg.theta_nodes + cfg.theta_nodes / 2, n2);
  out.doubling_residual = series_diff(out.series, fine);
  if (out.doubling_residual > cfg.tol)
    throw ConvergenceError("color-flavor radial quadrature residual " + std::to_string(out.doubling_residual));
  return out;
}

CFTSeries cft_rhs(const CFTConfig& cfg) { return cft_rhs_detailed(cfg).series; }

Grassmann cft_lhs_phase_quadrature(int p, int q, int nodes) {
  if (p < 0 || q < 0) throw DomainError("negative power");
  using G = Grassmann;
  const G one(kSourcePairs, 1.0);
  const G Fp = G::zeta_star(kSourcePairs, 0) * G::zeta(kSourcePairs, 0);
  const G Fm = G::zeta_star(kSourcePairs, 1) * G::zeta(kSourcePairs, 1);
  const auto rule = quad::gauss_legendre(nodes, 0.0, 2.0 * kPi);
  G acc(kSourcePairs);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Complex e = std::polar(1.0, rule.x[i]);
    // coefficient of s+^p s-^q in exp(e (s+ + F+) + e^-1 (s- + F-))
    const Complex c = std::pow(e, p - q) / (factorial(p) * factorial(q)) * (rule.w[i] / (2.0 * kPi));
    acc += ((one + e * Fp) * (one + (1.0 / e) * Fm)) * c;
  }
  return acc;
}

std::vector<Grassmann> cft_evaluate(const CFTSeries& s, const std::array<Complex, 4>& b, int M) {
  std::vector<Grassmann> out(static_cast<std::size_t>(2 * M + 1), Grassmann(kSourcePairs));
  for (const auto& [k, v] : s) {
    const int d = cft_degree(k);
    if (d > 2 * M) continue;
    Complex f(1.0);
    for (int i = 0; i < 4; ++i) f *= std::pow(b[i], k[i]);
    out[d] += v * f;
  }
  return out;
}

CFTComparison compare_cft(const CFTConfig& cfg, int seeds, std::uint64_t seed, double tol) {
  if (seeds < 1) throw DomainError("need at least one source assignment");
  const CFTSeries lhs = cft_lhs(cfg);
  const CFTRhsResult rhs = cft_rhs_detailed(cfg);
  CFTComparison out;
  out.seeds = seeds;
  out.doubling_residual = rhs.doubling_residual;
  out.max_coefficient_diff = series_diff(lhs, rhs.series);
  auto it = rhs.series.find(CFTKey{0, 0, 0, 0});
  out.normalization = it == rhs.series.end() ? Complex(0.0) : it->second.body();
  for (int s = 0; s < seeds; ++s) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> g(0.0, 0.5);
    std::array<Complex, 4> b;
    for (auto& v : b) v = Complex(g(rng), g(rng));
    const auto l = cft_evaluate(lhs, b, cfg.M);
    const auto r = cft_evaluate(rhs.series, b, cfg.M);
    for (std::size_t d = 0; d < l.size(); ++d) out.max_evaluated_diff = std::max(out.max_evaluated_diff, max_abs_diff(l[d], r[d]));
  }
  out.pass = out.max_coefficient_diff <= tol && out.max_evaluated_diff <= tol;
  return out;
}

// ---------------------------------------------------------------------------

void CUEAngles::validate() const {
  if (theta_plus.size() != phi_plus.size() || theta_minus.size() != phi_minus.size())
    throw DimensionError("theta and phi lists differ in length");
  for (const auto* v : {&theta_plus, &theta_minus}) {
    for (const auto& t : *v) {
      if (!(t.imag() > 0.0)) throw DomainError("theta needs a positive imaginary part");
    }
  }
}

namespace {

Complex cue_ratio(const std::vector<double>& phases, const CUEAngles& a) {
  const Complex I(0.0, 1.0);
  Complex v(1.0);
  for (std::size_t p = 0; p < a.theta_plus.size(); ++p) {
    if (a.phi_plus[p] == a.theta_plus[p]) continue;
    for (double t : phases) v *= (1.0 - std::exp(I * (a.phi_plus[p] + t))) / (1.0 - std::exp(I * (a.theta_plus[p] + t)));
  }
  for (std::size_t q = 0; q < a.theta_minus.size(); ++q) {
    if (a.phi_minus[q] == a.theta_minus[q]) continue;
    for (double t : phases)
      v *= (1.0 - std::exp(I * (a.phi_minus[q] - t))) / (1.0 - std::exp(I * (a.theta_minus[q] - t)));
  }
  return v;
}

ZkDirectResult summarize(const std::vector<Complex>& vals, double rel_tol) {
  const std::size_t S = vals.size();
  ZkDirectResult out;
  out.samples = static_cast<int>(S);
  Complex sum(0.0);
  for (const auto& v : vals) sum += v;
  out.mean = sum / static_cast<double>(S);
  double var = 0.0;
  for (const auto& v : vals) var += std::norm(v - out.mean);
  out.variance = S > 1 ? var / (S - 1) : 0.0;
  out.stderr_ = std::sqrt(out.variance / S);
  if (rel_tol > 0.0 && out.stderr_ > rel_tol * std::abs(out.mean))
    throw StatisticsError("generating function relative error above tolerance");
  return out;
}

}  // namespace

ZkDirectResult cue_genfun_from_batch(const SpectrumBatch& batch, const CUEAngles& angles, double rel_tol) {
  angles.validate();
  if (batch.spec.cls != EnsembleClass::CUE) throw DomainError("cue_genfun needs a CUE batch");
  if (batch.levels.empty()) throw DomainError("empty spectrum batch");
  std::vector<Complex> vals;
  vals.reserve(batch.levels.size());
  for (const auto& ph : batch.levels) vals.push_back(cue_ratio(ph, angles));
  return summarize(vals, rel_tol);
}

ZkDirectResult cue_genfun_mc(const EnsembleSpec& spec, const CUEAngles& angles, double rel_tol) {
  angles.validate();
  if (spec.cls != EnsembleClass::CUE) throw DomainError("cue_genfun needs the CUE");
  return cue_genfun_from_batch(sample(spec), angles, rel_tol);
}

Complex cue_genfun_quadrature_n1(const CUEAngles& angles, int nodes) {
  angles.validate();
  const auto rule = quad::gauss_legendre(nodes, 0.0, 2.0 * kPi);
  Complex acc(0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) acc += cue_ratio({rule.x[i]}, angles) * rule.w[i];
  return acc / (2.0 * kPi);
}

CUEDensity cue_r1(const SpectrumBatch& batch, double theta, double eps, double h) {
  if (batch.spec.cls != EnsembleClass::CUE) throw DomainError("cue_r1 needs a CUE batch");
  if (!(eps > 0.0) || !(h > 0.0)) throw DomainError("eps and h must be positive");
  const Complex I(0.0, 1.0);
  const Complex tp(theta, eps), tm(-theta, eps);
  CUEAngles up{{tp}, {tp + h}, {tm}, {tm}}, dn{{tp}, {tp - h}, {tm}, {tm}};
  const double N = batch.spec.N;
  std::vector<double> vals;
  vals.reserve(batch.levels.size());
  for (const auto& ph : batch.levels) {
    const Complex d = (cue_ratio(ph, up) - cue_ratio(ph, dn)) / (2.0 * h);
    vals.push_back((N + 2.0 * (I * d).real()) / (2.0 * kPi));
  }
  double m = 0.0, v = 0.0;
  for (double x : vals) m += x;
  m /= vals.size();
  for (double x : vals) v += (x - m) * (x - m);
  const double S = static_cast<double>(vals.size());
  return {m, S > 1 ? std::sqrt(v / (S - 1) / S) : 0.0};
}

}  // namespace susy
