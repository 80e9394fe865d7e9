#include "susy/brownian.hpp"

#include "susy/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace susy {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

Grassmann scalar(Complex v) { return Grassmann(1, v); }

SuperMatrix diag11(Complex a, Complex b) {
  return SuperMatrix::from_blocks(1, 1, 1, {scalar(a)}, {Grassmann(1)}, {Grassmann(1)}, {scalar(b)});
}

// exp(x) for an even element, keeping the body apart: returns (body, exp(soul)).
std::pair<Complex, Grassmann> split_exp(const Grassmann& x) {
  const Complex b = x.body();
  return {b, gexp(x - scalar(b))};
}

Complex berezin_body(const Grassmann& g) {
  return berezin_integrate(g, {zeta_id(0), zeta_star_id(0)}, default_berezin_norm()).body();
}

void require_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("diffusion time must be positive");
}

void require_equal_increments(const RadialPoint& r) {
  if (std::abs(r.s1.imag() - r.s2.imag()) > 1e-12 * (1.0 + std::abs(r.s1.imag())))
    throw DomainError("radial convolution needs equal imaginary increments on r1 and r2");
}

std::vector<double> hermitian_levels(const Eigen::MatrixXcd& H0) {
  if (H0.rows() != H0.cols()) throw DimensionError("H0 must be square");
  if ((H0 - H0.adjoint()).norm() > 1e-12 * (1.0 + H0.norm())) throw DomainError("H0 must be Hermitean");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H0, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// Lift of the boson contour: enough to keep away from the real poles of z0, but never so
// far that exp(kappa^2 / 2t) eats the precision.
double lift(const RadialPoint& r, double t, const RadialOptions& opt) {
  return std::clamp(opt.min_s1_imag - r.s1.imag(), 0.0, 2.0 * std::sqrt(t));
}

}  // namespace

// ---------------------------------------------------------------------------

CrossoverSpec CrossoverSpec::from_alpha(double alpha) {
  CrossoverSpec s;
  s.t = alpha * alpha / 2.0;
  return s;
}

double CrossoverSpec::alpha() const { return std::sqrt(2.0 * t); }

void CrossoverSpec::validate() const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("crossover time must be non-negative");
  EnsembleSpec e;
  e.cls = target;
  e.N = N;
  e.samples = samples;
  e.validate();
  if (e.circular()) throw DomainError("crossover targets a Gaussian class");
  if (initial == InitialKind::Fixed) {
    const int d = e.matrix_dim();
    if (H0.rows() != d || H0.cols() != d) throw DimensionError("H0 dimension does not match the target class");
    const double scale = 1.0 + H0.norm();
    if ((H0 - H0.adjoint()).norm() > 1e-12 * scale) throw DomainError("H0 is not Hermitean");
    if (target == EnsembleClass::GOE && H0.imag().norm() > 1e-12 * scale)
      throw DomainError("H0 is not real symmetric, cannot embed in the orthogonal class");
    if (target == EnsembleClass::GSE && (H0 - quaternion_dual(H0)).norm() > 1e-12 * scale)
      throw DomainError("H0 is not self-dual, cannot embed in the symplectic class");
  }
  if (initial == InitialKind::PoissonDiagonal && target == EnsembleClass::GSE)
    throw DomainError("Poisson initial condition is provided for GOE and GUE only");
}

SpectrumBatch evolve(const CrossoverSpec& spec, int threads) {
  spec.validate();
  EnsembleSpec e;
  e.cls = spec.target;
  e.N = spec.N;
  e.seed = spec.seed;
  e.samples = spec.samples;
  SpectrumBatch batch;
  batch.spec = e;
  batch.levels.resize(spec.samples);
  const int d = e.matrix_dim();
  const double alpha = spec.alpha();
  const double width = spec.poisson_width > 0.0 ? spec.poisson_width : static_cast<double>(spec.N);
  std::vector<double> splits(spec.samples, 0.0);

  auto work = [&](int first, int stride) {
    for (int s = first; s < spec.samples; s += stride) {
      auto rng = sample_rng(spec.seed, static_cast<std::uint64_t>(s));
      Eigen::MatrixXcd h;
      switch (spec.initial) {
        case InitialKind::Fixed: h = spec.H0; break;
        case InitialKind::Zero: h = Eigen::MatrixXcd::Zero(d, d); break;
        case InitialKind::PoissonDiagonal: {
          std::uniform_real_distribution<double> u(-0.5 * width, 0.5 * width);
          h = Eigen::MatrixXcd::Zero(d, d);
          for (int i = 0; i < d; ++i) h(i, i) = u(rng);
          break;
        }
      }
      if (spec.t > 0.0) h += alpha * sample_gaussian(spec.target, spec.N, rng);
      batch.levels[s] = levels_of(e, h, &splits[s]);
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, spec.samples);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&, k] {
        try {
          work(k, threads);
        } catch (...) {
          errs[k] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& err : errs)
      if (err) std::rethrow_exception(err);
  }
  batch.max_degeneracy_split = *std::max_element(splits.begin(), splits.end());
  batch.degeneracy_verified = batch.max_degeneracy_split <= 1e-10;
  return batch;
}

double spacing_variance(const SpectrumBatch& unfolded) {
  const auto s = pooled_spacings(unfolded);
  if (s.size() < 2) throw StatisticsError("not enough spacings");
  double m = 0.0, m2 = 0.0;
  for (double v : s) m += v;
  m /= s.size();
  for (double v : s) m2 += (v / m - 1.0) * (v / m - 1.0);
  return m2 / (s.size() - 1);
}

// ---------------------------------------------------------------------------

RadialPoint radial_from_sources(double x, double J, double eps) {
  return {Complex(-x + J, eps), Complex(-x - J, eps)};
}

Complex z0_initial(const RadialPoint& s, const std::vector<double>& h0_levels, double min_distance) {
  Complex z(1.0);
  for (double l : h0_levels) {
    const Complex den = s.s1 + l;
    if (std::abs(den) < min_distance) throw SingularityError("z0: boson argument sits on a level of -H0");
    z *= (s.s2 + l) / den;
  }
  return z;
}

Complex z0_initial(const RadialPoint& s, const Eigen::MatrixXcd& H0, double min_distance) {
  return z0_initial(s, hermitian_levels(H0), min_distance);
}

namespace {

// sigma = s1 M1 + s2 M2; the symbolic pieces are built once.
struct RadialPieces {
  SuperMatrix M1, M2;
  SuperMatrix jac1, jac2;  // Jacobian = s1 jac1 + s2 jac2

  RadialPieces() : M1(unit_sigma(1.0, 0.0)), M2(unit_sigma(0.0, 1.0)), jac1(jacobian_of(M1, 0)), jac2(jacobian_of(M2, 1)) {}

  static SuperMatrix unit_sigma(double e1, double e2) {
    const Grassmann a = Grassmann::zeta(1, 0), b = Grassmann::zeta_star(1, 0);
    const SuperMatrix A = SuperMatrix::from_blocks(1, 1, 1, {Grassmann(1)}, {a}, {b}, {Grassmann(1)});
    const SuperMatrix u = sexp(A), uinv = sexp(Complex(-1.0) * A);
    return uinv * diag11(e1, e2) * u;
  }

  // Contribution of one linear piece: its own s-column plus its share of the Grassmann columns.
  static SuperMatrix jacobian_of(const SuperMatrix& M, int col) {
    const int rows[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};  // sigma11, sigma22 | sigma12, sigma21
    SuperMatrix jac(1, 2, 2, 2, 2);
    for (int i = 0; i < 4; ++i) {
      const auto [p, q] = rows[i];
      jac.set(i, col, M(p, q));
      jac.set(i, 2, left_derivative(M(p, q), zeta_id(0)));
      jac.set(i, 3, left_derivative(M(p, q), zeta_star_id(0)));
    }
    return jac;
  }
};

const RadialPieces& pieces() {
  static const RadialPieces p;
  return p;
}

}  // namespace

SuperMatrix radial_sigma(const RadialPoint& s) { return s.s1 * pieces().M1 + s.s2 * pieces().M2; }

Grassmann radial_berezinian_k1(const RadialPoint& s) {
  // The s-columns of the Jacobian do not scale with s; only the Grassmann columns do.
  const auto& P = pieces();
  SuperMatrix jac = s.s1 * P.jac1 + s.s2 * P.jac2;
  for (int i = 0; i < 4; ++i) {
    jac.set(i, 0, P.jac1(i, 0));
    jac.set(i, 1, P.jac2(i, 1));
  }
  return berezinian_linear(jac);
}

Complex B1(const RadialPoint& s) {
  if (std::abs(s.s1 - s.s2) == 0.0) throw SingularityError("radial Berezinian is singular at s1 = s2");
  return radial_berezinian_k1(s).body();
}

Complex gaussian_constant(double t) {
  require_t(t);
  const Grassmann eta = Grassmann::zeta(1, 0), chi = Grassmann::zeta_star(1, 0);
  const SuperMatrix rho = SuperMatrix::from_blocks(1, 1, 1, {Grassmann(1)}, {eta}, {chi}, {Grassmann(1)});
  const Complex odd = berezin_body(gexp(supertrace(rho * rho) * Complex(-1.0 / (2.0 * t))));
  // commuting entries a and i b: int exp(-(a^2 + b^2) / 2t) da db = 2 pi t
  return 1.0 / (2.0 * kPi * t * odd);
}

PropagatorValue propagator_k1(const RadialPoint& s, const RadialPoint& r, double t) {
  require_t(t);
  const SuperMatrix sig = radial_sigma(s);
  const Grassmann x = supertrace(sig * diag11(r.s1, r.s2)) * Complex(1.0 / t);
  auto [body, soul_exp] = split_exp(x);
  const Complex g = berezin_body(soul_exp);
  const Complex str_sq = s.s1 * s.s1 - s.s2 * s.s2 + r.s1 * r.s1 - r.s2 * r.s2;
  PropagatorValue out;
  out.group_integral = g * std::exp(body);
  out.value = gaussian_constant(t) * g * std::exp(body - str_sq / (2.0 * t));
  return out;
}

Complex boundary_weight_k1(const RadialPoint& r, double t) {
  require_t(t);
  const Complex d = r.s1 - r.s2;
  return std::exp(-d * d / (2.0 * t));
}

// ---------------------------------------------------------------------------

namespace {

// int Gamma B d[s] in polar coordinates around s1 = s2: w = s1 - s2 = dr + a - i b.
Complex singular_integral(const RadialPoint& r, double t, int radial_order, int angle_nodes) {
  const Complex dr = r.s1 - r.s2;
  const double R = std::abs(dr), L = 9.0 * std::sqrt(t);
  std::vector<double> breaks;
  const double lo = std::max(0.0, R - L), hi = R + L;
  const int panels = 6;
  for (int i = 0; i <= panels; ++i) breaks.push_back(lo + (hi - lo) * i / panels);
  const auto rad = quad::composite_legendre(breaks, radial_order);
  const auto ang = quad::periodic_trapezoid(angle_nodes, 2.0 * kPi);
  Complex acc(0.0);
  for (std::size_t i = 0; i < rad.size(); ++i) {
    for (std::size_t j = 0; j < ang.size(); ++j) {
      const Complex w = std::polar(rad.x[i], ang.x[j]);
      const Complex ab = w - dr;  // a - i b
      const RadialPoint s{r.s1 + ab.real(), r.s2 + kI * (-ab.imag())};
      acc += propagator_k1(s, r, t).value * B1(s) * (rad.x[i] * rad.w[i] * ang.w[j]);
    }
  }
  return acc;
}

Complex regular_integral(const RadialFunction& f, Complex f_diag, const RadialPoint& r, double t, double kappa,
                         int nodes) {
  const auto gh = quad::gauss_hermite(nodes);
  const double sc = std::sqrt(2.0 * t);
  Complex acc(0.0);
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const Complex a = Complex(sc * gh.x[i], kappa);
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const double b = sc * gh.x[j];
      const RadialPoint s{r.s1 + a, r.s2 + kI * b};
      const Complex fs = f(s) - f_diag;
      if (fs == 0.0) continue;
      const double w = gh.w[i] * gh.w[j] * sc * sc * std::exp(gh.x[i] * gh.x[i] + gh.x[j] * gh.x[j]);
      acc += propagator_k1(s, r, t).value * B1(s) * fs * w;
    }
  }
  return acc;
}

}  // namespace

RadialIntegral radial_convolution(const RadialFunction& f, const RadialPoint& r, double t, const RadialOptions& opt) {
  require_t(t);
  require_equal_increments(r);
  RadialIntegral out;
  out.f_diag = f({r.s1, r.s1});
  const Complex other = f({r.s2, r.s2});
  if (std::abs(out.f_diag - other) > 1e-10 * (1.0 + std::abs(out.f_diag)))
    throw DomainError("radial function is not constant on the diagonal s1 = s2");
  out.boundary = boundary_weight_k1(r, t);
  if (r.s1 == r.s2) {
    // no sources: the kernel part vanishes identically
    out.value = out.f_diag * out.boundary;
    return out;
  }
  const double kappa = lift(r, t, opt);
  const Complex s1 = singular_integral(r, t, opt.polar_radial, opt.polar_angle);
  const Complex g1 = regular_integral(f, out.f_diag, r, t, kappa, opt.nodes);
  const Complex s2 = singular_integral(r, t, 2 * opt.polar_radial, 2 * opt.polar_angle);
  const Complex g2 = regular_integral(f, out.f_diag, r, t, kappa, 2 * opt.nodes);
  out.singular_part = s2;
  out.regular_part = g2;
  out.value = out.f_diag * (out.boundary + s2) + g2;
  out.doubling_residual = std::abs(out.f_diag * (s2 - s1) + (g2 - g1));
  if (!(out.doubling_residual <= opt.tol))
    throw ConvergenceError("radial convolution did not converge, residual " + std::to_string(out.doubling_residual));
  return out;
}

RadialIntegral propagator_normalization(const RadialPoint& r, double t, const RadialOptions& opt) {
  return radial_convolution([](const RadialPoint&) { return Complex(1.0); }, r, t, opt);
}

SemigroupReport semigroup_check(const RadialPoint& s, const RadialPoint& r, double t1, double t2, int nodes) {
  require_t(t1);
  require_t(t2);
  const double T = t1 + t2, var = t1 * t2 / T, sc = std::sqrt(2.0 * var);
  const Complex c1 = (t2 * s.s1 + t1 * r.s1) / T, c2 = (t2 * s.s2 + t1 * r.s2) / T;
  const auto gh = quad::gauss_hermite(nodes);
  Complex acc(0.0);
  for (std::size_t i = 0; i < gh.size(); ++i)
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const RadialPoint q{c1 + sc * gh.x[i], c2 + kI * (sc * gh.x[j])};
      const double w = gh.w[i] * gh.w[j] * sc * sc * std::exp(gh.x[i] * gh.x[i] + gh.x[j] * gh.x[j]);
      acc += propagator_k1(s, q, t1).value * B1(q) * propagator_k1(q, r, t2).value * w;
    }
  SemigroupReport rep;
  rep.lhs = acc;
  rep.rhs = propagator_k1(s, r, T).value;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

Complex cartesian_convolution(const std::vector<double>& h0_levels, const RadialPoint& r, double t, int nodes) {
  require_t(t);
  const Grassmann eta = Grassmann::zeta(1, 0), chi = Grassmann::zeta_star(1, 0);
  const Complex c = gaussian_constant(t);
  RadialOptions opt;
  const double kappa = lift(r, t, opt);
  const auto gh = quad::gauss_hermite(nodes);
  const double sc = std::sqrt(2.0 * t);
  Complex acc(0.0);
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const Complex a = Complex(sc * gh.x[i], kappa);
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const Complex b = kI * (sc * gh.x[j]);
      const SuperMatrix rho = SuperMatrix::from_blocks(1, 1, 1, {scalar(a)}, {eta}, {chi}, {scalar(b)});
      const SuperMatrix sigma = diag11(r.s1, r.s2) + rho;
      Grassmann z0(1, 1.0);
      for (double l : h0_levels) z0 = z0 * ginverse(sdet(sigma + diag11(l, l)));
      auto [body, e] = split_exp(supertrace(rho * rho) * Complex(-1.0 / (2.0 * t)));
      const double w = gh.w[i] * gh.w[j] * sc * sc * std::exp(gh.x[i] * gh.x[i] + gh.x[j] * gh.x[j]);
      acc += c * std::exp(body) * berezin_body(e * z0) * w;
    }
  }
  return acc;
}

ConvolutionReport convolution_check(const Eigen::MatrixXcd& H0, double x, double J, double eps, double t,
                                    int samples, std::uint64_t seed, double tol) {
  ConvolutionReport rep;
  rep.t = t;
  const auto levels = hermitian_levels(H0);
  const RadialPoint r = radial_from_sources(x, J, eps);
  rep.radial = radial_convolution([&](const RadialPoint& s) { return z0_initial(s, levels); }, r, t);
  rep.cartesian = cartesian_convolution(levels, r, t);
  CrossoverSpec cs;
  cs.initial = InitialKind::Fixed;
  cs.H0 = H0;
  cs.N = static_cast<int>(H0.rows());
  cs.t = t;
  cs.samples = samples;
  cs.seed = seed;
  rep.monte_carlo = zk_from_batch(evolve(cs), SourceConfig::k1(x, J, eps, 1));
  rep.radial_vs_mc = std::abs(rep.radial.value - rep.monte_carlo.mean);
  rep.radial_vs_cartesian = std::abs(rep.radial.value - rep.cartesian);
  rep.pass = rep.radial_vs_mc <= tol && rep.radial_vs_cartesian <= 1e-6;
  return rep;
}

}  // namespace susy
