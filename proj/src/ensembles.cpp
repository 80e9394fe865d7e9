#include "susy/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace susy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_symplectic(EnsembleClass c) { return c == EnsembleClass::GSE || c == EnsembleClass::CSE; }

// Levels per sample, all samples pooled; sorted.
std::vector<double> pooled(const SpectrumBatch& b) {
  std::vector<double> all;
  for (const auto& row : b.levels) all.insert(all.end(), row.begin(), row.end());
  std::sort(all.begin(), all.end());
  return all;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double f = pos - i;
  return sorted[i] * (1.0 - f) + sorted[i + 1] * f;
}

std::vector<double> uniform_edges(double lo, double hi, double width) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-9)));
  std::vector<double> e(n + 1);
  for (int i = 0; i <= n; ++i) e[i] = lo + i * width;
  return e;
}

int bin_of(const std::vector<double>& edges, double v) {
  if (v < edges.front() || v >= edges.back()) return -1;
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
}

void fill_grid(CorrelationEstimate& e) {
  e.grid.resize(e.edges.size() - 1);
  for (std::size_t i = 0; i + 1 < e.edges.size(); ++i) e.grid[i] = 0.5 * (e.edges[i] + e.edges[i + 1]);
}

// Flag as low statistics when more than 20% of bins have relative error above 50%.
bool low_stats(const std::vector<double>& val, const std::vector<double>& err) {
  int bad = 0;
  for (std::size_t i = 0; i < val.size(); ++i)
    if (val[i] == 0.0 || err[i] > 0.5 * std::abs(val[i])) ++bad;
  return bad > 0.2 * val.size();
}

double semicircle_cdf(double u) {
  u = std::clamp(u, -1.0, 1.0);
  return 0.5 + (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi;
}

// Pairs of equal levels after sorting: try both pairings on the circle (phases) or the
// straight pairing (real levels), collapse by averaging.
std::vector<double> collapse_pairs(std::vector<double> v, bool circular, double& split) {
  const std::size_t n = v.size();
  std::vector<double> out(n / 2);
  auto dist = [&](double a, double b) {
    double d = std::abs(a - b);
    return circular ? std::min(d, kTwoPi - d) : d;
  };
  double s0 = 0.0;
  for (std::size_t i = 0; i < n; i += 2) s0 = std::max(s0, dist(v[i], v[i + 1]));
  if (circular) {
    double s1 = 0.0;
    for (std::size_t i = 1; i < n; i += 2) s1 = std::max(s1, dist(v[i], v[(i + 1) % n]));
    if (s1 < s0) {
      // rotate so that the wrapped pair comes first
      std::rotate(v.begin(), v.end() - 1, v.end());
      v[0] -= kTwoPi;
      s0 = s1;
    }
  }
  for (std::size_t i = 0; i < n; i += 2) {
    double m = 0.5 * (v[i] + v[i + 1]);
    if (circular && m < 0.0) m += kTwoPi;
    out[i / 2] = m;
  }
  if (circular) std::sort(out.begin(), out.end());
  split = s0;
  return out;
}

}  // namespace

std::string to_string(EnsembleClass c) {
  switch (c) {
    case EnsembleClass::GOE: return "GOE";
    case EnsembleClass::GUE: return "GUE";
    case EnsembleClass::GSE: return "GSE";
    case EnsembleClass::COE: return "COE";
    case EnsembleClass::CUE: return "CUE";
    case EnsembleClass::CSE: return "CSE";
  }
  return "?";
}

EnsembleClass ensemble_from_string(const std::string& s) {
  std::string u;
  for (char ch : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  for (auto c : {EnsembleClass::GOE, EnsembleClass::GUE, EnsembleClass::GSE, EnsembleClass::COE,
                 EnsembleClass::CUE, EnsembleClass::CSE})
    if (to_string(c) == u) return c;
  throw DomainError("unknown ensemble class '" + s + "'");
}

int EnsembleSpec::beta() const {
  switch (cls) {
    case EnsembleClass::GOE:
    case EnsembleClass::COE: return 1;
    case EnsembleClass::GUE:
    case EnsembleClass::CUE: return 2;
    default: return 4;
  }
}

bool EnsembleSpec::circular() const {
  return cls == EnsembleClass::COE || cls == EnsembleClass::CUE || cls == EnsembleClass::CSE;
}

void EnsembleSpec::validate() const {
  if (N < 1) throw DomainError("ensemble dimension must be positive");
  if (samples < 1) throw DomainError("need at least one sample");
  if (matrix_dim() > 4096) throw ResourceError("matrix dimension " + std::to_string(matrix_dim()) + " too large");
  const double bytes = 8.0 * N * static_cast<double>(samples);
  if (bytes > 4e9) throw ResourceError("spectrum batch would need " + std::to_string(bytes / 1e9) + " GB");
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

Eigen::MatrixXcd sample_gaussian(EnsembleClass cls, int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  if (cls == EnsembleClass::GOE || cls == EnsembleClass::GUE) {
    const bool complex = cls == EnsembleClass::GUE;
    const double sd_diag = complex ? std::sqrt(0.5) : 1.0;
    const double sd_off = complex ? 0.5 : std::sqrt(0.5);
    Eigen::MatrixXcd h(N, N);
    for (int i = 0; i < N; ++i) {
      h(i, i) = sd_diag * g(rng);
      for (int j = i + 1; j < N; ++j) {
        const double re = sd_off * g(rng);
        const double im = complex ? sd_off * g(rng) : 0.0;
        h(i, j) = Complex(re, im);
        h(j, i) = Complex(re, -im);
      }
    }
    return h;
  }
  if (cls != EnsembleClass::GSE) throw DomainError("not a Gaussian class");
  // [[A, B], [-conj B, conj A]], A Hermitean, B antisymmetric
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N), B = Eigen::MatrixXcd::Zero(N, N);
  const double sd_diag = std::sqrt(1.0 / 8.0), sd_off = 0.25;
  for (int i = 0; i < N; ++i) {
    A(i, i) = sd_diag * g(rng);
    for (int j = i + 1; j < N; ++j) {
      const double a0 = sd_off * g(rng), a1 = sd_off * g(rng), a2 = sd_off * g(rng), a3 = sd_off * g(rng);
      A(i, j) = Complex(a0, a3);
      A(j, i) = std::conj(A(i, j));
      B(i, j) = Complex(a2, a1);
      B(j, i) = -B(i, j);
    }
  }
  Eigen::MatrixXcd h(2 * N, 2 * N);
  h.topLeftCorner(N, N) = A;
  h.topRightCorner(N, N) = B;
  h.bottomLeftCorner(N, N) = -B.conjugate();
  h.bottomRightCorner(N, N) = A.conjugate();
  return h;
}

Eigen::MatrixXcd sample_haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Without this the distribution of Q depends on the QR sign convention and is not Haar.
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : Complex(1.0);
  }
  return q;
}

Eigen::MatrixXcd quaternion_dual(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() % 2) throw DimensionError("quaternion dual needs an even square matrix");
  const int n = static_cast<int>(m.rows()) / 2;
  Eigen::MatrixXcd out(2 * n, 2 * n);
  const auto A = m.topLeftCorner(n, n), B = m.topRightCorner(n, n), C = m.bottomLeftCorner(n, n),
             D = m.bottomRightCorner(n, n);
  out.topLeftCorner(n, n) = D.transpose();
  out.topRightCorner(n, n) = -B.transpose();
  out.bottomLeftCorner(n, n) = -C.transpose();
  out.bottomRightCorner(n, n) = A.transpose();
  return out;
}

Eigen::MatrixXcd sample_circular(EnsembleClass cls, int N, std::mt19937_64& rng) {
  switch (cls) {
    case EnsembleClass::CUE: return sample_haar_unitary(N, rng);
    case EnsembleClass::COE: {
      const Eigen::MatrixXcd u = sample_haar_unitary(N, rng);
      return u.transpose() * u;
    }
    case EnsembleClass::CSE: {
      const Eigen::MatrixXcd u = sample_haar_unitary(2 * N, rng);
      return quaternion_dual(u) * u;
    }
    default: throw DomainError("not a circular class");
  }
}

std::vector<double> levels_of(const EnsembleSpec& spec, const Eigen::MatrixXcd& m, double* split) {
  std::vector<double> v;
  if (spec.circular()) {
    // Cayley transform: e^{i alpha} U -> i (1 - U')(1 + U')^-1 is Hermitean with
    // eigenvalues tan((theta + alpha) / 2). Much cheaper than a general complex Schur
    // form. Rotate by alpha when some phase sits close to pi.
    const int n = static_cast<int>(m.rows());
    const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    double alpha = 0.0;
    for (int attempt = 0;; ++attempt) {
      const Eigen::MatrixXcd u = std::polar(1.0, alpha) * m;
      const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(one + u);
      if (lu.rcond() > 1e-6 || attempt == 8) {
        Eigen::MatrixXcd c = Complex(0.0, 1.0) * lu.solve(one - u);  // (1 + U) and (1 - U) commute
        c = 0.5 * (c + c.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
        for (int i = 0; i < n; ++i) {
          double a = 2.0 * std::atan(es.eigenvalues()(i)) - alpha;
          a = std::fmod(a, kTwoPi);
          if (a < 0.0) a += kTwoPi;
          if (a >= kTwoPi) a -= kTwoPi;
          v.push_back(a);
        }
        break;
      }
      alpha += 2.399963229728653;  // golden angle
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
    v.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  std::sort(v.begin(), v.end());
  double s = 0.0;
  if (is_symplectic(spec.cls)) v = collapse_pairs(std::move(v), spec.circular(), s);
  if (split) *split = s;
  return v;
}

SpectrumBatch sample(const EnsembleSpec& spec, int threads) {
  spec.validate();
  SpectrumBatch batch;
  batch.spec = spec;
  batch.levels.resize(spec.samples);
  std::vector<double> splits(spec.samples, 0.0);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, spec.samples);

  auto work = [&](int first, int stride) {
    for (int s = first; s < spec.samples; s += stride) {
      auto rng = sample_rng(spec.seed, static_cast<std::uint64_t>(s));
      const Eigen::MatrixXcd m =
          spec.circular() ? sample_circular(spec.cls, spec.N, rng) : sample_gaussian(spec.cls, spec.N, rng);
      batch.levels[s] = levels_of(spec, m, &splits[s]);
    }
  };
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  batch.max_degeneracy_split = *std::max_element(splits.begin(), splits.end());
  batch.degeneracy_verified = batch.max_degeneracy_split <= 1e-10;
  return batch;
}

// ---------------------------------------------------------------------------

std::vector<double> freedman_diaconis_edges(const SpectrumBatch& batch) {
  const auto all = pooled(batch);
  if (all.empty()) throw DomainError("empty spectrum batch");
  const double iqr = quantile(all, 0.75) - quantile(all, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(all.size()));
  if (!(width > 0.0)) width = 1.0;
  const double lo = all.front(), hi = all.back();
  return uniform_edges(lo, std::nextafter(hi, hi + 1.0) + (hi == lo ? 1.0 : 0.0), width);
}

CorrelationEstimate estimate_R1(const SpectrumBatch& batch, std::vector<double> edges) {
  if (batch.levels.empty()) throw DomainError("empty spectrum batch");
  CorrelationEstimate e;
  e.kind = "R1";
  e.binning = edges.empty() ? "freedman-diaconis" : "explicit";
  e.edges = edges.empty() ? freedman_diaconis_edges(batch) : std::move(edges);
  if (e.edges.size() < 2) throw DomainError("need at least one bin");
  fill_grid(e);
  std::vector<double> count(e.grid.size(), 0.0);
  for (const auto& row : batch.levels)
    for (double v : row) {
      const int b = bin_of(e.edges, v);
      if (b >= 0) count[b] += 1.0;
    }
  const double S = static_cast<double>(batch.levels.size());
  for (std::size_t i = 0; i < count.size(); ++i) {
    const double w = e.edges[i + 1] - e.edges[i];
    e.values.push_back(count[i] / (S * w));
    // empty bin: value zero, error of one count, i.e. infinite relative error
    e.stderr_.push_back(std::sqrt(std::max(count[i], 1.0)) / (S * w));
  }
  e.low_statistics = low_stats(e.values, e.stderr_);
  return e;
}

double integrate_estimate(const CorrelationEstimate& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.values.size(); ++i) s += e.values[i] * (e.edges[i + 1] - e.edges[i]);
  return s;
}

ResolventEstimate resolvent_R1(const SpectrumBatch& batch, double x, double eps) {
  if (!(eps > 0.0)) throw DomainError("resolvent needs eps > 0");
  const std::size_t S = batch.levels.size();
  if (S == 0) throw DomainError("empty spectrum batch");
  double sum = 0.0, sum2 = 0.0;
  for (const auto& row : batch.levels) {
    double v = 0.0;
    for (double l : row) v += eps / ((x - l) * (x - l) + eps * eps);
    v /= kPi;
    sum += v;
    sum2 += v * v;
  }
  ResolventEstimate r;
  r.value = sum / S;
  const double var = S > 1 ? std::max(0.0, (sum2 - S * r.value * r.value) / (S - 1)) : 0.0;
  r.stderr_ = std::sqrt(var / S);
  return r;
}

double fitted_support_edge(const CorrelationEstimate& r1, double radius, double frac) {
  // weighted least squares of R1^2 = a - b x^2
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  int used = 0;
  for (std::size_t i = 0; i < r1.grid.size(); ++i) {
    if (std::abs(r1.grid[i]) > frac * radius || r1.values[i] <= 0.0) continue;
    const double f = r1.values[i] * r1.values[i];
    const double sig = 2.0 * r1.values[i] * r1.stderr_[i];
    const double w = sig > 0.0 ? 1.0 / (sig * sig) : 1.0;
    const Eigen::Vector2d row(1.0, -r1.grid[i] * r1.grid[i]);
    A += w * row * row.transpose();
    y += w * f * row;
    ++used;
  }
  if (used < 3) throw StatisticsError("too few bins for the support-edge fit");
  const Eigen::Vector2d ab = A.ldlt().solve(y);
  if (!(ab(0) > 0.0 && ab(1) > 0.0)) throw StatisticsError("support-edge fit is not a semicircle");
  return std::sqrt(ab(0) / ab(1));
}

// ---------------------------------------------------------------------------

SpectrumBatch unfold(const SpectrumBatch& batch, const UnfoldingMap& map) {
  if (!(map.keep_fraction > 0.0 && map.keep_fraction <= 1.0)) throw DomainError("keep fraction must lie in (0, 1]");
  if (map.method == UnfoldMethod::Polynomial && (map.degree < 1 || map.degree > 15))
    throw DomainError("polynomial degree must lie in 1..15");
  const EnsembleSpec& spec = batch.spec;
  const double N = spec.N;
  SpectrumBatch out = batch;
  out.unfolded = true;
  out.levels.assign(batch.levels.size(), {});

  std::function<double(double)> F;
  double lo = 0.0, hi = N;
  if (map.method == UnfoldMethod::SemicircleCDF) {
    if (spec.circular()) {
      out.unfolding = "uniform-phase";
      F = [N](double th) { return N * th / kTwoPi; };
    } else {
      out.unfolding = "semicircle-cdf";
      const double R = std::sqrt(2.0 * N / spec.gamma());
      F = [N, R](double x) { return N * semicircle_cdf(x / R); };
      lo = 0.5 * N * (1.0 - map.keep_fraction);
      hi = 0.5 * N * (1.0 + map.keep_fraction);
    }
  } else {
    out.unfolding = "polynomial-" + std::to_string(map.degree);
    // Fit the mean staircase n(x) on the central part of the pooled spectrum.
    const auto all = pooled(batch);
    const double S = static_cast<double>(batch.levels.size());
    const double margin = 0.05;
    const double qlo = std::max(0.0, 0.5 * (1.0 - map.keep_fraction) - margin);
    const double qhi = std::min(1.0, 0.5 * (1.0 + map.keep_fraction) + margin);
    const std::size_t i0 = static_cast<std::size_t>(qlo * (all.size() - 1));
    const std::size_t i1 = static_cast<std::size_t>(qhi * (all.size() - 1));
    const double xa = all[i0], xb = all[i1];
    if (!(xb > xa)) throw UnfoldingError("degenerate fit range");
    const double mid = 0.5 * (xa + xb), half = 0.5 * (xb - xa);
    const std::size_t stride = std::max<std::size_t>(1, (i1 - i0) / 20000);
    std::vector<std::size_t> idx;
    for (std::size_t i = i0; i <= i1; i += stride) idx.push_back(i);
    const int d = map.degree;
    Eigen::MatrixXd V(idx.size(), d + 1);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double t = (all[idx[r]] - mid) / half;
      // Legendre basis for conditioning
      double p0 = 1.0, p1 = t;
      V(r, 0) = 1.0;
      if (d >= 1) V(r, 1) = t;
      for (int k = 2; k <= d; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        V(r, k) = p2;
        p0 = p1;
        p1 = p2;
      }
      rhs(r) = (idx[r] + 0.5) / S;
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(rhs);
    auto poly = [c, d, mid, half](double x) {
      const double t = (x - mid) / half;
      double p0 = 1.0, p1 = t, s = c(0) + (d >= 1 ? c(1) * t : 0.0);
      for (int k = 2; k <= d; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        s += c(k) * p2;
        p0 = p1;
        p1 = p2;
      }
      return s;
    };
    for (int i = 1; i <= 2000; ++i) {
      const double a = xa + (i - 1) * (xb - xa) / 2000, b = xa + i * (xb - xa) / 2000;
      if (!(poly(b) > poly(a))) throw UnfoldingError("fitted staircase is not monotone");
    }
    F = [poly, xa, xb](double x) {
      if (x < xa || x > xb) return std::numeric_limits<double>::quiet_NaN();
      return poly(x);
    };
    lo = (0.5 * (1.0 - map.keep_fraction)) * all.size() / S;
    hi = (0.5 * (1.0 + map.keep_fraction)) * all.size() / S;
  }
  out.window_lo = lo;
  out.window_hi = hi;
  for (std::size_t s = 0; s < batch.levels.size(); ++s)
    for (double v : batch.levels[s]) {
      const double u = F(v);
      if (u >= lo && u <= hi) out.levels[s].push_back(u);
    }
  return out;
}

double mean_spacing(const SpectrumBatch& unfolded) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : unfolded.levels)
    for (std::size_t i = 1; i < row.size(); ++i) {
      sum += row[i] - row[i - 1];
      ++n;
    }
  if (n == 0) throw StatisticsError("no spacings");
  return sum / n;
}

std::vector<double> pooled_spacings(const SpectrumBatch& unfolded) {
  std::vector<double> s;
  for (const auto& row : unfolded.levels)
    for (std::size_t i = 1; i < row.size(); ++i) s.push_back(row[i] - row[i - 1]);
  return s;
}

LocalStatistics local_statistics(const SpectrumBatch& unfolded, double xi_max, double bin, int blocks) {
  if (!unfolded.unfolded) throw DomainError("local statistics need an unfolded batch");
  if (!(xi_max > 0.0 && bin > 0.0)) throw DomainError("bad grid");
  LocalStatistics out;

  // nearest-neighbour spacings
  {
    auto& e = out.spacing;
    e.kind = "spacing";
    e.binning = "uniform";
    e.edges = uniform_edges(0.0, std::max(4.0, xi_max), bin);
    fill_grid(e);
    std::vector<double> count(e.grid.size(), 0.0);
    const auto s = pooled_spacings(unfolded);
    for (double v : s) {
      const int b = bin_of(e.edges, v);
      if (b >= 0) count[b] += 1.0;
    }
    const double n = std::max<double>(1.0, s.size());
    for (std::size_t i = 0; i < count.size(); ++i) {
      const double w = e.edges[i + 1] - e.edges[i];
      e.values.push_back(count[i] / (n * w));
      e.stderr_.push_back(std::sqrt(std::max(count[i], 1.0)) / (n * w));
    }
    e.low_statistics = low_stats(e.values, e.stderr_);
  }

  // two-point function: partners to the right of reference levels whose window fits inside
  auto& y = out.y2;
  y.kind = "Y2";
  y.binning = "uniform, batch-means errors";
  y.edges = uniform_edges(0.0, xi_max, bin);
  fill_grid(y);
  const std::size_t nb = y.grid.size();
  const int S = static_cast<int>(unfolded.levels.size());
  blocks = std::clamp(blocks, 1, S);
  std::vector<std::vector<double>> bc(blocks, std::vector<double>(nb, 0.0));
  std::vector<double> bref(blocks, 0.0);
  for (int s = 0; s < S; ++s) {
    const int blk = static_cast<int>(static_cast<long long>(s) * blocks / S);
    const auto& u = unfolded.levels[s];
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] + xi_max > unfolded.window_hi) break;
      bref[blk] += 1.0;
      for (std::size_t j = i + 1; j < u.size(); ++j) {
        const double d = u[j] - u[i];
        if (d >= xi_max) break;
        const int b = bin_of(y.edges, d);
        if (b >= 0) bc[blk][b] += 1.0;
      }
    }
  }
  double nref = 0.0;
  for (double r : bref) nref += r;
  if (nref == 0.0) throw StatisticsError("no reference levels inside the unfolding window");
  std::vector<double> rel(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const double w = y.edges[k + 1] - y.edges[k];
    double tot = 0.0;
    for (int b = 0; b < blocks; ++b) tot += bc[b][k];
    const double r2 = tot / (nref * w);
    y.values.push_back(1.0 - r2);
    double se = 0.0;
    if (blocks > 1) {
      double m = 0.0, m2 = 0.0;
      int used = 0;
      for (int b = 0; b < blocks; ++b) {
        if (bref[b] == 0.0) continue;
        const double v = bc[b][k] / (bref[b] * w);
        m += v;
        m2 += v * v;
        ++used;
      }
      if (used > 1) {
        m /= used;
        se = std::sqrt(std::max(0.0, (m2 - used * m * m) / (used - 1)) / used);
      }
    } else {
      se = std::sqrt(std::max(tot, 1.0)) / (nref * w);
    }
    y.stderr_.push_back(se);
    rel[k] = r2;
  }
  y.low_statistics = low_stats(rel, y.stderr_);
  return out;
}

double y2_at_zero(const CorrelationEstimate& y2, double xi_fit) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d r = Eigen::Vector2d::Zero();
  int used = 0;
  for (std::size_t i = 0; i < y2.grid.size(); ++i) {
    if (y2.grid[i] > xi_fit) continue;
    const double a = y2.edges[i], b = y2.edges[i + 1];
    const double xi2 = (b * b * b - a * a * a) / (3.0 * (b - a));  // bin average of xi^2
    const double w = y2.stderr_[i] > 0.0 ? 1.0 / (y2.stderr_[i] * y2.stderr_[i]) : 1.0;
    const Eigen::Vector2d row(1.0, xi2);
    A += w * row * row.transpose();
    r += w * y2.values[i] * row;
    ++used;
  }
  if (used < 2) throw StatisticsError("too few bins near xi = 0");
  return A.ldlt().solve(r)(0);
}

double sine_kernel_y2(double xi) {
  if (xi == 0.0) return 1.0;
  const double a = std::sin(kPi * xi) / (kPi * xi);
  return a * a;
}

double gue_kernel_y2(int N, double xi) {
  if (N < 1) throw DomainError("N must be positive");
  // Orthonormal Hermite functions for the weight exp(-x^2) of exp(-tr H^2).
  auto phis = [N](double x) {
    std::vector<double> p(N);
    p[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (N > 1) p[1] = std::sqrt(2.0) * x * p[0];
    for (int n = 1; n + 1 < N; ++n)
      p[n + 1] = std::sqrt(2.0 / (n + 1)) * x * p[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * p[n - 1];
    return p;
  };
  const auto p0 = phis(0.0);
  double k00 = 0.0;
  for (double v : p0) k00 += v * v;
  const auto py = phis(xi / k00);
  double k0y = 0.0;
  for (int n = 0; n < N; ++n) k0y += p0[n] * py[n];
  return k0y * k0y / (k00 * k00);
}

// ---------------------------------------------------------------------------

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = a.size(), nb = b.size();
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_uniform(std::vector<double> u) {
  if (u.empty()) throw DomainError("KS test needs a nonempty sample");
  std::sort(u.begin(), u.end());
  const double n = u.size();
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

double kolmogorov_pvalue(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 1e-3) return 1.0;
  double q = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lam * lam);
    q += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

ZkDirectResult zk_from_batch(const SpectrumBatch& batch, const SourceConfig& src, double rel_tol) {
  src.validate();
  if (batch.spec.circular()) throw DomainError("zk_direct is defined for the Gaussian classes");
  if (src.k() > 2) throw DomainError("zk_direct supports k <= 2");
  if (src.beta != batch.spec.beta()) throw DomainError("source beta does not match the ensemble");
  const int gamma = batch.spec.gamma();
  const std::size_t S = batch.levels.size();
  if (S == 0) throw DomainError("empty spectrum batch");
  const Complex I(0.0, 1.0);
  Complex sum(0.0);
  std::vector<Complex> vals(S);
  for (std::size_t s = 0; s < S; ++s) {
    Complex v(1.0);
    for (int p = 0; p < src.k(); ++p) {
      if (src.J[p] == 0.0) continue;
      const Complex shift = -src.x[p] + I * (src.L[p] * src.eps);
      for (double l : batch.levels[s]) {
        const Complex r = (l + shift - src.J[p]) / (l + shift + src.J[p]);
        v *= gamma == 2 ? r * r : r;
      }
    }
    vals[s] = v;
    sum += v;
  }
  ZkDirectResult out;
  out.samples = static_cast<int>(S);
  out.mean = sum / static_cast<double>(S);
  double var = 0.0;
  for (const auto& v : vals) var += std::norm(v - out.mean);
  out.variance = S > 1 ? var / (S - 1) : 0.0;
  out.stderr_ = std::sqrt(out.variance / S);
  if (rel_tol > 0.0 && out.stderr_ > rel_tol * std::abs(out.mean))
    throw StatisticsError("generating function relative error " + std::to_string(out.stderr_ / std::abs(out.mean)) +
                          " above tolerance");
  return out;
}

ZkDirectResult zk_direct(const EnsembleSpec& spec, const SourceConfig& src, double rel_tol) {
  return zk_from_batch(sample(spec), src, rel_tol);
}

}  // namespace susy
