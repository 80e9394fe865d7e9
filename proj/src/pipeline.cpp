#include "susy/pipeline.hpp"

#include "susy/brownian.hpp"
#include "susy/genfun.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace susy {

namespace {

constexpr double kPi = std::numbers::pi;

// Wigner surmise, reference column for the spacing pipeline
double surmise(int beta, double s) {
  switch (beta) {
    case 1: return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
    case 2: return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi);
    default:
      return std::pow(2.0, 18) / (729.0 * kPi * kPi * kPi) * std::pow(s, 4) * std::exp(-64.0 * s * s / (9.0 * kPi));
  }
}

UnfoldingMap unfolding_for(const PipelineConfig& c, bool crossover) {
  UnfoldingMap m;
  const bool poly = c.unfold == "polynomial" || (c.unfold == "auto" && crossover);
  if (poly) {
    m.method = UnfoldMethod::Polynomial;
    m.degree = c.poly_degree;
  }
  return m;
}

EnsembleSpec spec_of(const PipelineConfig& c) {
  EnsembleSpec s;
  s.cls = c.cls;
  s.N = c.N;
  s.samples = c.samples;
  s.seed = c.seed;
  return s;
}

void note_batch(const SpectrumBatch& b, PipelineOutput& out) {
  if (!b.degeneracy_verified)
    out.warnings.push_back("kramers degeneracy split " + format_number(b.max_degeneracy_split));
}

void table_from(const CorrelationEstimate& e, PipelineOutput& out) {
  for (std::size_t i = 0; i < e.values.size(); ++i)
    out.rows.push_back({e.grid[i], e.values[i], e.stderr_[i], e.edges[i], e.edges[i + 1]});
  out.columns = {e.kind == "R1" ? "x" : (e.kind == "spacing" ? "s" : "xi"), e.kind, "stderr", "lo", "hi"};
  if (e.low_statistics) out.warnings.push_back("low_statistics: " + e.kind + " has bins with large relative error");
  out.summary["binning"] = e.binning;
  out.summary["bins"] = e.values.size();
}

void density(const PipelineConfig& c, PipelineOutput& out) {
  const auto batch = sample(spec_of(c), c.threads);
  note_batch(batch, out);
  const auto e = estimate_R1(batch);
  table_from(e, out);
  out.columns.push_back("reference");
  const int gamma = batch.spec.gamma();
  for (auto& r : out.rows)
    r.push_back(batch.spec.circular() ? c.N / (2.0 * kPi) : semicircle_density(r[0], c.N, gamma));
  out.summary["integral"] = integrate_estimate(e);
  out.summary["reference"] = batch.spec.circular() ? "uniform N/2pi" : "semicircle";
}

void local(const PipelineConfig& c, PipelineOutput& out, bool spacing) {
  const auto batch = sample(spec_of(c), c.threads);
  note_batch(batch, out);
  const auto u = unfold(batch, unfolding_for(c, false));
  out.summary["unfolding"] = u.unfolding;
  const auto ls = local_statistics(u, c.xi_max, c.bin, c.blocks);
  const int beta = batch.spec.beta();
  if (spacing) {
    table_from(ls.spacing, out);
    out.columns.push_back("surmise");
    for (auto& r : out.rows) r.push_back(surmise(beta, r[0]));
    out.summary["mean_spacing"] = mean_spacing(u);
  } else {
    table_from(ls.y2, out);
    if (beta == 2) {
      out.columns.push_back("sine_kernel");
      for (auto& r : out.rows) r.push_back(sine_kernel_y2(r[0]));
    }
    out.summary["y2_at_zero"] = y2_at_zero(ls.y2);
  }
}

// Spacing variance over t for H(t) = H0 + sqrt(2t) H with a Poisson diagonal H0 of unit
// mean spacing, so tau = t. Errors are batch means over sample blocks.
void crossover(const PipelineConfig& c, PipelineOutput& out) {
  out.columns = {"t", "spacing_variance", "stderr", "tau"};
  const auto map = unfolding_for(c, true);
  for (double t : c.t_grid()) {
    CrossoverSpec s;
    s.initial = InitialKind::PoissonDiagonal;
    s.target = c.cls;
    s.N = c.N;
    s.t = t;
    s.samples = c.samples;
    s.seed = c.seed;
    const auto u = unfold(evolve(s, c.threads), map);
    const double v = spacing_variance(u);
    const int B = std::min<int>(c.blocks, static_cast<int>(u.levels.size()));
    double m = 0.0, m2 = 0.0;
    for (int b = 0; b < B; ++b) {
      SpectrumBatch part = u;
      const std::size_t lo = u.levels.size() * b / B, hi = u.levels.size() * (b + 1) / B;
      part.levels.assign(u.levels.begin() + lo, u.levels.begin() + hi);
      const double vb = spacing_variance(part);
      m += vb;
      m2 += vb * vb;
    }
    m /= B;
    const double se = B > 1 ? std::sqrt(std::max(0.0, (m2 / B - m * m) / (B - 1))) : NAN;
    out.rows.push_back({t, v, se, t});
  }
  out.summary["initial"] = "poisson-diagonal, unit spacing";
  out.summary["unfolding"] = "polynomial-" + std::to_string(c.poly_degree);
  out.summary["poisson_value"] = 1.0;
  out.summary["gue_value"] = 0.178;
  if (c.samples < 2 * c.blocks) out.warnings.push_back("low_statistics: fewer than two samples per block");
}

}  // namespace

void PipelineConfig::validate() const {
  if (kind != "density" && kind != "spacing" && kind != "y2" && kind != "crossover")
    throw DomainError("unknown pipeline '" + kind + "' (density, spacing, y2, crossover)");
  if (unfold != "auto" && unfold != "semicircle" && unfold != "polynomial")
    throw DomainError("unfold must be auto, semicircle or polynomial");
  if (N < 2) throw DomainError("pipelines need N >= 2");
  if (samples < 1) throw DomainError("samples must be positive");
  if (blocks < 2) throw DomainError("blocks must be at least 2");
  if (!(xi_max > 0.0) || !(bin > 0.0) || bin > xi_max) throw DomainError("need 0 < bin <= xi_max");
  if (kind == "crossover") {
    if (EnsembleSpec{cls, N, seed, samples}.circular()) throw DomainError("crossover needs a Gaussian target class");
    if (!(t_lo >= 0.0) || !(t_step > 0.0) || !(t_hi >= t_lo)) throw DomainError("t grid needs 0 <= lo <= hi and step > 0");
    if ((t_hi - t_lo) / t_step > 10000) throw DomainError("t grid has more than 10000 points");
  }
}

std::vector<double> PipelineConfig::t_grid() const {
  // integer steps so the grid does not drift with repeated addition
  const long n = std::lround(std::floor((t_hi - t_lo) / t_step + 1e-9));
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(t_lo + static_cast<double>(i) * t_step);
  return g;
}

void parse_t_grid(const std::string& text, double& lo, double& hi, double& step) {
  std::istringstream is(text);
  std::string a, b, d;
  if (!std::getline(is, a, ':') || !std::getline(is, b, ':') || !std::getline(is, d) || a.empty() || b.empty() ||
      d.empty())
    throw DomainError("t grid must look like lo:hi:step, got '" + text + "'");
  try {
    std::size_t p1, p2, p3;
    lo = std::stod(a, &p1);
    hi = std::stod(b, &p2);
    step = std::stod(d, &p3);
    if (p1 != a.size() || p2 != b.size() || p3 != d.size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw DomainError("t grid must look like lo:hi:step, got '" + text + "'");
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = c.kind;
  j["class"] = to_string(c.cls);
  j["n"] = c.N;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["unfold"] = c.unfold;
  if (c.kind == "crossover" || c.unfold == "polynomial") j["poly_degree"] = c.poly_degree;
  if (c.kind == "spacing" || c.kind == "y2") {
    j["xi_max"] = c.xi_max;
    j["bin"] = c.bin;
  }
  if (c.kind != "density") j["blocks"] = c.blocks;
  if (c.kind == "crossover") j["t_grid"] = {c.t_lo, c.t_hi, c.t_step};
  return j;
}

std::string PipelineOutput::csv() const {
  std::string s = std::string("# schema ") + kPipelineSchema + "\n# config " + susy::to_json(config).dump() + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_number(r[i]);
    s += "\n";
  }
  return s;
}

nlohmann::ordered_json PipelineOutput::metadata() const {
  nlohmann::ordered_json j;
  j["schema"] = kPipelineSchema;
  j["config"] = susy::to_json(config);
  j["columns"] = columns;
  j["rows"] = rows.size();
  j["summary"] = summary;
  j["warnings"] = warnings;
  return j;
}

nlohmann::ordered_json PipelineOutput::to_json() const {
  auto j = metadata();
  // NaN has no JSON literal; it becomes null
  auto data = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    auto row = nlohmann::ordered_json::array();
    for (double v : r) row.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr));
    data.push_back(row);
  }
  j["data"] = data;
  return j;
}

PipelineOutput run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineOutput out;
  out.config = cfg;
  if (cfg.kind == "density") density(cfg, out);
  else if (cfg.kind == "spacing") local(cfg, out, true);
  else if (cfg.kind == "y2") local(cfg, out, false);
  else crossover(cfg, out);
  return out;
}

}  // namespace susy
