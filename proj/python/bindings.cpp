// Thin Python layer: suites and pipelines return the same JSON as the CLI,
// spectra come back as nested lists.

#include "susy/brownian.hpp"
#include "susy/colorflavor.hpp"
#include "susy/pipeline.hpp"
#include "susy/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace susy;

namespace {

std::string suite_json(const std::string& name, std::uint64_t seed, std::optional<int> beta, std::optional<int> n,
                       std::optional<int> k, const std::map<std::string, double>& tol, int threads) {
  VerifyOptions o;
  o.seed = seed;
  o.beta = beta;
  o.N = n;
  o.k = k;
  o.tol = tol;
  o.threads = threads;
  py::gil_scoped_release nogil;
  const auto rep = run_suite(name, o);
  nlohmann::ordered_json j;
  j["suite"] = rep.suite;
  j["pass"] = rep.pass();
  j["failing"] = rep.failing();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks)
    j["checks"].push_back({{"name", c.name}, {"cases", c.cases}, {"residual", c.residual}, {"tol", c.tol},
                           {"pass", c.pass}, {"seconds", c.seconds}, {"note", c.note}});
  return j.dump();
}

py::tuple pipeline(PipelineConfig c, const std::string& cls) {
  c.cls = ensemble_from_string(cls);
  PipelineOutput out;
  {
    py::gil_scoped_release nogil;
    out = run_pipeline(c);
  }
  return py::make_tuple(out.csv(), out.to_json().dump());
}

}  // namespace

PYBIND11_MODULE(_susy, m) {
  m.doc() = "supersymmetry and random matrix numerics";

  auto base = py::register_exception<SusyError>(m, "SusyError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  m.def("suite_names", &suite_names);
  m.def("run_suite_json", &suite_json, py::arg("name"), py::arg("seed") = 42, py::arg("beta") = py::none(),
        py::arg("n") = py::none(), py::arg("k") = py::none(), py::arg("tol") = std::map<std::string, double>{},
        py::arg("threads") = 0);

  m.def(
      "run_pipeline_raw",
      [](const std::string& kind, const std::string& cls, int n, int samples, std::uint64_t seed, int threads,
         const std::string& unfold, double t_lo, double t_hi, double t_step, int blocks) {
        PipelineConfig c;
        c.kind = kind;
        c.N = n;
        c.samples = samples;
        c.seed = seed;
        c.threads = threads;
        c.unfold = unfold;
        c.t_lo = t_lo;
        c.t_hi = t_hi;
        c.t_step = t_step;
        c.blocks = blocks;
        return pipeline(c, cls);
      },
      py::arg("kind"), py::arg("cls") = "GUE", py::arg("n") = 50, py::arg("samples") = 1000, py::arg("seed") = 42,
      py::arg("threads") = 0, py::arg("unfold") = "auto", py::arg("t_lo") = 0.0, py::arg("t_hi") = 2.0,
      py::arg("t_step") = 0.1, py::arg("blocks") = 20);

  m.def(
      "sample_levels",
      [](const std::string& cls, int n, int samples, std::uint64_t seed, int threads) {
        EnsembleSpec s;
        s.cls = ensemble_from_string(cls);
        s.N = n;
        s.samples = samples;
        s.seed = seed;
        py::gil_scoped_release nogil;
        return sample(s, threads).levels;
      },
      py::arg("cls"), py::arg("n"), py::arg("samples"), py::arg("seed") = 42, py::arg("threads") = 0);

  m.def("berezin_norm", [] { return std::real(default_berezin_norm()); });
  m.def("semicircle_density", &semicircle_density, py::arg("x"), py::arg("n"), py::arg("gamma") = 1);
  m.def("sine_kernel_y2", &sine_kernel_y2, py::arg("xi"));

  m.def(
      "z0_initial",
      [](Complex s1, Complex s2, const std::vector<double>& levels) { return z0_initial({s1, s2}, levels); },
      py::arg("s1"), py::arg("s2"), py::arg("h0_levels"));
  m.def(
      "propagator_k1",
      [](Complex s1, Complex s2, Complex r1, Complex r2, double t) {
        return propagator_k1({s1, s2}, {r1, r2}, t).value;
      },
      py::arg("s1"), py::arg("s2"), py::arg("r1"), py::arg("r2"), py::arg("t"));

  m.def(
      "compare_color_flavor",
      [](int M, int seeds, std::uint64_t seed) {
        CFTConfig c;
        c.M = M;
        CFTComparison r;
        {
          py::gil_scoped_release nogil;
          r = compare_cft(c, seeds, seed);
        }
        py::dict d;
        d["seeds"] = r.seeds;
        d["max_coefficient_diff"] = r.max_coefficient_diff;
        d["max_evaluated_diff"] = r.max_evaluated_diff;
        d["normalization"] = r.normalization;
        d["doubling_residual"] = r.doubling_residual;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("M") = 4, py::arg("seeds") = 20, py::arg("seed") = 1);
}
