// susyrmt: verification suites, spectral pipelines and the convention dump.
//
// Exit codes: 0 pass, 1 a check failed, 2 usage error, 3 numeric failure.
// The default seed comes from SUSYRMT_SEED. A TOML config file (--config)
// can supply any option; flags given on the command line win.

#include "susy/errors.hpp"
#include "susy/grassmann.hpp"
#include "susy/pipeline.hpp"
#include "susy/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSeedEnv = "SUSYRMT_SEED";
constexpr const char* kVerifySchema = "susyrmt.verify/1";

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw susy::DomainError("cannot write '" + path + "'");
  f << text;
  if (!f.flush()) throw susy::DomainError("write to '" + path + "' failed");
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// --------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 42;
  std::optional<int> beta, n, k;
  std::vector<std::string> tol;
  int threads = 0;
  std::string report;
  std::string format = "text";
};

json verify_config(const VerifyArgs& a, const susy::VerifyOptions& o) {
  json c;
  c["suite"] = a.suite;
  c["seed"] = o.seed;
  c["beta"] = o.beta ? json(*o.beta) : json(nullptr);
  c["n"] = o.N ? json(*o.N) : json(nullptr);
  c["k"] = o.k ? json(*o.k) : json(nullptr);
  c["tol"] = json::object();
  for (const auto& [name, v] : o.tol) c["tol"][name] = v;
  return c;
}

int run_verify(const VerifyArgs& a) {
  susy::VerifyOptions o;
  o.seed = a.seed;
  o.beta = a.beta;
  o.N = a.n;
  o.k = a.k;
  o.threads = a.threads;
  for (const auto& t : a.tol) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw susy::DomainError("--tol wants check=value, got '" + t + "'");
    try {
      std::size_t used = 0;
      const std::string num = t.substr(eq + 1);
      const double v = std::stod(num, &used);
      if (used != num.size() || !(v >= 0.0)) throw std::invalid_argument(t);
      o.tol[t.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw susy::DomainError("--tol wants check=value, got '" + t + "'");
    }
  }
  const json config = verify_config(a, o);
  const bool text = a.format == "text";
  if (text) std::cout << "config " << config.dump() << "  threads=" << a.threads << "\n" << std::flush;

  const auto rep = susy::run_suite(a.suite, o);

  // timings only go to the terminal so the report stays reproducible
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"cases", c.cases}, {"residual", c.residual}, {"tol", c.tol},
                      {"pass", c.pass}, {"note", c.note}});
    if (text)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << fmt(c.residual) << " tol=" << fmt(c.tol)
                << " cases=" << c.cases << " (" << fmt(c.seconds) << " s)" << (c.note.empty() ? "" : "  " + c.note)
                << "\n";
  }
  json r;
  r["schema"] = kVerifySchema;
  r["config"] = config;
  r["pass"] = rep.pass();
  r["failing"] = rep.failing();
  r["checks"] = checks;
  const std::string path = a.report.empty() ? "verify_" + a.suite + ".json" : a.report;
  write_file(path, r.dump(2) + "\n");

  if (text) {
    std::cout << (rep.pass() ? "suite " + a.suite + " passed" : "suite " + a.suite + " FAILED") << " ("
              << rep.checks.size() << " checks), report " << path << "\n";
  } else {
    std::cout << r.dump(2) << "\n";
  }
  if (!rep.pass()) {
    std::cerr << "failing checks:\n";
    for (const auto& f : rep.failing()) std::cerr << "  " << f << "\n";
    return kCheckFailed;
  }
  return kPass;
}

// --------------------------------------------------------------------------

struct PipelineArgs {
  susy::PipelineConfig cfg;
  std::string cls = "gue";
  std::string t_grid;
  std::string out;
  std::string format = "csv";
};

int run_pipeline_cmd(PipelineArgs a) {
  a.cfg.cls = susy::ensemble_from_string(a.cls);
  if (!a.t_grid.empty()) susy::parse_t_grid(a.t_grid, a.cfg.t_lo, a.cfg.t_hi, a.cfg.t_step);
  a.cfg.validate();
  std::cout << "config " << susy::to_json(a.cfg).dump() << "  threads=" << a.cfg.threads << "\n" << std::flush;

  const auto res = susy::run_pipeline(a.cfg);
  const std::string stem = a.out.empty() ? a.cfg.kind : a.out;
  if (a.format == "csv") {
    write_file(stem + ".csv", res.csv());
    write_file(stem + ".json", res.metadata().dump(2) + "\n");
    std::cout << "wrote " << stem << ".csv and " << stem << ".json (" << res.rows.size() << " rows)\n";
  } else {
    write_file(stem + ".json", res.to_json().dump(2) + "\n");
    std::cout << "wrote " << stem << ".json (" << res.rows.size() << " rows)\n";
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return kPass;
}

// --------------------------------------------------------------------------

json conventions() {
  json j;
  j["schema"] = "susyrmt.conventions/1";
  j["berezin"] = {
      {"normalization", std::real(susy::default_berezin_norm())},
      {"normalization_text", "1/sqrt(2 pi) per differential"},
      {"generators", "id 2p is zeta_p, id 2p+1 is zeta_p^*"},
      {"order", "int f dzeta_a dzeta_b ...: the first listed differential is integrated first"},
      {"example", "int (1 + a zeta^* zeta) dzeta dzeta^* = a/(2 pi)"}};
  j["conjugation"] = {{"rule", "(zeta^*)^* = -zeta, (a b)^* = a^* b^*, c^* complex conjugate on numbers"},
                      {"alternative", "order reversal (a b)^* = b^* a^*, selectable in the library"}};
  j["ensembles"] = {
      {"weight", "P(H) ~ exp(-beta tr H^2 / 2), trace in the complex representation"},
      {"variance", {{"GOE", "diagonal 1, off-diagonal 1/2"},
                    {"GUE", "diagonal 1/2, off-diagonal Re and Im 1/4 each"},
                    {"GSE", "diagonal 1/8, quaternion components 1/16 each"}}},
      {"semicircle_radius", "sqrt(2 N / gamma), gamma = 2 for GSE else 1"},
      {"circular", "CUE Haar; COE U^T U; CSE U^D U"}};
  j["supermatrix"] = {{"str", "tr a - tr b"}, {"sdet", "det(a - sigma b^-1 tau) / det b"}};
  j["seed_env"] = kSeedEnv;
  return j;
}

int run_dump(const std::string& format) {
  json j = conventions();
  if (format == "json") {
    j["config"] = {{"format", format}};
    std::cout << j.dump(2) << "\n";
    return kPass;
  }
  std::cout << "config {\"format\":\"text\"}\n";
  std::cout << "berezin normalization  " << susy::format_number(j["berezin"]["normalization"].get<double>()) << "  ("
            << j["berezin"]["normalization_text"].get<std::string>() << ")\n";
  std::cout << "berezin order          " << j["berezin"]["order"].get<std::string>() << "\n";
  std::cout << "generators             " << j["berezin"]["generators"].get<std::string>() << "\n";
  std::cout << "conjugation            " << j["conjugation"]["rule"].get<std::string>() << "\n";
  std::cout << "ensemble weight        " << j["ensembles"]["weight"].get<std::string>() << "\n";
  for (const auto& [cls, v] : j["ensembles"]["variance"].items())
    std::cout << "variance " << cls << "           " << v.get<std::string>() << "\n";
  std::cout << "semicircle radius      " << j["ensembles"]["semicircle_radius"].get<std::string>() << "\n";
  std::cout << "supertrace             " << j["supermatrix"]["str"].get<std::string>() << "\n";
  std::cout << "superdeterminant       " << j["supermatrix"]["sdet"].get<std::string>() << "\n";
  std::cout << "default seed env       " << kSeedEnv << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"supersymmetry and random matrix numerics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");

  std::uint64_t default_seed = 42;

  auto* verify = app.add_subcommand("verify", "run a verification suite and write a JSON report");
  VerifyArgs va;
  va.seed = default_seed;
  verify->add_option("--suite", va.suite, "suite name")->required()->check(CLI::IsMember(susy::suite_names()));
  verify->add_option("--seed", va.seed, "master seed")->envname(kSeedEnv);
  verify->add_option("--beta", va.beta, "restrict the duality checks to this beta")->check(CLI::IsMember({1, 2, 4}));
  verify->add_option("--n", va.n, "restrict the duality checks to this N")->check(CLI::Range(1, 4));
  verify->add_option("--k", va.k, "restrict the duality checks to this k")->check(CLI::Range(1, 2));
  verify->add_option("--tol", va.tol, "tolerance override, check=value (repeatable)");
  verify->add_option("--threads", va.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
  verify->add_option("--report", va.report, "report path (default verify_<suite>.json)");
  verify->add_option("--format", va.format, "stdout format")->check(CLI::IsMember({"text", "json"}));

  auto* pipe = app.add_subcommand("pipeline", "sample, estimate and write CSV plus JSON metadata");
  PipelineArgs pa;
  pa.cfg.seed = default_seed;
  pipe->add_option("kind", pa.cfg.kind, "density, spacing, y2 or crossover")
      ->required()
      ->check(CLI::IsMember({"density", "spacing", "y2", "crossover"}));
  pipe->add_option("--class", pa.cls, "GOE GUE GSE COE CUE CSE (any case)");
  pipe->add_option("--n", pa.cfg.N, "matrix dimension");
  pipe->add_option("--samples", pa.cfg.samples, "number of samples");
  pipe->add_option("--seed", pa.cfg.seed, "master seed")->envname(kSeedEnv);
  pipe->add_option("--threads", pa.cfg.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
  pipe->add_option("--unfold", pa.cfg.unfold, "auto, semicircle or polynomial")
      ->check(CLI::IsMember({"auto", "semicircle", "polynomial"}));
  pipe->add_option("--poly-degree", pa.cfg.poly_degree, "degree of the polynomial unfolding");
  pipe->add_option("--xi-max", pa.cfg.xi_max, "upper end of the spacing / Y2 grid");
  pipe->add_option("--bin", pa.cfg.bin, "bin width on the unfolded scale");
  pipe->add_option("--blocks", pa.cfg.blocks, "sample blocks for batch-means errors");
  pipe->add_option("--t-grid", pa.t_grid, "crossover times lo:hi:step (default 0:2:0.1)");
  pipe->add_option("--out", pa.out, "output stem (default: the pipeline kind)");
  pipe->add_option("--format", pa.format, "csv (plus .json metadata) or json")->check(CLI::IsMember({"csv", "json"}));

  auto* dump = app.add_subcommand("dump-conventions", "print the sign and normalization conventions");
  std::string dump_format = "text";
  dump->add_option("--format", dump_format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*verify) return run_verify(va);
    if (*pipe) return run_pipeline_cmd(pa);
    return run_dump(dump_format);
  } catch (const susy::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const susy::SusyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}
