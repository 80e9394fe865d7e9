#pragma once

// Spectral-statistics pipelines behind `susyrmt pipeline`. Output is a table
// whose first three columns are grid, value, stderr, plus JSON metadata. The
// text is a pure function of the config: no timestamps, fixed number format,
// and the sampling partition does not depend on the thread count.

#include "susy/ensembles.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace susy {

inline constexpr const char* kPipelineSchema = "susyrmt.pipeline/1";

struct PipelineConfig {
  std::string kind = "density";  // density, spacing, y2, crossover
  EnsembleClass cls = EnsembleClass::GUE;
  int N = 50;
  int samples = 1000;
  std::uint64_t seed = 42;
  int threads = 0;               // not part of the echoed config: output does not depend on it
  std::string unfold = "auto";   // auto, semicircle, polynomial
  int poly_degree = 5;
  double xi_max = 3.0, bin = 0.1;
  int blocks = 20;               // batch means for spacing/y2/crossover errors
  double t_lo = 0.0, t_hi = 2.0, t_step = 0.1;  // crossover sweep, Poisson diagonal start with unit spacing

  void validate() const;
  std::vector<double> t_grid() const;
};

// "a:b:dt" -> lo, hi, step
void parse_t_grid(const std::string& text, double& lo, double& hi, double& step);
std::string format_number(double v);  // %.17g, "nan" for NaN

nlohmann::ordered_json to_json(const PipelineConfig& cfg);

struct PipelineOutput {
  PipelineConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;

  std::string csv() const;                 // "# " header lines with schema and config, then the table
  nlohmann::ordered_json metadata() const; // schema, config, columns, summary, warnings
  nlohmann::ordered_json to_json() const;  // metadata plus the table
};

PipelineOutput run_pipeline(const PipelineConfig& cfg);

}  // namespace susy
