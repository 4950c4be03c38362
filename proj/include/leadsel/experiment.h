// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration, N_l sweeps and report files.
//
// A config is one JSON document (schema in README.md). run_experiment builds
// the graph, evaluates the requested methods for every N_l in ascending order
// and collects a BoundsReport; emit_plot_data writes it as CSV plus a JSON
// sidecar.

#ifndef LEADSEL_EXPERIMENT_H_
#define LEADSEL_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leadsel/graph.h"
#include "leadsel/noise_corrupted.h"
#include "leadsel/noise_free.h"

namespace leadsel {

inline constexpr int kReportFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;

enum class Formulation { kNoiseCorrupted, kNoiseFree };

enum class Method { kGreedy, kSwap, kCrLower, kDegree, kExhaustive, kMonteCarlo };

std::string_view method_name(Method m);

// Raised for malformed or out-of-range configs; the message names the field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a config cannot be read or a report cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KappaSpec {
  enum class Kind { kUniform, kPerNode, kDegree };
  Kind kind = Kind::kUniform;
  double value = 1.0;
  std::vector<double> values;
};

struct ExperimentConfig {
  GraphSpec graph;
  Formulation formulation = Formulation::kNoiseCorrupted;
  std::optional<KappaSpec> kappa;  // noise-corrupted only; default uniform 1
  std::vector<int> nl_values;
  std::vector<Method> methods;
  IpmOptions ipm;
  AdmmOptions admm;
  SwapOptions swap;
  std::optional<MonteCarloOptions> monte_carlo;
  std::uint64_t exhaustive_budget = 1'000'000;
  std::string output_dir = ".";
  std::string output_prefix = "report";
  int threads = 1;

  bool has(Method m) const;
};

// Whole file as a string. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);

// Parses and validates. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// The "graph" object of a JSON document (an experiment config or a document
// holding only the graph). Throws ConfigError.
GraphSpec parse_graph_spec(std::string_view json_text);

// Checks everything that needs the graph size (N_l range, per-node gains).
void validate_against_graph(const ExperimentConfig& config, int n);

// Gains for a graph with the given Laplacian.
Vector resolve_kappa(const ExperimentConfig& config, const Laplacian& L);

struct MethodTimes {
  double greedy = 0.0;
  double swap = 0.0;
  double cr_lower = 0.0;
  double degree = 0.0;
  double exhaustive = 0.0;
  double monte_carlo = 0.0;
};

// One sweep point. Values of methods that were not run are NaN and their
// leader sets empty.
struct BoundsRow {
  int nl = 0;
  double lower_bound;
  // CR1: J(x*) - 2n/tau. CR2: same as lower_bound.
  double certified_lower_bound;
  double greedy_J;
  double swap_J;
  double degree_J;
  double exhaustive_J;
  double monte_carlo_variance;
  std::vector<int> greedy_leaders;
  std::vector<int> swap_leaders;
  std::vector<int> degree_leaders;
  std::vector<int> exhaustive_leaders;
  int swaps_used = 0;
  bool solver_converged = true;
  int solver_iterations = 0;
  std::vector<std::string> solver_flags;
  MethodTimes wall_time;

  // Best available upper bound: swap, greedy, then exhaustive.
  double upper() const;
  double gap() const { return upper() - lower_bound; }
};

struct BoundsReport {
  Formulation formulation = Formulation::kNoiseCorrupted;
  NetworkGraph graph;
  std::vector<double> kappa;  // empty for noise-free
  std::vector<BoundsRow> rows;

  bool all_converged() const;
  // True when the gap is non-increasing along the sweep (diagnostic only).
  bool gap_non_increasing() const;
};

BoundsReport run_experiment(const ExperimentConfig& config);

// Writes <dir>/<prefix>.csv with header nl,lower,upper,gap and
// <dir>/<prefix>.json with the full rows. Throws std::runtime_error naming
// the path on I/O failure (IoError).
struct EmittedFiles {
  std::filesystem::path csv;
  std::filesystem::path json;
};

EmittedFiles emit_plot_data(const BoundsReport& report,
                            const std::filesystem::path& dir,
                            const std::string& prefix);

// The CSV body alone (numbers with 12 significant digits, "nan" if absent).
std::string format_csv(const BoundsReport& report);

struct CsvRow {
  int nl;
  double lower;
  double upper;
  double gap;
};

std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace leadsel

#endif  // LEADSEL_EXPERIMENT_H_
