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

// leadsel: command-line harness for leader-selection experiments.
//
//   leadsel run --config exp.json [--out DIR] [--threads K]
//   leadsel graph --config exp.json [--out graph.json]
//   leadsel validate --config exp.json
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence, 4 I/O.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "leadsel/experiment.h"
#include "leadsel/graph.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

int run(const std::string& config_path, const std::string& out_dir,
        int threads) {
  leadsel::ExperimentConfig cfg = leadsel::load_config(config_path);
  if (threads > 0) cfg.threads = threads;
  const leadsel::BoundsReport report = leadsel::run_experiment(cfg);
  const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : out_dir;
  const leadsel::EmittedFiles files =
      leadsel::emit_plot_data(report, dir, cfg.output_prefix);
  std::cout << leadsel::format_csv(report);
  std::cerr << "wrote " << files.csv.string() << " and " << files.json.string()
            << "\n";
  if (!report.all_converged()) {
    for (const auto& row : report.rows) {
      for (const auto& flag : row.solver_flags) {
        std::cerr << "N_l=" << row.nl << ": " << flag << "\n";
      }
    }
    std::cerr << "error: a relaxation solver did not converge\n";
    return kExitSolver;
  }
  return kExitOk;
}

int graph(const std::string& config_path, const std::string& out_path) {
  const std::string text = leadsel::read_text_file(config_path);
  const leadsel::NetworkGraph g =
      leadsel::build_graph(leadsel::parse_graph_spec(text));
  const std::string body = leadsel::graph_to_json(g) + "\n";
  if (out_path.empty()) {
    std::cout << body;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw leadsel::IoError("cannot open '" + out_path + "'");
  out << body;
  if (!out.flush()) throw leadsel::IoError("write failed for '" + out_path + "'");
  return kExitOk;
}

int validate(const std::string& config_path) {
  const leadsel::ExperimentConfig cfg = leadsel::load_config(config_path);
  const leadsel::NetworkGraph g = leadsel::build_graph(cfg.graph);
  leadsel::validate_against_graph(cfg, g.num_nodes());
  std::cout << "ok: n=" << g.num_nodes() << ", " << cfg.nl_values.size()
            << " N_l value(s), " << cfg.methods.size() << " method(s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leader selection bounds for consensus networks"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int threads = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment sweep");
  run_cmd->add_option("--config", config, "Experiment config (JSON)")
      ->required();
  run_cmd->add_option("--out", out, "Output directory (overrides output.dir)");
  run_cmd->add_option("--threads", threads,
                      "Threads for parallel candidate scans")
      ->check(CLI::PositiveNumber);

  CLI::App* graph_cmd =
      app.add_subcommand("graph", "Emit the graph of a config as JSON");
  graph_cmd->add_option("--config", config, "Config holding a graph object")
      ->required();
  graph_cmd->add_option("--out", out, "Output file (default: stdout)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("--config", config, "Experiment config (JSON)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return run(config, out, threads);
    if (*graph_cmd) return graph(config, out);
    return validate(config);
  } catch (const leadsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const leadsel::DisconnectedGraphError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const leadsel::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const leadsel::NumericalError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
