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

#include "leadsel/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace leadsel {
namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return key == k; });
    if (!ok) fail(path + "." + key, "unknown field");
  }
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

std::int64_t as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<std::int64_t>();
}

int as_int(const json& v, const std::string& field) {
  const std::int64_t i = as_integer(v, field);
  if (i < std::numeric_limits<int>::min() ||
      i > std::numeric_limits<int>::max()) {
    fail(field, "integer out of range");
  }
  return static_cast<int>(i);
}

std::uint64_t as_seed(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = as_integer(v, field);
  if (i < 0) fail(field, "must be non-negative");
  return static_cast<std::uint64_t>(i);
}

template <typename Fn>
void optional_field(const json& obj, const char* key, const std::string& path,
                    Fn&& fn) {
  if (obj.contains(key)) fn(obj.at(key), path + "." + key);
}

GraphSpec parse_graph(const json& g) {
  const std::string path = "graph";
  if (!g.is_object()) fail(path, "expected an object");
  const json& fam = require(g, "family", path);
  if (!fam.is_string()) fail("graph.family", "expected a string");
  const std::string family = fam.get<std::string>();

  auto positive_n = [&](const std::string& field) {
    const int n = as_int(require(g, "n", path), field);
    if (n < 2) fail(field, "must be >= 2");
    return n;
  };
  auto radius = [&]() {
    const double r = as_number(require(g, "radius", path), "graph.radius");
    if (!(r > 0.0)) fail("graph.radius", "must be > 0");
    return r;
  };

  if (family == "lattice") {
    reject_unknown(g, {"family", "rows", "cols"}, path);
    LatticeSpec s;
    s.rows = as_int(require(g, "rows", path), "graph.rows");
    s.cols = as_int(require(g, "cols", path), "graph.cols");
    if (s.rows < 1) fail("graph.rows", "must be >= 1");
    if (s.cols < 1) fail("graph.cols", "must be >= 1");
    if (static_cast<std::int64_t>(s.rows) * s.cols < 2) {
      fail("graph.rows", "rows * cols must be >= 2");
    }
    return s;
  }
  if (family == "random_geometric" || family == "c_shape") {
    reject_unknown(g, {"family", "n", "radius", "seed"}, path);
    const int n = positive_n("graph.n");
    const double r = radius();
    const std::uint64_t seed = as_seed(require(g, "seed", path), "graph.seed");
    if (family == "c_shape") return CShapeSpec{n, r, seed};
    return GeometricSpec{n, r, seed};
  }
  if (family == "explicit") {
    reject_unknown(g, {"family", "n", "edges", "coords"}, path);
    ExplicitSpec s;
    s.n = positive_n("graph.n");
    const json& edges = require(g, "edges", path);
    if (!edges.is_array()) fail("graph.edges", "expected an array");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string f = "graph.edges[" + std::to_string(k) + "]";
      const json& e = edges[k];
      if (!e.is_array() || e.size() != 2) fail(f, "expected [i, j]");
      const int i = as_int(e[0], f);
      const int j = as_int(e[1], f);
      if (i < 0 || i >= s.n || j < 0 || j >= s.n) {
        fail(f, "node index out of range");
      }
      if (i == j) fail(f, "self-loop");
      s.edges.emplace_back(i, j);
    }
    optional_field(g, "coords", path, [&](const json& c, const std::string& f) {
      if (!c.is_array()) fail(f, "expected an array");
      if (static_cast<int>(c.size()) != s.n) fail(f, "need one point per node");
      for (std::size_t k = 0; k < c.size(); ++k) {
        const std::string fk = f + "[" + std::to_string(k) + "]";
        if (!c[k].is_array() || c[k].size() != 2) fail(fk, "expected [x, y]");
        s.coords.push_back({as_number(c[k][0], fk), as_number(c[k][1], fk)});
      }
    });
    return s;
  }
  fail("graph.family",
       "unknown family '" + family +
           "' (expected lattice, random_geometric, c_shape or explicit)");
}

Method parse_method(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  const std::string s = v.get<std::string>();
  for (Method m : {Method::kGreedy, Method::kSwap, Method::kCrLower,
                   Method::kDegree, Method::kExhaustive, Method::kMonteCarlo}) {
    if (s == method_name(m)) return m;
  }
  fail(field, "unknown method '" + s + "'");
}

KappaSpec parse_kappa(const json& k) {
  if (!k.is_object()) fail("kappa", "expected an object");
  const json& t = require(k, "type", "kappa");
  if (!t.is_string()) fail("kappa.type", "expected a string");
  const std::string type = t.get<std::string>();
  KappaSpec spec;
  if (type == "uniform") {
    reject_unknown(k, {"type", "value"}, "kappa");
    spec.kind = KappaSpec::Kind::kUniform;
    spec.value = as_number(require(k, "value", "kappa"), "kappa.value");
    if (!(spec.value > 0.0)) fail("kappa.value", "must be > 0");
  } else if (type == "per_node") {
    reject_unknown(k, {"type", "values"}, "kappa");
    spec.kind = KappaSpec::Kind::kPerNode;
    const json& vals = require(k, "values", "kappa");
    if (!vals.is_array() || vals.empty()) {
      fail("kappa.values", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string f = "kappa.values[" + std::to_string(i) + "]";
      const double v = as_number(vals[i], f);
      if (!(v > 0.0)) fail(f, "must be > 0");
      spec.values.push_back(v);
    }
  } else if (type == "degree") {
    reject_unknown(k, {"type"}, "kappa");
    spec.kind = KappaSpec::Kind::kDegree;
  } else {
    fail("kappa.type", "unknown type '" + type +
                           "' (expected uniform, per_node or degree)");
  }
  return spec;
}

template <typename Options>
void check_options(const Options& o) {
  try {
    validate(o);
  } catch (const std::invalid_argument& e) {
    // validate() messages already start with the dotted field name.
    throw ConfigError(e.what());
  }
}

IpmOptions parse_ipm(const json& j) {
  const std::string p = "ipm";
  if (!j.is_object()) fail(p, "expected an object");
  reject_unknown(j, {"tau0", "tau_growth", "gap_tol", "newton_tol",
                     "max_newton", "armijo", "backtrack", "boundary_fraction"},
                 p);
  IpmOptions o;
  auto num = [&](const char* key, double& dst) {
    optional_field(j, key, p, [&](const json& v, const std::string& f) {
      dst = as_number(v, f);
    });
  };
  num("tau0", o.tau0);
  num("tau_growth", o.tau_growth);
  num("gap_tol", o.gap_tol);
  num("newton_tol", o.newton_tol);
  optional_field(j, "max_newton", p, [&](const json& v, const std::string& f) {
    o.max_newton = as_int(v, f);
  });
  num("armijo", o.armijo);
  num("backtrack", o.backtrack);
  num("boundary_fraction", o.boundary_fraction);
  check_options(o);
  return o;
}

AdmmOptions parse_admm(const json& j) {
  const std::string p = "admm";
  if (!j.is_object()) fail(p, "expected an object");
  reject_unknown(j, {"rho0", "eps_per_node", "inner_eps", "yy_eps",
                     "max_outer", "max_yy", "max_inner", "balance_ratio",
                     "balance_factor"},
                 p);
  AdmmOptions o;
  auto num = [&](const char* key, double& dst) {
    optional_field(j, key, p, [&](const json& v, const std::string& f) {
      dst = as_number(v, f);
    });
  };
  auto integer = [&](const char* key, int& dst) {
    optional_field(j, key, p, [&](const json& v, const std::string& f) {
      dst = as_int(v, f);
    });
  };
  num("rho0", o.rho0);
  num("eps_per_node", o.eps_per_node);
  num("inner_eps", o.inner_eps);
  num("yy_eps", o.yy_eps);
  integer("max_outer", o.max_outer);
  integer("max_yy", o.max_yy);
  integer("max_inner", o.max_inner);
  num("balance_ratio", o.balance_ratio);
  num("balance_factor", o.balance_factor);
  check_options(o);
  return o;
}

SwapOptions parse_swap(const json& j) {
  if (!j.is_object()) fail("swap", "expected an object");
  reject_unknown(j, {"max_sweeps", "max_swaps"}, "swap");
  SwapOptions o;
  optional_field(j, "max_sweeps", "swap", [&](const json& v,
                                              const std::string& f) {
    o.max_sweeps = as_int(v, f);
    if (o.max_sweeps < 0) fail(f, "must be >= 0 (0 means unbounded)");
  });
  optional_field(j, "max_swaps", "swap", [&](const json& v,
                                             const std::string& f) {
    o.max_swaps = as_int(v, f);
  });
  return o;
}

MonteCarloOptions parse_monte_carlo(const json& j) {
  const std::string p = "monte_carlo";
  if (!j.is_object()) fail(p, "expected an object");
  reject_unknown(j, {"horizon", "dt", "paths", "seed", "burn_in"}, p);
  MonteCarloOptions o;
  optional_field(j, "horizon", p, [&](const json& v, const std::string& f) {
    o.horizon = as_number(v, f);
    if (!(o.horizon > 0.0)) fail(f, "must be > 0");
  });
  optional_field(j, "dt", p, [&](const json& v, const std::string& f) {
    o.dt = as_number(v, f);
    if (!(o.dt > 0.0)) fail(f, "must be > 0");
  });
  optional_field(j, "paths", p, [&](const json& v, const std::string& f) {
    o.paths = as_int(v, f);
    if (o.paths < 1) fail(f, "must be >= 1");
  });
  optional_field(j, "seed", p, [&](const json& v, const std::string& f) {
    o.seed = as_seed(v, f);
  });
  optional_field(j, "burn_in", p, [&](const json& v, const std::string& f) {
    o.burn_in = as_number(v, f);
    if (!(o.burn_in >= 0.0 && o.burn_in < 1.0)) fail(f, "must be in [0, 1)");
  });
  if (!(o.horizon > o.dt)) fail("monte_carlo.horizon", "must exceed dt");
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kGreedy: return "greedy";
    case Method::kSwap: return "swap";
    case Method::kCrLower: return "cr_lower";
    case Method::kDegree: return "degree";
    case Method::kExhaustive: return "exhaustive";
    case Method::kMonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

bool ExperimentConfig::has(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "expected a JSON object");
  reject_unknown(doc, {"format_version", "graph", "formulation", "kappa",
                       "nl_values", "methods", "ipm", "admm", "swap",
                       "monte_carlo", "exhaustive_budget", "output", "threads"},
                 "config");
  ExperimentConfig cfg;
  optional_field(doc, "format_version", "config",
                 [&](const json& v, const std::string&) {
                   if (as_int(v, "format_version") != kConfigFormatVersion) {
                     fail("format_version", "unsupported version");
                   }
                 });
  cfg.graph = parse_graph(require(doc, "graph", "config"));

  const json& form = require(doc, "formulation", "config");
  if (!form.is_string()) fail("formulation", "expected a string");
  const std::string f = form.get<std::string>();
  if (f == "noise_corrupted") {
    cfg.formulation = Formulation::kNoiseCorrupted;
  } else if (f == "noise_free") {
    cfg.formulation = Formulation::kNoiseFree;
  } else {
    fail("formulation", "expected noise_corrupted or noise_free");
  }

  if (doc.contains("kappa")) {
    if (cfg.formulation == Formulation::kNoiseFree) {
      fail("kappa", "gains only apply to the noise_corrupted formulation");
    }
    cfg.kappa = parse_kappa(doc.at("kappa"));
  }

  const json& nl = require(doc, "nl_values", "config");
  if (!nl.is_array() || nl.empty()) fail("nl_values", "expected a nonempty array");
  std::set<int> seen_nl;
  for (std::size_t k = 0; k < nl.size(); ++k) {
    const std::string field = "nl_values[" + std::to_string(k) + "]";
    const int v = as_int(nl[k], field);
    if (v < 1) fail(field, "must be >= 1");
    if (!seen_nl.insert(v).second) fail(field, "duplicate value");
  }
  cfg.nl_values.assign(seen_nl.begin(), seen_nl.end());

  const json& methods = require(doc, "methods", "config");
  if (!methods.is_array() || methods.empty()) {
    fail("methods", "expected a nonempty array");
  }
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const std::string field = "methods[" + std::to_string(k) + "]";
    const Method m = parse_method(methods[k], field);
    if (cfg.has(m)) fail(field, "duplicate method");
    if (m == Method::kMonteCarlo &&
        cfg.formulation == Formulation::kNoiseFree) {
      fail(field, "monte_carlo only applies to the noise_corrupted formulation");
    }
    cfg.methods.push_back(m);
  }

  if (doc.contains("ipm")) cfg.ipm = parse_ipm(doc.at("ipm"));
  if (doc.contains("admm")) cfg.admm = parse_admm(doc.at("admm"));
  if (doc.contains("swap")) cfg.swap = parse_swap(doc.at("swap"));
  if (doc.contains("monte_carlo")) {
    if (cfg.formulation == Formulation::kNoiseFree) {
      fail("monte_carlo", "only applies to the noise_corrupted formulation");
    }
    cfg.monte_carlo = parse_monte_carlo(doc.at("monte_carlo"));
  }
  optional_field(doc, "exhaustive_budget", "config",
                 [&](const json& v, const std::string&) {
                   const std::int64_t b = as_integer(v, "exhaustive_budget");
                   if (b < 1) fail("exhaustive_budget", "must be >= 1");
                   cfg.exhaustive_budget = static_cast<std::uint64_t>(b);
                 });
  optional_field(doc, "output", "config", [&](const json& o,
                                              const std::string&) {
    if (!o.is_object()) fail("output", "expected an object");
    reject_unknown(o, {"dir", "prefix"}, "output");
    optional_field(o, "dir", "output", [&](const json& v, const std::string& p) {
      if (!v.is_string() || v.get<std::string>().empty()) {
        fail(p, "expected a nonempty string");
      }
      cfg.output_dir = v.get<std::string>();
    });
    optional_field(o, "prefix", "output", [&](const json& v,
                                              const std::string& p) {
      if (!v.is_string() || v.get<std::string>().empty()) {
        fail(p, "expected a nonempty string");
      }
      const std::string s = v.get<std::string>();
      if (s.find('/') != std::string::npos) fail(p, "must not contain '/'");
      cfg.output_prefix = s;
    });
  });
  optional_field(doc, "threads", "config", [&](const json& v,
                                               const std::string&) {
    cfg.threads = as_int(v, "threads");
    if (cfg.threads < 1) fail("threads", "must be >= 1");
  });
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return buf.str();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

GraphSpec parse_graph_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "expected a JSON object");
  return parse_graph(require(doc, "graph", "config"));
}

void validate_against_graph(const ExperimentConfig& config, int n) {
  for (std::size_t k = 0; k < config.nl_values.size(); ++k) {
    if (config.nl_values[k] >= n) {
      fail("nl_values", "value " + std::to_string(config.nl_values[k]) +
                            " must be < n = " + std::to_string(n));
    }
  }
  if (config.kappa && config.kappa->kind == KappaSpec::Kind::kPerNode &&
      static_cast<int>(config.kappa->values.size()) != n) {
    fail("kappa.values", "need exactly n = " + std::to_string(n) + " entries");
  }
}

Vector resolve_kappa(const ExperimentConfig& config, const Laplacian& L) {
  const int n = L.size();
  if (!config.kappa) return uniform_gains(n);
  switch (config.kappa->kind) {
    case KappaSpec::Kind::kUniform:
      return uniform_gains(n, config.kappa->value);
    case KappaSpec::Kind::kPerNode:
      return Eigen::Map<const Vector>(config.kappa->values.data(), n);
    case KappaSpec::Kind::kDegree:
      return L.matrix().diagonal();
  }
  return uniform_gains(n);
}

double BoundsRow::upper() const {
  if (!std::isnan(swap_J)) return swap_J;
  if (!std::isnan(greedy_J)) return greedy_J;
  return exhaustive_J;
}

bool BoundsReport::all_converged() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BoundsRow& r) { return r.solver_converged; });
}

bool BoundsReport::gap_non_increasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].gap() > rows[k - 1].gap() + 1e-9) return false;
  }
  return true;
}

BoundsReport run_experiment(const ExperimentConfig& config) {
  using Clock = std::chrono::steady_clock;
  NetworkGraph g = build_graph(config.graph);
  const int n = g.num_nodes();
  validate_against_graph(config, n);
  const Laplacian L(g);
  const bool nc = config.formulation == Formulation::kNoiseCorrupted;
  const Vector kappa = nc ? resolve_kappa(config, L) : Vector();

  BoundsReport report{config.formulation, g, {}, {}};
  if (nc) report.kappa.assign(kappa.data(), kappa.data() + n);

  for (int nl : config.nl_values) {
    BoundsRow row;
    row.nl = nl;
    row.lower_bound = row.certified_lower_bound = kNaN;
    row.greedy_J = row.swap_J = row.degree_J = row.exhaustive_J = kNaN;
    row.monte_carlo_variance = kNaN;
    std::vector<int> mc_leaders;

    if (config.has(Method::kGreedy) || config.has(Method::kSwap)) {
      auto t0 = Clock::now();
      std::vector<int> greedy_leaders;
      if (nc) {
        GreedyResult gr = greedy_select(L, kappa, nl, config.threads);
        row.greedy_J = gr.objective;
        row.greedy_leaders = gr.selection.leaders();
        row.wall_time.greedy = seconds_since(t0);
        if (config.has(Method::kSwap)) {
          t0 = Clock::now();
          SwapOptions so = config.swap;
          so.threads = config.threads;
          SwapResult sr = swap_refine(L, gr.selection, so);
          row.swap_J = sr.objective;
          row.swap_leaders = sr.selection.leaders();
          row.swaps_used = sr.swaps_used;
          row.wall_time.swap = seconds_since(t0);
        }
      } else {
        LeaderSetResult gr = greedy_select_nf(L, nl, config.threads);
        row.greedy_J = gr.objective;
        row.greedy_leaders = gr.leaders;
        row.wall_time.greedy = seconds_since(t0);
        if (config.has(Method::kSwap)) {
          t0 = Clock::now();
          LeaderSetResult sr = swap_refine_nf(
              L, gr.leaders,
              SwapOptionsNF{config.swap.max_sweeps, config.swap.max_swaps});
          row.swap_J = sr.objective;
          row.swap_leaders = sr.leaders;
          row.swaps_used = sr.swaps_used;
          row.wall_time.swap = seconds_since(t0);
        }
      }
    }

    if (config.has(Method::kCrLower)) {
      const auto t0 = Clock::now();
      if (nc) {
        const RelaxationSolutionNC s = cr1_lower_bound(L, kappa, nl, config.ipm);
        row.lower_bound = s.lower_bound;
        row.certified_lower_bound = s.certified_lower_bound;
        row.solver_converged = s.converged;
        row.solver_iterations = s.newton_iters;
        if (!s.converged) {
          row.solver_flags.push_back("barrier centering hit max_newton");
        }
      } else {
        const RelaxationSolutionNF s = cr2_solve(L, nl, config.admm);
        row.lower_bound = s.lower_bound;
        row.certified_lower_bound = s.lower_bound;
        row.solver_converged = s.converged;
        row.solver_iterations = s.iterations;
        row.solver_flags = s.flags;
      }
      row.wall_time.cr_lower = seconds_since(t0);
    }

    if (config.has(Method::kDegree)) {
      const auto t0 = Clock::now();
      const Vector gains = nc ? kappa : uniform_gains(n);
      const LeaderSelection sel = degree_heuristic(L, nl, gains);
      row.degree_leaders = sel.leaders();
      row.degree_J = nc ? evaluate_J(L, sel) : evaluate_Jf(L, sel.leaders());
      row.wall_time.degree = seconds_since(t0);
    }

    if (config.has(Method::kExhaustive)) {
      const auto t0 = Clock::now();
      if (binomial_capped(n, nl, config.exhaustive_budget) >
          config.exhaustive_budget) {
        row.solver_flags.push_back(
            "exhaustive skipped: C(n, N_l) exceeds exhaustive_budget");
      } else if (nc) {
        const ExhaustiveResult e =
            exhaustive_search(L, kappa, nl, config.exhaustive_budget);
        row.exhaustive_J = e.objective;
        row.exhaustive_leaders = e.selection.leaders();
      } else {
        const LeaderSetResult e =
            exhaustive_search_nf(L, nl, config.exhaustive_budget);
        row.exhaustive_J = e.objective;
        row.exhaustive_leaders = e.leaders;
      }
      row.wall_time.exhaustive = seconds_since(t0);
    }

    if (config.has(Method::kMonteCarlo)) {
      const auto t0 = Clock::now();
      for (const auto* set : {&row.swap_leaders, &row.greedy_leaders,
                              &row.exhaustive_leaders, &row.degree_leaders}) {
        if (!set->empty()) {
          mc_leaders = *set;
          break;
        }
      }
      if (mc_leaders.empty()) {
        mc_leaders = greedy_select(L, kappa, nl, config.threads)
                         .selection.leaders();
      }
      const MonteCarloEstimate est = monte_carlo_variance(
          L, LeaderSelection(n, mc_leaders, kappa),
          config.monte_carlo.value_or(MonteCarloOptions{}));
      row.monte_carlo_variance = est.total_variance;
      row.wall_time.monte_carlo = seconds_since(t0);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string format_csv(const BoundsReport& report) {
  std::string out = "nl,lower,upper,gap\n";
  for (const BoundsRow& r : report.rows) {
    out += std::to_string(r.nl) + "," + format_number(r.lower_bound) + "," +
           format_number(r.upper()) + "," + format_number(r.gap()) + "\n";
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "nl,lower,upper,gap") {
    throw std::invalid_argument("parse_csv: missing header nl,lower,upper,gap");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) {
        throw std::invalid_argument("parse_csv: short row '" + line + "'");
      }
    }
    auto num = [&](const std::string& s) {
      if (s == "nan") return kNaN;
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) {
        throw std::invalid_argument("parse_csv: bad number '" + s + "'");
      }
      return v;
    };
    rows.push_back(CsvRow{std::stoi(cell[0]), num(cell[1]), num(cell[2]),
                          num(cell[3])});
  }
  return rows;
}

EmittedFiles emit_plot_data(const BoundsReport& report,
                            const std::filesystem::path& dir,
                            const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" +
                             dir.string() + "': " + ec.message());
  }
  EmittedFiles files{dir / (prefix + ".csv"), dir / (prefix + ".json")};

  auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "'");
    out << body;
    out.flush();
    if (!out) throw IoError("write failed for '" + p.string() + "'");
  };
  write(files.csv, format_csv(report));

  json doc;
  doc["format_version"] = kReportFormatVersion;
  doc["formulation"] = report.formulation == Formulation::kNoiseCorrupted
                           ? "noise_corrupted"
                           : "noise_free";
  doc["graph"] = json::parse(graph_to_json(report.graph));
  doc["kappa"] = report.kappa;
  doc["gap_non_increasing"] = report.gap_non_increasing();
  json rows = json::array();
  for (const BoundsRow& r : report.rows) {
    json j;
    j["nl"] = r.nl;
    j["lower_bound"] = number_or_null(r.lower_bound);
    j["certified_lower_bound"] = number_or_null(r.certified_lower_bound);
    j["greedy_J"] = number_or_null(r.greedy_J);
    j["swap_J"] = number_or_null(r.swap_J);
    j["degree_J"] = number_or_null(r.degree_J);
    j["exhaustive_J"] = number_or_null(r.exhaustive_J);
    j["monte_carlo_variance"] = number_or_null(r.monte_carlo_variance);
    j["upper"] = number_or_null(r.upper());
    j["gap"] = number_or_null(r.gap());
    j["greedy_leaders"] = r.greedy_leaders;
    j["swap_leaders"] = r.swap_leaders;
    j["degree_leaders"] = r.degree_leaders;
    j["exhaustive_leaders"] = r.exhaustive_leaders;
    j["swaps_used"] = r.swaps_used;
    j["solver_converged"] = r.solver_converged;
    j["solver_iterations"] = r.solver_iterations;
    j["solver_flags"] = r.solver_flags;
    j["wall_time"] = {{"greedy", r.wall_time.greedy},
                      {"swap", r.wall_time.swap},
                      {"cr_lower", r.wall_time.cr_lower},
                      {"degree", r.wall_time.degree},
                      {"exhaustive", r.wall_time.exhaustive},
                      {"monte_carlo", r.wall_time.monte_carlo}};
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  write(files.json, doc.dump(2) + "\n");
  return files;
}

}  // namespace leadsel
