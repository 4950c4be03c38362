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

#include "leadsel/graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace leadsel {
namespace {

using nlohmann::json;

constexpr int kGraphFormatVersion = 1;

std::vector<Point> sample_points(int n, Rng& rng, bool c_region) {
  std::vector<Point> points;
  points.reserve(n);
  while (static_cast<int>(points.size()) < n) {
    Point p{rng.uniform(), rng.uniform()};
    if (c_region && !in_c_region(p)) continue;
    points.push_back(p);
  }
  return points;
}

std::vector<Edge> disk_edges(const std::vector<Point>& points, double radius) {
  std::vector<Edge> edges;
  const double r2 = radius * radius;
  const int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = points[i][0] - points[j][0];
      const double dy = points[i][1] - points[j][1];
      if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
    }
  }
  return edges;
}

NetworkGraph sample_geometric(int n, double radius, std::uint64_t seed,
                              bool c_region) {
  if (n < 2) throw std::invalid_argument("geometric graph: n must be >= 2");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("geometric graph: radius must be positive");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxGeometricRetries; ++attempt) {
    std::vector<Point> points = sample_points(n, rng, c_region);
    std::vector<Edge> edges = disk_edges(points, radius);
    if (is_connected(n, edges)) {
      return NetworkGraph(n, std::move(edges), std::move(points));
    }
  }
  std::ostringstream msg;
  msg << "no connected sample after " << kMaxGeometricRetries
      << " draws (n=" << n << ", radius=" << radius
      << "): likely disconnected regime";
  throw DisconnectedGraphError(msg.str());
}

}  // namespace

NetworkGraph::NetworkGraph(int num_nodes, std::vector<Edge> edges,
                           std::vector<Point> coords)
    : num_nodes_(num_nodes), edges_(std::move(edges)),
      coords_(std::move(coords)) {
  if (num_nodes_ < 2) throw std::invalid_argument("graph needs >= 2 nodes");
  for (Edge& e : edges_) {
    if (e.first < 0 || e.second < 0 || e.first >= num_nodes_ ||
        e.second >= num_nodes_) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.first == e.second) throw std::invalid_argument("self-loop");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate edge");
  }
  if (!coords_.empty() && static_cast<int>(coords_.size()) != num_nodes_) {
    throw std::invalid_argument("coords must have one entry per node");
  }
  if (!is_connected(num_nodes_, edges_)) {
    throw DisconnectedGraphError("graph is not connected");
  }
}

std::vector<int> NetworkGraph::degrees() const {
  std::vector<int> deg(num_nodes_, 0);
  for (const auto& [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool is_connected(int num_nodes, const std::vector<Edge>& edges) {
  if (num_nodes <= 0) return false;
  std::vector<std::vector<int>> adj(num_nodes);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(num_nodes, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == num_nodes;
}

NetworkGraph build_lattice(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw std::invalid_argument("lattice needs rows, cols >= 1 and rows*cols >= 2");
  }
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int u = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(u, u + 1);
      if (r + 1 < rows) edges.emplace_back(u, u + cols);
    }
  }
  return NetworkGraph(rows * cols, std::move(edges));
}

NetworkGraph build_random_geometric(int n, double radius, std::uint64_t seed) {
  return sample_geometric(n, radius, seed, /*c_region=*/false);
}

bool in_c_region(const Point& p) {
  const bool in_square =
      p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0;
  const bool in_notch = p[0] > 0.25 && p[1] > 0.25 && p[1] < 0.75;
  return in_square && !in_notch;
}

NetworkGraph build_c_shape(int n, double radius, std::uint64_t seed) {
  return sample_geometric(n, radius, seed, /*c_region=*/true);
}

NetworkGraph build_graph(const GraphSpec& spec) {
  struct Builder {
    NetworkGraph operator()(const LatticeSpec& s) const {
      return build_lattice(s.rows, s.cols);
    }
    NetworkGraph operator()(const GeometricSpec& s) const {
      return build_random_geometric(s.n, s.radius, s.seed);
    }
    NetworkGraph operator()(const CShapeSpec& s) const {
      return build_c_shape(s.n, s.radius, s.seed);
    }
    NetworkGraph operator()(const ExplicitSpec& s) const {
      return NetworkGraph(s.n, s.edges, s.coords);
    }
  };
  return std::visit(Builder{}, spec);
}

std::string graph_to_json(const NetworkGraph& g) {
  json doc;
  doc["format_version"] = kGraphFormatVersion;
  doc["n"] = g.num_nodes();
  json edges = json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
  doc["edges"] = std::move(edges);
  json coords = json::array();
  for (const Point& p : g.coords()) coords.push_back({p[0], p[1]});
  doc["coords"] = std::move(coords);
  return doc.dump(2);
}

NetworkGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
    if (doc.contains("format_version") &&
        doc.at("format_version").get<int>() != kGraphFormatVersion) {
      throw std::invalid_argument("unsupported graph format_version");
    }
    const int n = doc.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    std::vector<Point> coords;
    if (doc.contains("coords")) {
      for (const auto& c : doc.at("coords")) {
        coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      }
    }
    return NetworkGraph(n, std::move(edges), std::move(coords));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed graph JSON: ") +
                                e.what());
  }
}

Laplacian::Laplacian(const NetworkGraph& g)
    : matrix_(Matrix::Zero(g.num_nodes(), g.num_nodes())) {
  for (const auto& [i, j] : g.edges()) {
    matrix_(i, j) = -1.0;
    matrix_(j, i) = -1.0;
    matrix_(i, i) += 1.0;
    matrix_(j, j) += 1.0;
  }
}

Matrix pseudo_inverse(const Laplacian& L) {
  const int n = L.size();
  const Matrix shift = Matrix::Constant(n, n, 1.0 / n);
  Eigen::LLT<Matrix> llt(L.matrix() + shift);
  if (llt.info() != Eigen::Success) {
    throw DisconnectedGraphError(
        "L + 11^T/n is singular: the graph is disconnected");
  }
  Matrix inv = llt.solve(Matrix::Identity(n, n));
  inv -= shift;
  return 0.5 * (inv + inv.transpose());
}

Matrix restrict_to(const Matrix& m, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  Matrix out(k, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < k; ++r) out(r, c) = m(keep[r], keep[c]);
  }
  return out;
}

std::vector<int> complement(int n, const std::vector<int>& subset) {
  std::vector<char> in(n, 0);
  for (int i : subset) {
    if (i < 0 || i >= n) throw std::invalid_argument("node index out of range");
    in[i] = 1;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!in[i]) out.push_back(i);
  }
  return out;
}

Matrix principal_submatrix(const Laplacian& L,
                           const std::vector<int>& removed) {
  const std::vector<int> keep = complement(L.size(), removed);
  if (removed.empty()) {
    throw std::invalid_argument("principal_submatrix: removal set is empty");
  }
  if (keep.empty()) {
    throw std::invalid_argument("principal_submatrix: cannot remove every node");
  }
  return restrict_to(L.matrix(), keep);
}

}  // namespace leadsel
