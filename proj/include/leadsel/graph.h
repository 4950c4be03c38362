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

// Graph families, Laplacians and the matrices derived from them.

#ifndef LEADSEL_GRAPH_H_
#define LEADSEL_GRAPH_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "leadsel/common.h"

namespace leadsel {

using Edge = std::pair<int, int>;
using Point = std::array<double, 2>;

// Connected undirected simple graph, optionally embedded in the unit square.
// Edges are stored normalized (first < second) and sorted.
class NetworkGraph {
 public:
  // Validates: node indices in range, no self-loops, no duplicate edges,
  // connectivity, and coords either empty or one per node.
  NetworkGraph(int num_nodes, std::vector<Edge> edges,
               std::vector<Point> coords = {});

  int num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Point>& coords() const { return coords_; }
  bool has_coords() const { return !coords_.empty(); }
  std::vector<int> degrees() const;

  friend bool operator==(const NetworkGraph&, const NetworkGraph&) = default;

 private:
  int num_nodes_;
  std::vector<Edge> edges_;
  std::vector<Point> coords_;
};

// True when the undirected graph on `num_nodes` vertices is connected.
bool is_connected(int num_nodes, const std::vector<Edge>& edges);

struct LatticeSpec {
  int rows = 0;
  int cols = 0;
};

struct GeometricSpec {
  int n = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
};

struct CShapeSpec {
  int n = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
};

struct ExplicitSpec {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<Point> coords;
};

using GraphSpec = std::variant<LatticeSpec, GeometricSpec, CShapeSpec,
                               ExplicitSpec>;

// Whole point sets are redrawn at most this many times when a geometric
// sample comes out disconnected.
inline constexpr int kMaxGeometricRetries = 1000;

// 4-neighbour grid; node (r, c) has index r * cols + c.
NetworkGraph build_lattice(int rows, int cols);

// n i.i.d. uniform points in the unit square, edge iff distance <= radius.
// Throws DisconnectedGraphError after kMaxGeometricRetries failed draws.
NetworkGraph build_random_geometric(int n, double radius, std::uint64_t seed);

// The C-shaped region: the unit square minus the notch
// (0.25, 1] x (0.25, 0.75) that opens on the right edge.
bool in_c_region(const Point& p);
NetworkGraph build_c_shape(int n, double radius, std::uint64_t seed);

NetworkGraph build_graph(const GraphSpec& spec);

// Graph <-> JSON document {format_version, n, edges: [[i,j],...],
// coords: [[x,y],...]} with 0-based indices.
std::string graph_to_json(const NetworkGraph& g);
NetworkGraph graph_from_json(std::string_view text);

// L = D - A of a connected graph.
class Laplacian {
 public:
  explicit Laplacian(const NetworkGraph& g);

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  double degree(int i) const { return matrix_(i, i); }

 private:
  Matrix matrix_;
};

inline Laplacian laplacian(const NetworkGraph& g) { return Laplacian(g); }

// L^+ = (L + 11^T/n)^{-1} - 11^T/n. Throws DisconnectedGraphError when the
// shifted matrix is singular.
Matrix pseudo_inverse(const Laplacian& L);

// Rows and columns in `removed` deleted (remaining nodes keep ascending
// order). `removed` must be nonempty and not cover every node.
Matrix principal_submatrix(const Laplacian& L, const std::vector<int>& removed);

// Restriction of a square matrix to the index list `keep` (in that order).
Matrix restrict_to(const Matrix& m, const std::vector<int>& keep);

// Complement of `subset` in {0, ..., n-1}, ascending.
std::vector<int> complement(int n, const std::vector<int>& subset);

}  // namespace leadsel

#endif  // LEADSEL_GRAPH_H_
