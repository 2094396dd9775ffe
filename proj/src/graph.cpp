#include "btnslab/graph.hpp"

#include "btnslab/errors.hpp"

#include <algorithm>
#include <set>

namespace btns {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::ring:
      return "ring";
    case GraphKind::chain:
      return "chain";
    case GraphKind::grid:
      return "grid";
    case GraphKind::custom:
      return "custom";
  }
  return "custom";
}

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "ring") return GraphKind::ring;
  if (name == "chain") return GraphKind::chain;
  if (name == "grid") return GraphKind::grid;
  if (name == "custom") return GraphKind::custom;
  throw ArgumentError("unknown graph kind '" + name + "'");
}

NetworkShape::NetworkShape(GraphKind kind, std::size_t vertex_count, std::vector<Edge> edges,
                           std::vector<std::size_t> bond, std::size_t phys_dim, std::size_t rows, std::size_t cols)
    : kind_(kind),
      vertex_count_(vertex_count),
      edges_(std::move(edges)),
      bond_(std::move(bond)),
      phys_dim_(phys_dim),
      rows_(rows),
      cols_(cols) {
  if (vertex_count_ == 0) throw ArgumentError("graph needs at least one vertex");
  if (phys_dim_ == 0) throw ArgumentError("physical dimension must be positive");
  if (bond_.size() != edges_.size()) throw ArgumentError("one bond dimension per edge is required");
  std::set<Edge> seen;
  incidence_.assign(vertex_count_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto [u, v] = edges_[e];
    if (u >= vertex_count_ || v >= vertex_count_) throw ArgumentError("edge endpoint out of range");
    if (u == v) throw ArgumentError("self-loops are not allowed");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw ArgumentError("duplicate edge");
    if (bond_[e] == 0) throw ArgumentError("bond dimensions must be positive");
    incidence_[u].push_back(e);
    incidence_[v].push_back(e);
  }
}

void NetworkShape::set_bond(std::size_t e, std::size_t dim) {
  if (dim == 0) throw ArgumentError("bond dimensions must be positive");
  bond_.at(e) = dim;
}

std::size_t NetworkShape::max_bond() const {
  std::size_t m = 0;
  for (auto b : bond_) m = std::max(m, b);
  return m;
}

std::optional<std::size_t> NetworkShape::edge_between(std::size_t u, std::size_t v) const {
  for (auto e : incidence_.at(u)) {
    if (other_end(e, u) == v) return e;
  }
  return std::nullopt;
}

std::size_t NetworkShape::other_end(std::size_t e, std::size_t v) const {
  const auto& [a, b] = edges_.at(e);
  if (a == v) return b;
  if (b == v) return a;
  throw ArgumentError("vertex is not an endpoint of the edge");
}

std::size_t NetworkShape::bond_axis(std::size_t v, std::size_t e) const {
  const auto& inc = incidence_.at(v);
  auto it = std::find(inc.begin(), inc.end(), e);
  if (it == inc.end()) throw ArgumentError("edge is not incident to the vertex");
  return 1 + static_cast<std::size_t>(it - inc.begin());
}

std::vector<std::size_t> NetworkShape::map_shape(std::size_t v, std::size_t weight_dim) const {
  std::vector<std::size_t> s{phys_dim_};
  for (auto e : incidence_.at(v)) s.push_back(bond_[e]);
  if (weight_dim > 0) s.push_back(weight_dim);
  return s;
}

bool NetworkShape::connected() const {
  std::vector<bool> seen(vertex_count_, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto e : incidence_[v]) {
      auto w = other_end(e, v);
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == vertex_count_;
}

bool NetworkShape::operator==(const NetworkShape& other) const {
  return kind_ == other.kind_ && vertex_count_ == other.vertex_count_ && edges_ == other.edges_ &&
         bond_ == other.bond_ && phys_dim_ == other.phys_dim_ && rows_ == other.rows_ && cols_ == other.cols_;
}

NetworkShape ring(std::size_t L, std::size_t D, std::size_t d) {
  if (L < 3) throw ArgumentError("a ring needs at least 3 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < L; ++i) edges.emplace_back(i, (i + 1) % L);
  return NetworkShape(GraphKind::ring, L, std::move(edges), std::vector<std::size_t>(L, D), d);
}

NetworkShape chain(std::size_t L, std::size_t D, std::size_t d) {
  if (L < 2) throw ArgumentError("a chain needs at least 2 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < L; ++i) edges.emplace_back(i, i + 1);
  return NetworkShape(GraphKind::chain, L, std::move(edges), std::vector<std::size_t>(L - 1, D), d);
}

NetworkShape grid(std::size_t rows, std::size_t cols, std::size_t D, std::size_t d) {
  if (rows < 2 || cols < 2) throw ArgumentError("grid sides must be at least 2");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  const std::size_t n = edges.size();
  return NetworkShape(GraphKind::grid, rows * cols, std::move(edges), std::vector<std::size_t>(n, D), d, rows, cols);
}

NetworkShape build_graph(const GraphSpec& spec) {
  if (spec.D == 0 || spec.d == 0) throw ArgumentError("D and d must be positive");
  switch (spec.kind) {
    case GraphKind::ring:
      return ring(spec.L, spec.D, spec.d);
    case GraphKind::chain:
      return chain(spec.L, spec.D, spec.d);
    case GraphKind::grid:
      return grid(spec.rows, spec.cols, spec.D, spec.d);
    case GraphKind::custom:
      break;
  }
  throw ArgumentError("custom graphs have no builder");
}

std::size_t PathCover::max_multiplicity() const {
  std::size_t m = 0;
  for (auto x : edge_multiplicity) m = std::max(m, x);
  return m;
}

PathCover snake_path(const NetworkShape& g) {
  PathCover p;
  const std::size_t L = g.vertex_count();
  switch (g.kind()) {
    case GraphKind::ring:
    case GraphKind::chain:
      for (std::size_t v = 0; v < L; ++v) p.vertices.push_back(v);
      break;
    case GraphKind::grid:
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t k = 0; k < g.cols(); ++k) {
          const std::size_t c = r % 2 == 0 ? k : g.cols() - 1 - k;
          p.vertices.push_back(r * g.cols() + c);
        }
      }
      break;
    case GraphKind::custom:
      throw UnsupportedError("no covering path for custom graphs");
  }
  p.edge_multiplicity.assign(g.edge_count(), 0);
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    auto e = g.edge_between(p.vertices[i], p.vertices[i + 1]);
    if (!e) throw NumericError("snake path stepped across a non-edge");
    ++p.edge_multiplicity[*e];
  }
  return p;
}

bool valid_path(const NetworkShape& g, const PathCover& path) {
  if (path.edge_multiplicity.size() != g.edge_count()) return false;
  std::vector<bool> covered(g.vertex_count(), false);
  std::vector<std::size_t> mult(g.edge_count(), 0);
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (path.vertices[i] >= g.vertex_count()) return false;
    covered[path.vertices[i]] = true;
    if (i + 1 < path.vertices.size()) {
      auto e = g.edge_between(path.vertices[i], path.vertices[i + 1]);
      if (!e) return false;
      ++mult[*e];
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }) && mult == path.edge_multiplicity;
}

}  // namespace btns
