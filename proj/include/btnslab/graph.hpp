#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace btns {

enum class GraphKind { ring, chain, grid, custom };

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);

using Edge = std::pair<std::size_t, std::size_t>;

/// Graph with per-edge bond dimensions and a uniform physical dimension.
///
/// Ring edges are e_i = (i, i+1 mod L), so the closing edge (L-1, 0) has the
/// largest id. Chain edges are e_i = (i, i+1). Grid vertices are numbered
/// r * cols + c; for every vertex the edge to the right neighbour is created
/// before the edge to the neighbour below.
class NetworkShape {
 public:
  NetworkShape() = default;
  NetworkShape(GraphKind kind, std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::size_t> bond,
               std::size_t phys_dim, std::size_t rows = 0, std::size_t cols = 0);

  [[nodiscard]] GraphKind kind() const { return kind_; }
  [[nodiscard]] std::size_t vertex_count() const { return vertex_count_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::size_t phys_dim() const { return phys_dim_; }
  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_.at(e); }
  [[nodiscard]] const std::vector<std::size_t>& bonds() const { return bond_; }
  [[nodiscard]] std::size_t bond(std::size_t e) const { return bond_.at(e); }
  void set_bond(std::size_t e, std::size_t dim);
  [[nodiscard]] std::size_t max_bond() const;

  /// Incident edge ids of v in ascending order.
  [[nodiscard]] const std::vector<std::size_t>& incident(std::size_t v) const { return incidence_.at(v); }
  [[nodiscard]] std::size_t degree(std::size_t v) const { return incidence_.at(v).size(); }
  [[nodiscard]] std::optional<std::size_t> edge_between(std::size_t u, std::size_t v) const;
  [[nodiscard]] std::size_t other_end(std::size_t e, std::size_t v) const;
  /// Axis of edge e in the map of vertex v (axis 0 is the physical index).
  [[nodiscard]] std::size_t bond_axis(std::size_t v, std::size_t e) const;
  /// Index extents of the local map at v: physical, bonds by edge id, then
  /// the weight index when weight_dim > 0.
  [[nodiscard]] std::vector<std::size_t> map_shape(std::size_t v, std::size_t weight_dim = 0) const;

  [[nodiscard]] bool connected() const;
  bool operator==(const NetworkShape& other) const;

 private:
  GraphKind kind_ = GraphKind::custom;
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> bond_;
  std::size_t phys_dim_ = 1;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<std::size_t>> incidence_;
};

struct GraphSpec {
  GraphKind kind = GraphKind::ring;
  std::size_t L = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t D = 1;
  std::size_t d = 2;
};

NetworkShape build_graph(const GraphSpec& spec);
NetworkShape ring(std::size_t L, std::size_t D, std::size_t d);
NetworkShape chain(std::size_t L, std::size_t D, std::size_t d);
NetworkShape grid(std::size_t rows, std::size_t cols, std::size_t D, std::size_t d);

/// Walk through the graph visiting every vertex at least once.
struct PathCover {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> edge_multiplicity;

  [[nodiscard]] std::size_t max_multiplicity() const;
};

/// Hamiltonian path: the chain itself, the ring without its closing edge, or
/// the boustrophedon walk through a grid.
PathCover snake_path(const NetworkShape& g);

/// True when consecutive vertices are adjacent, every vertex is covered and
/// the multiplicities count the traversals.
bool valid_path(const NetworkShape& g, const PathCover& path);

}  // namespace btns
