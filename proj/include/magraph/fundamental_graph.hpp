#pragma once

// Fundamental graphs of periodic graphs: a finite multigraph whose oriented
// edges carry an integer cell shift (which lattice translate the edge crosses)
// and a magnetic phase. One orientation per unoriented edge is stored; the
// inverse orientation (shift and phase negated) is implicit.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace magraph {

struct VertexRecord {
  std::string id;
  double potential = 0.0;  // electric potential Q at the vertex
};

struct OrientedEdge {
  int from = 0;
  int to = 0;
  std::vector<int> cell_shift;  // length d
  double phase = 0.0;           // radians, kept unreduced
};

// Inverse orientation: endpoints swapped, shift and phase negated.
OrientedEdge inverse(const OrientedEdge& e);

// Edge index from a periodic embedding: to_cell - from_cell, componentwise.
std::vector<int> compute_edge_index(std::span<const int> from_cell,
                                    std::span<const int> to_cell);

// Per-edge endpoint cell offsets of an embedded periodic graph.
struct PeriodicEmbedding {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> endpoint_cells;

  std::vector<std::vector<int>> edge_indices() const;
};

class FundamentalGraph {
 public:
  FundamentalGraph(int dimension, std::vector<VertexRecord> vertices,
                   std::vector<OrientedEdge> edges);

  int dimension() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  const std::vector<VertexRecord>& vertices() const { return vertices_; }

  // Stored orientations only, in input order.
  const std::vector<OrientedEdge>& edges() const { return edges_; }

  // Vertex degree; a loop counts twice.
  int degree(int v) const;
  double potential(int v) const;
  // On-site term of the fiber operator: degree(v) + potential(v).
  double onsite(int v) const;

  int vertex_index(std::string_view id) const;

  // All oriented edges starting at v: stored edges first (input order), then
  // inverses of stored edges ending at v (input order). A loop shows up once
  // in each pass.
  std::vector<OrientedEdge> oriented_edges_from(int v) const;

  // Largest Euclidean norm of a cell shift; 0 for an edgeless graph.
  double max_shift_norm() const;

  // Copy with every phase multiplied by t (coupling-constant scaling).
  FundamentalGraph scaled_phases(double t) const;

 private:
  int dim_;
  std::vector<VertexRecord> vertices_;
  std::vector<OrientedEdge> edges_;
  std::vector<int> degrees_;
  std::unordered_map<std::string, int> index_of_;

  void validate() const;
};

// Graph file format: UTF-8 JSON with fields
//   dimension, vertices: [{id, Q?}], edges: [{from, to, tau, alpha?}]
// Q and alpha default to 0. Exactly one orientation per unoriented edge.
FundamentalGraph parse_graph(const std::string& text);
FundamentalGraph load_graph(std::istream& in);
FundamentalGraph load_graph_file(const std::string& path);
std::string serialize_graph(const FundamentalGraph& g);

}  // namespace magraph
