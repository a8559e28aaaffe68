#include "magraph/fundamental_graph.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>

#include "json.hpp"
#include "magraph/errors.hpp"

namespace magraph {

OrientedEdge inverse(const OrientedEdge& e) {
  OrientedEdge inv;
  inv.from = e.to;
  inv.to = e.from;
  inv.cell_shift.reserve(e.cell_shift.size());
  for (int c : e.cell_shift) inv.cell_shift.push_back(-c);
  inv.phase = -e.phase;
  return inv;
}

std::vector<int> compute_edge_index(std::span<const int> from_cell,
                                    std::span<const int> to_cell) {
  if (from_cell.size() != to_cell.size())
    throw ValidationError("cell offsets have different lengths (" +
                          std::to_string(from_cell.size()) + " vs " +
                          std::to_string(to_cell.size()) + ")");
  std::vector<int> idx(from_cell.size());
  for (size_t s = 0; s < idx.size(); ++s) idx[s] = to_cell[s] - from_cell[s];
  return idx;
}

std::vector<std::vector<int>> PeriodicEmbedding::edge_indices() const {
  std::vector<std::vector<int>> out;
  out.reserve(endpoint_cells.size());
  for (const auto& [u, v] : endpoint_cells) out.push_back(compute_edge_index(u, v));
  return out;
}

FundamentalGraph::FundamentalGraph(int dimension, std::vector<VertexRecord> vertices,
                                   std::vector<OrientedEdge> edges)
    : dim_(dimension), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  validate();
  for (int v = 0; v < num_vertices(); ++v)
    index_of_.emplace(vertices_[v].id, v);
  degrees_.assign(vertices_.size(), 0);
  for (const auto& e : edges_) {
    ++degrees_[e.from];
    ++degrees_[e.to];  // a loop hits both counts, so it contributes 2
  }
}

void FundamentalGraph::validate() const {
  if (dim_ < 1) throw ValidationError("dimension must be a positive integer");
  if (vertices_.empty()) throw ValidationError("graph needs at least one vertex");

  std::unordered_map<std::string, int> seen;
  for (size_t v = 0; v < vertices_.size(); ++v) {
    const auto& rec = vertices_[v];
    if (!seen.emplace(rec.id, static_cast<int>(v)).second)
      throw ValidationError("vertex '" + rec.id + "': duplicate id");
    if (!std::isfinite(rec.potential))
      throw ValidationError("vertex '" + rec.id + "': Q is not finite");
  }

  const int nu = static_cast<int>(vertices_.size());
  for (size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const std::string where = "edge " + std::to_string(i);
    if (e.from < 0 || e.from >= nu || e.to < 0 || e.to >= nu)
      throw ValidationError(where + ": endpoint index out of range");
    if (static_cast<int>(e.cell_shift.size()) != dim_)
      throw ValidationError(where + " (" + vertices_[e.from].id + " -> " +
                            vertices_[e.to].id + "): tau has " +
                            std::to_string(e.cell_shift.size()) +
                            " components, expected " + std::to_string(dim_));
    if (!std::isfinite(e.phase))
      throw ValidationError(where + " (" + vertices_[e.from].id + " -> " +
                            vertices_[e.to].id + "): alpha is not finite");
  }

  // Connectivity of the quotient, with loops and multiplicities collapsed.
  // Connectivity of the periodic cover is not decidable from this data alone;
  // that gap is documented rather than checked.
  std::vector<std::vector<int>> adj(vertices_.size());
  for (const auto& e : edges_) {
    if (e.from != e.to) {
      adj[e.from].push_back(e.to);
      adj[e.to].push_back(e.from);
    }
  }
  std::vector<char> reached(vertices_.size(), 0);
  std::queue<int> todo;
  todo.push(0);
  reached[0] = 1;
  while (!todo.empty()) {
    int v = todo.front();
    todo.pop();
    for (int w : adj[v])
      if (!reached[w]) {
        reached[w] = 1;
        todo.push(w);
      }
  }
  for (size_t v = 0; v < vertices_.size(); ++v)
    if (!reached[v])
      throw ValidationError("graph is not connected: vertex '" + vertices_[v].id +
                            "' is unreachable from '" + vertices_[0].id + "'");
}

int FundamentalGraph::degree(int v) const {
  if (v < 0 || v >= num_vertices())
    throw ValidationError("vertex index " + std::to_string(v) + " out of range");
  return degrees_[v];
}

double FundamentalGraph::potential(int v) const {
  if (v < 0 || v >= num_vertices())
    throw ValidationError("vertex index " + std::to_string(v) + " out of range");
  return vertices_[v].potential;
}

double FundamentalGraph::onsite(int v) const { return degree(v) + potential(v); }

int FundamentalGraph::vertex_index(std::string_view id) const {
  auto it = index_of_.find(std::string(id));
  if (it == index_of_.end())
    throw ValidationError("unknown vertex id '" + std::string(id) + "'");
  return it->second;
}

std::vector<OrientedEdge> FundamentalGraph::oriented_edges_from(int v) const {
  if (v < 0 || v >= num_vertices())
    throw ValidationError("vertex index " + std::to_string(v) + " out of range");
  std::vector<OrientedEdge> out;
  for (const auto& e : edges_)
    if (e.from == v) out.push_back(e);
  for (const auto& e : edges_)
    if (e.to == v) out.push_back(inverse(e));
  return out;
}

double FundamentalGraph::max_shift_norm() const {
  double best = 0.0;
  for (const auto& e : edges_) {
    double s = 0.0;
    for (int c : e.cell_shift) s += static_cast<double>(c) * c;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

FundamentalGraph FundamentalGraph::scaled_phases(double t) const {
  std::vector<OrientedEdge> scaled = edges_;
  for (auto& e : scaled) e.phase *= t;
  return FundamentalGraph(dim_, vertices_, std::move(scaled));
}

namespace {

using nlohmann::ordered_json;

double number_field(const ordered_json& obj, const char* key, double fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& j = obj.at(key);
  if (!j.is_number())
    throw ParseError(where + ": '" + key + "' must be a number");
  return j.get<double>();
}

}  // namespace

FundamentalGraph parse_graph(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("graph file: top level must be an object");
  if (!root.contains("dimension") || !root.at("dimension").is_number_integer())
    throw ParseError("graph file: 'dimension' must be an integer");
  const int dim = root.at("dimension").get<int>();
  if (dim < 1) throw ParseError("graph file: 'dimension' must be positive");

  if (!root.contains("vertices") || !root.at("vertices").is_array())
    throw ParseError("graph file: 'vertices' must be an array");

  std::vector<VertexRecord> vertices;
  std::unordered_map<std::string, int> index_of;
  for (size_t i = 0; i < root.at("vertices").size(); ++i) {
    const auto& jv = root.at("vertices")[i];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!jv.is_object() || !jv.contains("id") || !jv.at("id").is_string())
      throw ParseError(where + ": needs a string 'id'");
    VertexRecord rec;
    rec.id = jv.at("id").get<std::string>();
    rec.potential = number_field(jv, "Q", 0.0, where);
    if (!index_of.emplace(rec.id, static_cast<int>(vertices.size())).second)
      throw ParseError(where + ": duplicate vertex id '" + rec.id + "'");
    vertices.push_back(std::move(rec));
  }

  std::vector<OrientedEdge> edges;
  if (root.contains("edges")) {
    if (!root.at("edges").is_array())
      throw ParseError("graph file: 'edges' must be an array");
    for (size_t i = 0; i < root.at("edges").size(); ++i) {
      const auto& je = root.at("edges")[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!je.is_object()) throw ParseError(where + ": must be an object");
      for (const char* key : {"from", "to"})
        if (!je.contains(key) || !je.at(key).is_string())
          throw ParseError(where + ": needs a string '" + std::string(key) + "'");
      OrientedEdge e;
      const std::string from = je.at("from").get<std::string>();
      const std::string to = je.at("to").get<std::string>();
      auto fit = index_of.find(from);
      if (fit == index_of.end())
        throw ParseError(where + ": unknown vertex id '" + from + "'");
      auto tit = index_of.find(to);
      if (tit == index_of.end())
        throw ParseError(where + ": unknown vertex id '" + to + "'");
      e.from = fit->second;
      e.to = tit->second;
      if (!je.contains("tau") || !je.at("tau").is_array())
        throw ParseError(where + ": needs an integer array 'tau'");
      for (const auto& c : je.at("tau")) {
        if (!c.is_number_integer())
          throw ParseError(where + ": tau components must be integers");
        e.cell_shift.push_back(c.get<int>());
      }
      if (static_cast<int>(e.cell_shift.size()) != dim)
        throw ParseError(where + ": dimension mismatch, tau has " +
                         std::to_string(e.cell_shift.size()) +
                         " components but dimension is " + std::to_string(dim));
      e.phase = number_field(je, "alpha", 0.0, where);
      edges.push_back(std::move(e));
    }
  }

  try {
    return FundamentalGraph(dim, std::move(vertices), std::move(edges));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
}

FundamentalGraph load_graph(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ParseError("failed to read graph stream");
  return parse_graph(buf.str());
}

FundamentalGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path);
  return load_graph(in);
}

std::string serialize_graph(const FundamentalGraph& g) {
  ordered_json root;
  root["dimension"] = g.dimension();
  root["vertices"] = ordered_json::array();
  for (const auto& v : g.vertices()) {
    ordered_json jv;
    jv["id"] = v.id;
    jv["Q"] = v.potential;
    root["vertices"].push_back(std::move(jv));
  }
  root["edges"] = ordered_json::array();
  for (const auto& e : g.edges()) {
    ordered_json je;
    je["from"] = g.vertices()[e.from].id;
    je["to"] = g.vertices()[e.to].id;
    je["tau"] = e.cell_shift;
    je["alpha"] = e.phase;
    root["edges"].push_back(std::move(je));
  }
  return root.dump(2) + "\n";
}

}  // namespace magraph
