#pragma once

// Undirected, connected communication graphs. Edges are stored canonically as
// (a, b) with a < b and sorted lexicographically; that order is the edge
// order used by every edge-indexed quantity.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pdfp {

struct Edge {
  std::size_t a;
  std::size_t b;
  bool operator==(const Edge&) const = default;
};

struct Incidence {
  std::size_t edge;
  std::size_t neighbor;
};

class NetworkGraph {
 public:
  // Throws GraphError on self-loops, duplicate edges, out-of-range endpoints
  // or a disconnected graph.
  NetworkGraph(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  static NetworkGraph ring(std::size_t n);
  static NetworkGraph star(std::size_t n);  // node 0 is the hub
  static NetworkGraph complete(std::size_t n);
  // G(n, p); redrawn (up to 100 times) until connected, then GraphError.
  static NetworkGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

  std::size_t node_count() const { return nodes_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  // Incident edges of node n in increasing edge order.
  const std::vector<Incidence>& incident(std::size_t n) const { return incident_.at(n); }
  std::size_t degree(std::size_t n) const { return incident_.at(n).size(); }
  std::size_t max_degree() const;
  std::string describe() const;

 private:
  std::size_t nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> incident_;
};

// Edge-list text format: one "a b" pair of 0-based node ids per line; blank
// lines and '#' comments are ignored. A "# nodes N" comment fixes the node
// count, otherwise it is the largest id + 1.
NetworkGraph read_graph(std::istream& in);
NetworkGraph load_graph(const std::string& path);
void write_graph(std::ostream& out, const NetworkGraph& g);

}  // namespace pdfp
