#include "pdfp/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "pdfp/errors.hpp"

namespace pdfp {
namespace {

bool connected(std::size_t nodes, const std::vector<std::vector<Incidence>>& inc) {
  if (nodes == 0) return false;
  std::vector<bool> seen(nodes, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    for (const Incidence& e : inc[n])
      if (!seen[e.neighbor]) {
        seen[e.neighbor] = true;
        ++count;
        stack.push_back(e.neighbor);
      }
  }
  return count == nodes;
}

}  // namespace

NetworkGraph::NetworkGraph(std::size_t nodes,
                           const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : nodes_(nodes) {
  if (nodes < 2) throw GraphError("a network needs at least 2 nodes");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : edges) {
    if (a >= nodes || b >= nodes)
      throw GraphError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references a node outside [0, " + std::to_string(nodes) + ")");
    if (a == b) throw GraphError("self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second)
      throw GraphError("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  for (const auto& [a, b] : seen) edges_.push_back(Edge{a, b});
  incident_.resize(nodes);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    incident_[edges_[e].a].push_back(Incidence{e, edges_[e].b});
    incident_[edges_[e].b].push_back(Incidence{e, edges_[e].a});
  }
  if (!connected(nodes, incident_)) throw GraphError("graph is not connected");
}

NetworkGraph NetworkGraph::ring(std::size_t n) {
  if (n < 3) throw GraphError("a ring needs at least 3 nodes");
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::star(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw GraphError("edge probability must lie in (0, 1]");
  if (n < 2) throw GraphError("a network needs at least 2 nodes");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng)) e.emplace_back(i, j);
    try {
      return NetworkGraph(n, e);
    } catch (const GraphError&) {
    }
  }
  throw GraphError("no connected G(" + std::to_string(n) + ", " + std::to_string(p) +
                   ") sample in 100 attempts");
}

std::size_t NetworkGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& inc : incident_) d = std::max(d, inc.size());
  return d;
}

std::string NetworkGraph::describe() const {
  return "graph(" + std::to_string(nodes_) + " nodes, " + std::to_string(edges_.size()) +
         " edges, max degree " + std::to_string(max_degree()) + ")";
}

NetworkGraph read_graph(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t declared = 0;
  std::size_t max_id = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream c(line.substr(hash + 1));
      std::string word;
      std::size_t value = 0;
      if (c >> word && word == "nodes" && c >> value) declared = value;
      line.erase(hash);
    }
    std::istringstream ls(line);
    long long a = 0, b = 0;
    if (!(ls >> a)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("expected a node id", lineno, 1);
      continue;
    }
    if (!(ls >> b)) throw ParseError("edge needs two node ids", lineno, 1);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing content after edge", lineno, 1);
    if (a < 0 || b < 0) throw ParseError("node ids must be non-negative", lineno, 1);
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_id = std::max({max_id, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  }
  if (edges.empty()) throw ParseError("edge list is empty", lineno, 0);
  const std::size_t nodes = declared ? declared : max_id + 1;
  return NetworkGraph(nodes, edges);
}

NetworkGraph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open graph file " + path);
  return read_graph(f);
}

void write_graph(std::ostream& out, const NetworkGraph& g) {
  out << "# nodes " << g.node_count() << "\n";
  for (const Edge& e : g.edges()) out << e.a << " " << e.b << "\n";
}

}  // namespace pdfp
