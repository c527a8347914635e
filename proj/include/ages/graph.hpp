#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ages {

using VertexId = int;
// Sorted, duplicate-free list of vertex indices.
using VertexSet = std::vector<VertexId>;
using Edge = std::pair<VertexId, VertexId>;

// State of the pair (i, j) as seen from i.
enum class EdgeType : std::uint8_t {
  kNone,
  kForward,     // i -> j
  kBackward,    // i <- j
  kUndirected,  // i -- j
};

// Graph over vertices 0..p-1 with at most one directed or undirected edge per
// pair. Stored as a dense mark matrix: mark(i, j) && !mark(j, i) is i -> j,
// both marks is i -- j.
class MixedGraph {
 public:
  MixedGraph() = default;
  explicit MixedGraph(int p);

  int size() const { return p_; }

  bool adjacent(VertexId i, VertexId j) const { return mark(i, j) || mark(j, i); }
  bool has_directed(VertexId i, VertexId j) const { return mark(i, j) && !mark(j, i); }
  bool has_undirected(VertexId i, VertexId j) const { return mark(i, j) && mark(j, i); }
  EdgeType edge(VertexId i, VertexId j) const;

  // Mutators replace whatever edge the pair had before.
  void add_directed(VertexId from, VertexId to);
  void add_undirected(VertexId i, VertexId j);
  void set_edge(VertexId i, VertexId j, EdgeType type);
  void remove_edge(VertexId i, VertexId j);

  VertexSet parents(VertexId v) const;
  VertexSet children(VertexId v) const;
  // Vertices joined to v by an undirected edge.
  VertexSet neighbors(VertexId v) const;
  VertexSet adjacents(VertexId v) const;

  int num_edges() const;
  int num_directed() const;
  int num_undirected() const;
  bool is_directed() const { return num_undirected() == 0; }

  // Directed edges as (from, to), lexicographic.
  std::vector<Edge> directed_edges() const;
  // Undirected edges as (i, j) with i < j, lexicographic.
  std::vector<Edge> undirected_edges() const;

  // Topological order of the directed part, ignoring undirected edges.
  // Empty optional when the directed part has a cycle.
  std::optional<std::vector<VertexId>> topological_order() const;

  bool operator==(const MixedGraph& other) const = default;

 private:
  bool mark(VertexId i, VertexId j) const { return marks_[static_cast<std::size_t>(i) * p_ + j] != 0; }
  void set_mark(VertexId i, VertexId j, bool on) {
    marks_[static_cast<std::size_t>(i) * p_ + j] = on ? 1 : 0;
  }
  void check_pair(VertexId i, VertexId j) const;

  int p_ = 0;
  std::vector<std::uint8_t> marks_;
};

std::ostream& operator<<(std::ostream& os, const MixedGraph& g);
// Compact single-line form, e.g. "0->2;1->2;0--1".
std::string edge_string(const MixedGraph& g);

// Directed graph without directed cycles.
class Dag {
 public:
  Dag() = default;
  // Throws CycleError on a directed cycle, PreconditionError on undirected edges.
  static Dag from_graph(MixedGraph g);

  const MixedGraph& graph() const { return g_; }
  operator const MixedGraph&() const { return g_; }  // NOLINT
  int size() const { return g_.size(); }
  VertexSet parents(VertexId v) const { return g_.parents(v); }
  bool has_edge(VertexId from, VertexId to) const { return g_.has_directed(from, to); }

  bool operator==(const Dag& other) const = default;

 private:
  explicit Dag(MixedGraph g) : g_(std::move(g)) {}
  MixedGraph g_;
};

// Partially directed graph whose directed part is acyclic.
class Pdag {
 public:
  Pdag() = default;
  // Throws CycleError if the directed edges form a cycle.
  static Pdag from_graph(MixedGraph g);

  const MixedGraph& graph() const { return g_; }
  operator const MixedGraph&() const { return g_; }  // NOLINT
  int size() const { return g_.size(); }

  bool operator==(const Pdag& other) const = default;

 private:
  explicit Pdag(MixedGraph g) : g_(std::move(g)) {}
  MixedGraph g_;
};

namespace detail {
struct CpdagAccess;
}

// Completed PDAG: the representative of a Markov equivalence class. Only the
// equivalence routines create these; from_graph validates arbitrary input.
class Cpdag {
 public:
  Cpdag() = default;
  // Throws PreconditionError unless g is exactly the CPDAG of some DAG.
  static Cpdag from_graph(const MixedGraph& g);

  const MixedGraph& graph() const { return g_; }
  operator const MixedGraph&() const { return g_; }  // NOLINT
  int size() const { return g_.size(); }

  bool operator==(const Cpdag& other) const = default;

 private:
  friend struct detail::CpdagAccess;
  explicit Cpdag(MixedGraph g) : g_(std::move(g)) {}
  MixedGraph g_;
};

Dag build_dag(int p, const std::vector<Edge>& directed_edges);

MixedGraph skeleton(const MixedGraph& g);
MixedGraph directed_part(const MixedGraph& g);
// Keeps the edges of g whose adjacency is present in h, with g's orientations.
Dag restrict_to_skeleton(const Dag& g, const MixedGraph& h);

// True when every adjacency of a is also an adjacency of b.
bool skeleton_subset(const MixedGraph& a, const MixedGraph& b);
// True when every directed edge of a is a directed edge of b.
bool directed_subset(const MixedGraph& a, const MixedGraph& b);

// Triples (i, j, k) with i -> j <- k, i < k and i, k non-adjacent.
struct VStructure {
  VertexId i, j, k;
  auto operator<=>(const VStructure&) const = default;
};
std::vector<VStructure> v_structures(const MixedGraph& g);

// Vertices reachable from v along directed edges, v included.
VertexSet descendants(const MixedGraph& g, VertexId v);
VertexSet ancestors(const MixedGraph& g, const VertexSet& vs);

// d-separation of i and j given s, via the moralized ancestral graph.
bool d_separated(const Dag& g, VertexId i, VertexId j, const VertexSet& s);
// Same relation by enumerating every simple path and applying the blocking
// rule literally. Exponential; intended as a reference on small graphs.
bool d_separated_bruteforce(const Dag& g, VertexId i, VertexId j, const VertexSet& s);

// Set helpers on sorted vectors.
VertexSet make_set(std::vector<VertexId> v);
bool contains(const VertexSet& s, VertexId v);

}  // namespace ages
