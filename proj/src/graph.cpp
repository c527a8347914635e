#include "ages/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "ages/errors.hpp"

namespace ages {

MixedGraph::MixedGraph(int p) : p_(p) {
  if (p < 0) throw RangeError("vertex count must be nonnegative");
  marks_.assign(static_cast<std::size_t>(p) * p, 0);
}

void MixedGraph::check_pair(VertexId i, VertexId j) const {
  if (i < 0 || j < 0 || i >= p_ || j >= p_) {
    throw RangeError("vertex index out of range: (" + std::to_string(i) + ", " +
                     std::to_string(j) + ") with p=" + std::to_string(p_));
  }
  if (i == j) throw RangeError("self-loop at vertex " + std::to_string(i));
}

EdgeType MixedGraph::edge(VertexId i, VertexId j) const {
  const bool ij = mark(i, j);
  const bool ji = mark(j, i);
  if (ij && ji) return EdgeType::kUndirected;
  if (ij) return EdgeType::kForward;
  if (ji) return EdgeType::kBackward;
  return EdgeType::kNone;
}

void MixedGraph::add_directed(VertexId from, VertexId to) {
  check_pair(from, to);
  set_mark(from, to, true);
  set_mark(to, from, false);
}

void MixedGraph::add_undirected(VertexId i, VertexId j) {
  check_pair(i, j);
  set_mark(i, j, true);
  set_mark(j, i, true);
}

void MixedGraph::set_edge(VertexId i, VertexId j, EdgeType type) {
  switch (type) {
    case EdgeType::kNone:
      remove_edge(i, j);
      break;
    case EdgeType::kForward:
      add_directed(i, j);
      break;
    case EdgeType::kBackward:
      add_directed(j, i);
      break;
    case EdgeType::kUndirected:
      add_undirected(i, j);
      break;
  }
}

void MixedGraph::remove_edge(VertexId i, VertexId j) {
  check_pair(i, j);
  set_mark(i, j, false);
  set_mark(j, i, false);
}

VertexSet MixedGraph::parents(VertexId v) const {
  VertexSet out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_directed(u, v)) out.push_back(u);
  }
  return out;
}

VertexSet MixedGraph::children(VertexId v) const {
  VertexSet out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_directed(v, u)) out.push_back(u);
  }
  return out;
}

VertexSet MixedGraph::neighbors(VertexId v) const {
  VertexSet out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_undirected(u, v)) out.push_back(u);
  }
  return out;
}

VertexSet MixedGraph::adjacents(VertexId v) const {
  VertexSet out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && adjacent(u, v)) out.push_back(u);
  }
  return out;
}

int MixedGraph::num_edges() const { return num_directed() + num_undirected(); }

int MixedGraph::num_directed() const {
  int count = 0;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j)
      if (i != j && has_directed(i, j)) ++count;
  return count;
}

int MixedGraph::num_undirected() const {
  int count = 0;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j)
      if (has_undirected(i, j)) ++count;
  return count;
}

std::vector<Edge> MixedGraph::directed_edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j)
      if (i != j && has_directed(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<Edge> MixedGraph::undirected_edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j)
      if (has_undirected(i, j)) out.emplace_back(i, j);
  return out;
}

std::optional<std::vector<VertexId>> MixedGraph::topological_order() const {
  std::vector<int> indegree(p_, 0);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j)
      if (i != j && has_directed(i, j)) ++indegree[j];
  // Smallest available index first, so the order is deterministic.
  std::vector<VertexId> order;
  order.reserve(p_);
  std::vector<bool> done(p_, false);
  for (int step = 0; step < p_; ++step) {
    int next = -1;
    for (int v = 0; v < p_; ++v) {
      if (!done[v] && indegree[v] == 0) {
        next = v;
        break;
      }
    }
    if (next < 0) return std::nullopt;
    done[next] = true;
    order.push_back(next);
    for (int w = 0; w < p_; ++w)
      if (w != next && has_directed(next, w)) --indegree[w];
  }
  return order;
}

std::string edge_string(const MixedGraph& g) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, j] : g.directed_edges()) {
    os << (first ? "" : ";") << i << "->" << j;
    first = false;
  }
  for (const auto& [i, j] : g.undirected_edges()) {
    os << (first ? "" : ";") << i << "--" << j;
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MixedGraph& g) {
  return os << "MixedGraph(p=" << g.size() << ", {" << edge_string(g) << "})";
}

Dag Dag::from_graph(MixedGraph g) {
  if (!g.is_directed()) throw PreconditionError("a DAG cannot contain undirected edges");
  if (!g.topological_order()) throw CycleError("edge set contains a directed cycle");
  return Dag(std::move(g));
}

Pdag Pdag::from_graph(MixedGraph g) {
  if (!g.topological_order()) throw CycleError("directed part contains a directed cycle");
  return Pdag(std::move(g));
}

Dag build_dag(int p, const std::vector<Edge>& directed_edges) {
  MixedGraph g(p);
  for (const auto& [from, to] : directed_edges) {
    if (from < 0 || to < 0 || from >= p || to >= p) {
      throw RangeError("edge (" + std::to_string(from) + ", " + std::to_string(to) +
                       ") out of range for p=" + std::to_string(p));
    }
    if (from == to) throw CycleError("self-loop at vertex " + std::to_string(from));
    if (g.has_directed(to, from)) throw CycleError("2-cycle between " + std::to_string(from) + " and " + std::to_string(to));
    if (g.has_directed(from, to)) throw PreconditionError("duplicate edge");
    g.add_directed(from, to);
  }
  return Dag::from_graph(std::move(g));
}

MixedGraph skeleton(const MixedGraph& g) {
  MixedGraph out(g.size());
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j)
      if (g.adjacent(i, j)) out.add_undirected(i, j);
  return out;
}

MixedGraph directed_part(const MixedGraph& g) {
  MixedGraph out(g.size());
  for (const auto& [i, j] : g.directed_edges()) out.add_directed(i, j);
  return out;
}

Dag restrict_to_skeleton(const Dag& g, const MixedGraph& h) {
  if (h.size() != g.size()) throw PreconditionError("restrict_to_skeleton: vertex sets differ");
  MixedGraph out(g.size());
  for (const auto& [i, j] : g.graph().directed_edges())
    if (h.adjacent(i, j)) out.add_directed(i, j);
  return Dag::from_graph(std::move(out));
}

bool skeleton_subset(const MixedGraph& a, const MixedGraph& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j)
      if (a.adjacent(i, j) && !b.adjacent(i, j)) return false;
  return true;
}

bool directed_subset(const MixedGraph& a, const MixedGraph& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [i, j] : a.directed_edges())
    if (!b.has_directed(i, j)) return false;
  return true;
}

std::vector<VStructure> v_structures(const MixedGraph& g) {
  std::vector<VStructure> out;
  const int p = g.size();
  for (int j = 0; j < p; ++j) {
    const VertexSet pa = g.parents(j);
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b)
        if (!g.adjacent(pa[a], pa[b])) out.push_back({pa[a], j, pa[b]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet descendants(const MixedGraph& g, VertexId v) {
  std::vector<bool> seen(g.size(), false);
  std::deque<VertexId> queue{v};
  seen[v] = true;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (int w = 0; w < g.size(); ++w) {
      if (!seen[w] && w != u && g.has_directed(u, w)) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  VertexSet out;
  for (int w = 0; w < g.size(); ++w)
    if (seen[w]) out.push_back(w);
  return out;
}

VertexSet ancestors(const MixedGraph& g, const VertexSet& vs) {
  std::vector<bool> seen(g.size(), false);
  std::deque<VertexId> queue;
  for (VertexId v : vs) {
    if (!seen[v]) {
      seen[v] = true;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (int w = 0; w < g.size(); ++w) {
      if (!seen[w] && w != u && g.has_directed(w, u)) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  VertexSet out;
  for (int w = 0; w < g.size(); ++w)
    if (seen[w]) out.push_back(w);
  return out;
}

namespace {

void check_dsep_args(const Dag& g, VertexId i, VertexId j, const VertexSet& s) {
  const int p = g.size();
  if (i < 0 || j < 0 || i >= p || j >= p) throw RangeError("d-separation query out of range");
  if (i == j) throw PreconditionError("d-separation query needs two distinct vertices");
  for (VertexId v : s) {
    if (v < 0 || v >= p) throw RangeError("conditioning vertex out of range");
    if (v == i || v == j) throw PreconditionError("conditioning set contains a queried vertex");
  }
}

}  // namespace

bool d_separated(const Dag& dag, VertexId i, VertexId j, const VertexSet& s) {
  check_dsep_args(dag, i, j, s);
  const MixedGraph& g = dag.graph();
  const int p = g.size();

  VertexSet query = s;
  query.push_back(i);
  query.push_back(j);
  const VertexSet anc = ancestors(g, make_set(query));
  std::vector<bool> in_anc(p, false);
  for (VertexId v : anc) in_anc[v] = true;

  // Moral graph of the ancestral set.
  std::vector<std::vector<bool>> moral(p, std::vector<bool>(p, false));
  for (VertexId v : anc) {
    const VertexSet pa = g.parents(v);
    for (VertexId u : pa) {
      moral[u][v] = moral[v][u] = true;
    }
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b)
        moral[pa[a]][pa[b]] = moral[pa[b]][pa[a]] = true;
  }

  std::vector<bool> blocked(p, false);
  for (VertexId v : s) blocked[v] = true;
  std::vector<bool> seen(p, false);
  std::deque<VertexId> queue{i};
  seen[i] = true;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    if (u == j) return false;
    for (int w = 0; w < p; ++w) {
      if (moral[u][w] && in_anc[w] && !seen[w] && !blocked[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return true;
}

namespace {

struct PathSearch {
  const MixedGraph& g;
  VertexId target;
  std::vector<bool> conditioned;
  std::vector<bool> collider_open;  // vertex has a descendant (incl. itself) in s
  std::vector<VertexId> path;
  std::vector<bool> on_path;

  bool path_is_open() const {
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
      const VertexId prev = path[k - 1], mid = path[k], next = path[k + 1];
      const bool collider = g.has_directed(prev, mid) && g.has_directed(next, mid);
      if (collider) {
        if (!collider_open[mid]) return false;
      } else if (conditioned[mid]) {
        return false;
      }
    }
    return true;
  }

  bool search(VertexId u) {
    if (u == target) return path_is_open();
    for (int w = 0; w < g.size(); ++w) {
      if (w == u || on_path[w] || !g.adjacent(u, w)) continue;
      on_path[w] = true;
      path.push_back(w);
      const bool open = search(w);
      path.pop_back();
      on_path[w] = false;
      if (open) return true;
    }
    return false;
  }
};

}  // namespace

bool d_separated_bruteforce(const Dag& dag, VertexId i, VertexId j, const VertexSet& s) {
  check_dsep_args(dag, i, j, s);
  const MixedGraph& g = dag.graph();
  const int p = g.size();
  PathSearch ps{g, j, std::vector<bool>(p, false), std::vector<bool>(p, false), {i},
                std::vector<bool>(p, false)};
  for (VertexId v : s) ps.conditioned[v] = true;
  for (int v = 0; v < p; ++v) {
    for (VertexId d : descendants(g, v)) {
      if (ps.conditioned[d]) {
        ps.collider_open[v] = true;
        break;
      }
    }
  }
  ps.on_path[i] = true;
  return !ps.search(i);
}

VertexSet make_set(std::vector<VertexId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool contains(const VertexSet& s, VertexId v) { return std::binary_search(s.begin(), s.end(), v); }

}  // namespace ages
