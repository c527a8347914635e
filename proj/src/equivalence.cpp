#include "ages/equivalence.hpp"

#include <algorithm>
#include <map>

#include "ages/errors.hpp"

namespace ages {

namespace detail {
struct CpdagAccess {
  static Cpdag make(MixedGraph g) { return Cpdag(std::move(g)); }
};
}  // namespace detail

namespace {

bool r1(const MixedGraph& g, VertexId u, VertexId v) {
  for (int a = 0; a < g.size(); ++a) {
    if (a != u && a != v && g.has_directed(a, u) && !g.adjacent(a, v)) return true;
  }
  return false;
}

bool r2(const MixedGraph& g, VertexId u, VertexId v) {
  for (int c = 0; c < g.size(); ++c) {
    if (c != u && c != v && g.has_directed(u, c) && g.has_directed(c, v)) return true;
  }
  return false;
}

bool r3(const MixedGraph& g, VertexId u, VertexId v) {
  const int p = g.size();
  for (int c1 = 0; c1 < p; ++c1) {
    if (c1 == u || c1 == v || !g.has_undirected(u, c1) || !g.has_directed(c1, v)) continue;
    for (int c2 = c1 + 1; c2 < p; ++c2) {
      if (c2 == u || c2 == v || !g.has_undirected(u, c2) || !g.has_directed(c2, v)) continue;
      if (!g.adjacent(c1, c2)) return true;
    }
  }
  return false;
}

bool r4(const MixedGraph& g, VertexId u, VertexId v) {
  const int p = g.size();
  for (int c = 0; c < p; ++c) {
    if (c == u || c == v || !g.has_directed(c, v) || !g.adjacent(u, c)) continue;
    for (int d = 0; d < p; ++d) {
      if (d == u || d == v || d == c) continue;
      if (g.has_directed(d, c) && g.has_undirected(u, d) && !g.adjacent(v, d)) return true;
    }
  }
  return false;
}

using RuleFn = bool (*)(const MixedGraph&, VertexId, VertexId);
constexpr RuleFn kRules[] = {r1, r2, r3, r4};
constexpr MeekRule kRuleIds[] = {MeekRule::kR1, MeekRule::kR2, MeekRule::kR3, MeekRule::kR4};

MixedGraph close_in_order(MixedGraph g, const std::vector<VertexId>& order, MeekTrace* trace) {
  const int p = g.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < 4; ++r) {
      for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
          const VertexId x = order[a], y = order[b];
          if (!g.has_undirected(x, y)) continue;
          VertexId from = -1, to = -1;
          if (kRules[r](g, x, y)) {
            from = x;
            to = y;
          } else if (kRules[r](g, y, x)) {
            from = y;
            to = x;
          }
          if (from < 0) continue;
          g.add_directed(from, to);
          if (trace) trace->push_back({kRuleIds[r], {from, to}});
          changed = true;
        }
      }
    }
  }
  return g;
}

std::vector<VertexId> identity_order(int p) {
  std::vector<VertexId> order(p);
  for (int i = 0; i < p; ++i) order[i] = i;
  return order;
}

}  // namespace

MixedGraph meek_closure(MixedGraph g, MeekTrace* trace) {
  const int p = g.size();
  return close_in_order(std::move(g), identity_order(p), trace);
}

MeekResult meek_closure(const Pdag& g) {
  MeekTrace trace;
  MixedGraph closed = meek_closure(g.graph(), &trace);
  return {Pdag::from_graph(std::move(closed)), std::move(trace)};
}

MixedGraph replay_meek_trace(MixedGraph g, const MeekTrace& trace) {
  for (const auto& step : trace) g.add_directed(step.oriented.first, step.oriented.second);
  return g;
}

namespace detail {
MixedGraph meek_closure_permuted(MixedGraph g, const std::vector<VertexId>& order) {
  if (static_cast<int>(order.size()) != g.size()) throw PreconditionError("order must be a permutation");
  return close_in_order(std::move(g), order, nullptr);
}
}  // namespace detail

Cpdag cpdag_of(const Dag& dag) {
  const MixedGraph& g = dag.graph();
  MixedGraph pattern = skeleton(g);
  for (const auto& vs : v_structures(g)) {
    pattern.add_directed(vs.i, vs.j);
    pattern.add_directed(vs.k, vs.j);
  }
  return detail::CpdagAccess::make(meek_closure(std::move(pattern)));
}

std::optional<Dag> consistent_extension(const MixedGraph& g) {
  const int p = g.size();
  MixedGraph work = g;    // shrinking copy; removed vertices lose all edges
  MixedGraph result = g;  // receives the orientations
  std::vector<bool> removed(p, false);
  for (int step = 0; step < p; ++step) {
    int sink = -1;
    for (int x = 0; x < p && sink < 0; ++x) {
      if (removed[x]) continue;
      bool has_out = false;
      for (int y = 0; y < p; ++y) {
        if (y != x && work.has_directed(x, y)) {
          has_out = true;
          break;
        }
      }
      if (has_out) continue;
      // Each undirected neighbor must be adjacent to every other vertex adjacent to x.
      const VertexSet adj = work.adjacents(x);
      bool ok = true;
      for (VertexId y : adj) {
        if (!work.has_undirected(x, y)) continue;
        for (VertexId z : adj) {
          if (z != y && !work.adjacent(y, z)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) sink = x;
    }
    if (sink < 0) return std::nullopt;
    for (VertexId y : work.adjacents(sink)) {
      if (work.has_undirected(sink, y)) result.add_directed(y, sink);
      work.remove_edge(sink, y);
    }
    removed[sink] = true;
  }
  return Dag::from_graph(std::move(result));
}

namespace {

void enumerate_rec(MixedGraph g, std::vector<Dag>& out, std::size_t cap) {
  const auto undirected = g.undirected_edges();
  if (undirected.empty()) {
    if (out.size() >= cap) {
      throw ClassTooLarge("Markov equivalence class exceeds cap of " + std::to_string(cap) + " members");
    }
    out.push_back(Dag::from_graph(std::move(g)));
    return;
  }
  const auto [a, b] = undirected.front();
  for (const auto& [from, to] : {Edge{a, b}, Edge{b, a}}) {
    MixedGraph next = g;
    next.add_directed(from, to);
    next = meek_closure(std::move(next));
    if (!next.topological_order()) continue;
    enumerate_rec(std::move(next), out, cap);
  }
}

}  // namespace

std::vector<Dag> enumerate_markov_class(const Cpdag& c, std::size_t cap) {
  std::vector<Dag> out;
  enumerate_rec(c.graph(), out, cap);
  return out;
}

std::vector<ParentSetWitness> possible_parent_sets(const Cpdag& c, VertexId v, std::size_t cap) {
  if (v < 0 || v >= c.size()) throw RangeError("vertex out of range");
  std::map<VertexSet, Dag> seen;
  for (auto& dag : enumerate_markov_class(c, cap)) {
    VertexSet pa = dag.parents(v);
    seen.try_emplace(std::move(pa), std::move(dag));
  }
  std::vector<ParentSetWitness> out;
  out.reserve(seen.size());
  for (auto& [pa, dag] : seen) out.push_back({pa, dag});
  return out;
}

bool same_markov_class(const Dag& g1, const Dag& g2) {
  if (g1.size() != g2.size()) throw PreconditionError("graphs have different vertex counts");
  return skeleton(g1.graph()) == skeleton(g2.graph()) &&
         v_structures(g1.graph()) == v_structures(g2.graph());
}

Cpdag Cpdag::from_graph(const MixedGraph& g) {
  const auto ext = consistent_extension(g);
  if (!ext) throw PreconditionError("graph is not extendible, so not a CPDAG");
  Cpdag c = cpdag_of(*ext);
  if (c.graph() != g) throw PreconditionError("graph is not the completed PDAG of its class");
  return c;
}

}  // namespace ages
