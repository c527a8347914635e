#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ages/graph.hpp"

namespace ages {

// Orientation rules for maximally orienting a PDAG.
//   R1: a -> b -- c, a and c non-adjacent          => b -> c
//   R2: a -> c -> b, a -- b                         => a -> b
//   R3: a -- c1 -> b, a -- c2 -> b, a -- b,
//       c1 and c2 non-adjacent                      => a -> b
//   R4: a -- b, d -> c -> b, a -- d, a adj c,
//       b and d non-adjacent                        => a -> b
enum class MeekRule { kR1 = 1, kR2 = 2, kR3 = 3, kR4 = 4 };

struct MeekStep {
  MeekRule rule;
  Edge oriented;  // (from, to) after the rule fired
  bool operator==(const MeekStep&) const = default;
};
using MeekTrace = std::vector<MeekStep>;

struct MeekResult {
  Pdag pdag;
  MeekTrace trace;
};

// Applies R1..R4 to a fixpoint. Rules are tried in order R1..R4, each over the
// undirected edges in lexicographic order; every firing restarts nothing and
// the sweep repeats until a full pass changes no edge.
MeekResult meek_closure(const Pdag& g);
MixedGraph meek_closure(MixedGraph g, MeekTrace* trace = nullptr);

// Replays a trace on g. Used to check that traces are faithful records.
MixedGraph replay_meek_trace(MixedGraph g, const MeekTrace& trace);

// Skeleton of g, v-structures directed, then Meek closure.
Cpdag cpdag_of(const Dag& g);

// Dor-Tarsi sink elimination. Returns a DAG with g's skeleton, g's directed
// edges and no v-structures beyond g's, or nullopt if none exists.
std::optional<Dag> consistent_extension(const MixedGraph& g);
inline std::optional<Dag> consistent_extension(const Pdag& g) { return consistent_extension(g.graph()); }

inline constexpr std::size_t kDefaultClassCap = 1'000'000;

// Every DAG in the class of c, found by orienting one undirected edge both
// ways, Meek-closing and recursing. Throws ClassTooLarge past `cap` members.
std::vector<Dag> enumerate_markov_class(const Cpdag& c, std::size_t cap = kDefaultClassCap);

struct ParentSetWitness {
  VertexSet parents;
  Dag witness;
};

// Distinct Pa_G(v) over the class of c, sorted, each with one witness DAG.
std::vector<ParentSetWitness> possible_parent_sets(const Cpdag& c, VertexId v,
                                                   std::size_t cap = kDefaultClassCap);

bool same_markov_class(const Dag& g1, const Dag& g2);

namespace detail {
// Meek closure scanning edges in the given vertex relabeling order. Only the
// scan order differs; the fixpoint must not.
MixedGraph meek_closure_permuted(MixedGraph g, const std::vector<VertexId>& order);
}  // namespace detail

}  // namespace ages
