#include "ages/ges.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ages/equivalence.hpp"
#include "ages/errors.hpp"
#include "ages/score.hpp"

namespace ages {

namespace {

using Mask = std::uint64_t;

Mask bit(int v) { return Mask{1} << v; }

VertexSet to_set(Mask m) {
  VertexSet out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

Mask to_mask(const VertexSet& s) {
  Mask m = 0;
  for (VertexId v : s) m |= bit(v);
  return m;
}

// Bitmask view of a mixed graph.
struct Bits {
  int p;
  std::vector<Mask> und, par, chi;

  explicit Bits(const MixedGraph& g) : p(g.size()), und(p, 0), par(p, 0), chi(p, 0) {
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        if (a == b) continue;
        if (g.has_undirected(a, b)) und[a] |= bit(b);
        if (g.has_directed(b, a)) par[a] |= bit(b);
        if (g.has_directed(a, b)) chi[a] |= bit(b);
      }
    }
  }

  Mask adj(int v) const { return und[v] | par[v] | chi[v]; }

  bool clique(Mask m) const {
    for (Mask r = m; r; r &= r - 1) {
      const int v = std::countr_zero(r);
      if ((m & ~bit(v) & ~adj(v)) != 0) return false;
    }
    return true;
  }

  // Is there a path from `from` to `to` using undirected edges and directed
  // edges in their direction, avoiding `blocked`?
  bool semi_directed_path(int from, int to, Mask blocked) const {
    Mask visited = bit(from);
    Mask frontier = bit(from);
    while (frontier) {
      Mask next = 0;
      for (Mask r = frontier; r; r &= r - 1) {
        const int v = std::countr_zero(r);
        next |= und[v] | chi[v];
      }
      if (next & bit(to)) return true;
      next &= ~visited & ~blocked;
      visited |= next;
      frontier = next;
    }
    return false;
  }
};

// Submasks of m in increasing numeric order, starting from 0.
template <class F>
void for_each_submask(Mask m, F&& f) {
  Mask s = 0;
  while (true) {
    f(s);
    if (s == m) break;
    s = (s - m) & m;
  }
}

template <class M>
bool move_less(const M& a, const M& b) {
  return std::tie(a.i, a.j, a.cond) < std::tie(b.i, b.j, b.cond);
}

// Index of the chosen move: extreme |rho| with lexicographic tie-breaking.
template <class Moves>
std::size_t choose(const Moves& moves, MoveKind kind) {
  double best = kind == MoveKind::kInsert ? -1.0 : 2.0;
  for (const auto& m : moves) {
    const double r = std::abs(m.rho);
    best = kind == MoveKind::kInsert ? std::max(best, r) : std::min(best, r);
  }
  std::size_t pick = moves.size();
  for (std::size_t k = 0; k < moves.size(); ++k) {
    const double r = std::abs(moves[k].rho);
    const bool tied = kind == MoveKind::kInsert ? r >= best - kTieTolerance : r <= best + kTieTolerance;
    if (!tied) continue;
    if (pick == moves.size() || move_less(moves[k], moves[pick])) pick = k;
  }
  return pick;
}

Cpdag rebuild(const MixedGraph& pdag) {
  const auto ext = consistent_extension(pdag);
  if (!ext) throw std::logic_error("GES operator produced a non-extendible PDAG");
  return cpdag_of(*ext);
}

Cpdag apply_insert(const Cpdag& c, VertexId x, VertexId y, Mask t) {
  MixedGraph g = c.graph();
  g.add_directed(x, y);
  for (VertexId v : to_set(t)) g.add_directed(v, y);
  return rebuild(g);
}

Cpdag apply_delete(const Cpdag& c, VertexId x, VertexId y, Mask h) {
  MixedGraph g = c.graph();
  g.remove_edge(x, y);
  for (VertexId v : to_set(h)) {
    g.add_directed(y, v);
    if (g.has_undirected(x, v)) g.add_directed(x, v);
  }
  return rebuild(g);
}

void check_width(int p) {
  if (p > 64) throw PreconditionError("GES supports at most 64 variables");
}

}  // namespace

RhoCache::RhoCache(const CovarianceSource& src) : src_(&src) { check_width(src.size()); }

double RhoCache::rho(VertexId i, VertexId j, Mask cond_mask) {
  const auto a = static_cast<std::uint32_t>(std::min(i, j));
  const auto b = static_cast<std::uint32_t>(std::max(i, j));
  const Key key{cond_mask, (a << 16) | b};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double r = partial_correlation(*src_, i, j, to_set(cond_mask));
  cache_.emplace(key, r);
  return r;
}

double RhoCache::rho(VertexId i, VertexId j, const VertexSet& cond) { return rho(i, j, to_mask(cond)); }

bool accepts(MoveKind kind, double rho, double lambda) {
  if (kind == MoveKind::kInsert) return score_diff_rho(rho, lambda) < 0.0;
  return -score_diff_rho(rho, lambda) < 0.0;
}

std::optional<GesStep> best_operator_move(RhoCache& cache, const Cpdag& c, MoveKind kind) {
  const int p = c.size();
  check_width(p);
  const Bits g(c.graph());
  struct Candidate {
    VertexId i, j;
    VertexSet cond;
    double rho;
    Mask op;
  };
  std::vector<Candidate> cands;

  for (int x = 0; x < p; ++x) {
    for (int y = 0; y < p; ++y) {
      if (x == y) continue;
      const bool adjacent = (g.adj(x) & bit(y)) != 0;
      const Mask na = g.und[y] & g.adj(x);
      if (kind == MoveKind::kInsert) {
        if (adjacent) continue;
        const Mask free = g.und[y] & ~g.adj(x);
        for_each_submask(free, [&](Mask t) {
          const Mask nat = na | t;
          if (!g.clique(nat)) return;
          if (g.semi_directed_path(y, x, nat)) return;
          const Mask s = nat | g.par[y];
          cands.push_back({x, y, to_set(s), cache.rho(x, y, s), t});
        });
      } else {
        const bool undirected = (g.und[x] & bit(y)) != 0;
        const bool forward = (g.chi[x] & bit(y)) != 0;
        if (!undirected && !forward) continue;
        for_each_submask(na, [&](Mask h) {
          const Mask rest = na & ~h;
          if (!g.clique(rest)) return;
          const Mask s = (rest | g.par[y]) & ~bit(x);
          cands.push_back({x, y, to_set(s), cache.rho(x, y, s), h});
        });
      }
    }
  }
  if (cands.empty()) return std::nullopt;
  const std::size_t k = choose(cands, kind);
  const Candidate& best = cands[k];
  GesStep step;
  step.move.kind = kind;
  step.move.i = best.i;
  step.move.j = best.j;
  step.move.cond = best.cond;
  step.move.rho = best.rho;
  step.move.op_set = to_set(best.op);
  step.result = kind == MoveKind::kInsert ? apply_insert(c, best.i, best.j, best.op)
                                          : apply_delete(c, best.i, best.j, best.op);
  return step;
}

std::optional<GesStep> best_conceptual_move(const CovarianceSource& src, const Cpdag& c, MoveKind kind,
                                            std::size_t class_cap) {
  const int p = c.size();
  struct Candidate {
    VertexId i, j;
    VertexSet cond;
    double rho;
    std::size_t witness;
  };
  const std::vector<Dag> members = enumerate_markov_class(c, class_cap);
  std::vector<Candidate> cands;
  for (std::size_t w = 0; w < members.size(); ++w) {
    const MixedGraph& g = members[w].graph();
    for (int j = 0; j < p; ++j) {
      const VertexSet pa = g.parents(j);
      if (kind == MoveKind::kInsert) {
        const VertexSet desc = descendants(g, j);
        for (int i = 0; i < p; ++i) {
          if (i == j || g.adjacent(i, j) || contains(desc, i)) continue;
          cands.push_back({i, j, pa, partial_correlation(src, i, j, pa), w});
        }
      } else {
        for (VertexId i : pa) {
          VertexSet rest;
          for (VertexId v : pa)
            if (v != i) rest.push_back(v);
          cands.push_back({i, j, rest, partial_correlation(src, i, j, rest), w});
        }
      }
    }
  }
  if (cands.empty()) return std::nullopt;
  const Candidate& best = cands[choose(cands, kind)];
  MixedGraph g = members[best.witness].graph();
  if (kind == MoveKind::kInsert) {
    g.add_directed(best.i, best.j);
  } else {
    g.remove_edge(best.i, best.j);
  }
  GesStep step;
  step.move.kind = kind;
  step.move.i = best.i;
  step.move.j = best.j;
  step.move.cond = best.cond;
  step.move.rho = best.rho;
  step.result = cpdag_of(Dag::from_graph(std::move(g)));
  return step;
}

namespace {

std::optional<GesStep> gate(std::optional<GesStep> step, double lambda) {
  if (!step) return std::nullopt;
  if (!accepts(step->move.kind, step->move.rho, lambda)) return std::nullopt;
  const double d = score_diff_rho(step->move.rho, lambda);
  step->move.score_delta = step->move.kind == MoveKind::kInsert ? d : -d;
  return step;
}

}  // namespace

std::optional<GesStep> operator_ges_step(RhoCache& cache, const Cpdag& c, double lambda, MoveKind kind) {
  return gate(best_operator_move(cache, c, kind), lambda);
}

std::optional<GesStep> conceptual_ges_step(const CovarianceSource& src, const Cpdag& c, double lambda,
                                           MoveKind kind, std::size_t class_cap) {
  return gate(best_conceptual_move(src, c, kind, class_cap), lambda);
}

namespace {

Cpdag empty_cpdag(int p) { return cpdag_of(Dag::from_graph(MixedGraph(p))); }

Cpdag run_phase(RhoCache& cache, Cpdag c, double lambda, MoveKind kind, std::vector<GesMove>& log) {
  while (auto step = operator_ges_step(cache, c, lambda, kind)) {
    log.push_back(step->move);
    c = std::move(step->result);
  }
  return c;
}

}  // namespace

GesResult ges_run(const CovarianceSource& src, double lambda) {
  const Penalty penalty(lambda, src);
  RhoCache cache(src);
  GesResult out;
  out.forward = run_phase(cache, empty_cpdag(src.size()), penalty.lambda(), MoveKind::kInsert, out.forward_moves);
  out.cpdag = run_phase(cache, out.forward, penalty.lambda(), MoveKind::kDelete, out.backward_moves);
  return out;
}

const Cpdag& SolutionPath::at(double lambda) const {
  if (pieces.empty()) throw PreconditionError("empty solution path");
  if (lambda < lambda_min) throw DomainError("lambda below the start of the solution path");
  for (const auto& piece : pieces) {
    if (lambda < piece.hi) return piece.cpdag;
  }
  return pieces.back().cpdag;
}

namespace {

// Appends the pieces of the backward phase started from `start` on the
// forward interval [lo, hi).
void backward_pieces(RhoCache& cache, const Cpdag& start, double lo, double hi, PathPolicy policy,
                     std::vector<PathPiece>& out) {
  if (policy == PathPolicy::kLowerEndpoint) {
    std::vector<GesMove> log;
    out.push_back({lo, hi, run_phase(cache, start, lo, MoveKind::kDelete, log)});
    return;
  }
  // Deletion m is taken at lambda iff lambda > max of the first m critical
  // values, so state m holds on (P_m, P_{m+1}].
  Cpdag state = start;
  double prev = -std::numeric_limits<double>::infinity();
  while (true) {
    auto step = best_operator_move(cache, state, MoveKind::kDelete);
    const double next = step ? std::max(prev, critical_lambda(step->move.rho))
                             : std::numeric_limits<double>::infinity();
    const double a = std::max(lo, prev);
    const double b = std::min(hi, next);
    if (b > a) out.push_back({a, b, state});
    if (!step || next >= hi) break;
    prev = next;
    state = std::move(step->result);
  }
}

}  // namespace

SolutionPath solution_path(const CovarianceSource& src, double lambda_min, PathPolicy policy) {
  const Penalty penalty(lambda_min, src);
  SolutionPath path;
  path.lambda_min = penalty.lambda();
  RhoCache cache(src);

  // Forward phase at lambda_min; the greedy choice does not depend on lambda.
  std::vector<Cpdag> states{empty_cpdag(src.size())};
  while (auto step = operator_ges_step(cache, states.back(), path.lambda_min, MoveKind::kInsert)) {
    path.forward_moves.push_back(step->move);
    path.forward_critical.push_back(critical_lambda(step->move.rho));
    states.push_back(std::move(step->result));
  }

  // State k holds for lambda in [M_{k+1}, M_k), M_k the prefix minimum of the
  // critical values, M_0 = inf; the last state extends down to lambda_min.
  const std::size_t n_states = states.size();
  std::vector<double> upper(n_states);
  upper[0] = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n_states; ++k) upper[k] = std::min(upper[k - 1], path.forward_critical[k - 1]);

  std::vector<PathPiece> raw;
  for (std::size_t k = n_states; k-- > 0;) {
    const double hi = upper[k];
    const double lo = k + 1 < n_states ? upper[k + 1] : path.lambda_min;
    if (!(hi > lo)) continue;
    path.forward_outputs.push_back({lo, hi, states[k]});
    backward_pieces(cache, states[k], lo, hi, policy, raw);
  }

  for (auto& piece : raw) {
    if (piece.hi - piece.lo < kBreakpointMerge && !std::isinf(piece.hi)) continue;
    if (!path.pieces.empty() && path.pieces.back().cpdag == piece.cpdag) {
      path.pieces.back().hi = piece.hi;
    } else {
      path.pieces.push_back(std::move(piece));
    }
  }
  if (!path.pieces.empty()) path.pieces.front().lo = path.lambda_min;

  for (const auto& piece : path.pieces) {
    const bool seen = std::any_of(path.entries.begin(), path.entries.end(),
                                  [&](const PathEntry& e) { return e.cpdag == piece.cpdag; });
    if (!seen) path.entries.push_back({piece.lo, piece.cpdag});
  }
  return path;
}

}  // namespace ages
