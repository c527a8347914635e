#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ages/graph.hpp"
#include "ages/sem.hpp"

namespace ages {

enum class MoveKind : int { kInsert = 0, kDelete = 1 };

// One GES step. For an insertion the edge i -> j is added and `cond` is the
// parent set of j it is scored against; for a deletion the edge between i and
// j (taken as i -> j) is removed and `cond` is Pa(j) \ {i} afterwards.
struct GesMove {
  MoveKind kind = MoveKind::kInsert;
  VertexId i = -1, j = -1;
  VertexSet cond;
  double rho = 0.0;
  // Change in penalized score; negative means the move improves the score.
  double score_delta = 0.0;
  // T of Insert(i, j, T) or H of Delete(i, j, H). Empty for moves produced
  // by the class-enumeration generator.
  VertexSet op_set;
};

struct GesStep {
  GesMove move;
  Cpdag result;
};

// Moves whose |rho| lies within this distance of the best are ties, resolved
// by the smallest (i, j, cond).
inline constexpr double kTieTolerance = 1e-12;

// Memoized partial correlations for one covariance source. Conditioning sets
// are stored as bitmasks, so p is limited to 64.
class RhoCache {
 public:
  explicit RhoCache(const CovarianceSource& src);
  double rho(VertexId i, VertexId j, std::uint64_t cond_mask);
  double rho(VertexId i, VertexId j, const VertexSet& cond);
  const CovarianceSource& source() const { return *src_; }

 private:
  struct Key {
    std::uint64_t mask;
    std::uint32_t pair;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return static_cast<std::size_t>(k.mask * 0x9e3779b97f4a7c15ULL ^ (k.pair + 0x632be59bd9b4e019ULL));
    }
  };
  const CovarianceSource* src_;
  std::unordered_map<Key, double, KeyHash> cache_;
};

// Best move of the given kind among the equivalence-class operators of c,
// regardless of whether it improves the score: largest |rho| for inserts,
// smallest |rho| for deletes. nullopt when no operator is valid.
std::optional<GesStep> best_operator_move(RhoCache& cache, const Cpdag& c, MoveKind kind);

// The same choice made the slow way: enumerate every DAG in the class of c
// and every single-edge addition or deletion on it.
std::optional<GesStep> best_conceptual_move(const CovarianceSource& src, const Cpdag& c, MoveKind kind,
                                            std::size_t class_cap = 1'000'000);

// Best move at penalty lambda, or nullopt if it does not strictly improve.
std::optional<GesStep> operator_ges_step(RhoCache& cache, const Cpdag& c, double lambda, MoveKind kind);
std::optional<GesStep> conceptual_ges_step(const CovarianceSource& src, const Cpdag& c, double lambda,
                                           MoveKind kind, std::size_t class_cap = 1'000'000);

// Accepting an insertion needs lambda < critical_lambda(rho); a deletion
// needs lambda > critical_lambda(rho).
bool accepts(MoveKind kind, double rho, double lambda);

struct GesResult {
  Cpdag forward;  // output of the forward phase
  Cpdag cpdag;    // final output
  std::vector<GesMove> forward_moves;
  std::vector<GesMove> backward_moves;
};

// Forward then backward phase from the empty graph. Throws DomainError for a
// negative lambda or, with a sample source, lambda below log(n)/(2n).
GesResult ges_run(const CovarianceSource& src, double lambda);

// How the backward phase is evaluated over one forward-phase interval.
enum class PathPolicy {
  // Split the interval at every lambda where the backward output changes.
  kExact,
  // Run the backward phase once at the interval's lower end.
  kLowerEndpoint,
};

struct PathEntry {
  double lambda;  // smallest lambda giving this CPDAG
  Cpdag cpdag;
};

// GES output on [lo, hi) (the first piece also includes lo = lambda_min).
struct PathPiece {
  double lo, hi;
  Cpdag cpdag;
};

struct SolutionPath {
  double lambda_min = 0.0;
  // Distinct CPDAGs in increasing lambda.
  std::vector<PathEntry> entries;
  // Disjoint lambda intervals covering [lambda_min, inf), in increasing order.
  std::vector<PathPiece> pieces;
  // Accepted insertions at lambda_min and their critical lambdas.
  std::vector<GesMove> forward_moves;
  std::vector<double> forward_critical;
  // Forward-phase states with nonempty lambda intervals, densest first.
  std::vector<PathPiece> forward_outputs;

  // GES output at lambda (>= lambda_min) according to the pieces.
  const Cpdag& at(double lambda) const;
};

// Pieces shorter than this are dropped when the path is assembled.
inline constexpr double kBreakpointMerge = 1e-12;

SolutionPath solution_path(const CovarianceSource& src, double lambda_min, PathPolicy policy = PathPolicy::kExact);

}  // namespace ages
