#pragma once

#include <optional>
#include <vector>

#include "ages/ges.hpp"
#include "ages/graph.hpp"
#include "ages/sem.hpp"

namespace ages {

// Source of a directed edge in an aggregated PDAG: the position of the
// contributing CPDAG in the aggregated list, or kMeekSource.
inline constexpr int kMeekSource = -1;

struct EdgeProvenance {
  Edge edge;  // (from, to)
  int source;
  bool operator==(const EdgeProvenance&) const = default;
};

struct AggregationDiagnostics {
  // Edges oriented one way in P and the other way in a later CPDAG.
  int conflicts_skipped = 0;
  // Positions whose orientations were dropped because P was not extendible.
  std::vector<int> rejected;
};

struct Apdag {
  Pdag pdag;
  std::vector<EdgeProvenance> provenance;  // one per directed edge, lexicographic
  AggregationDiagnostics diagnostics;

  const MixedGraph& graph() const { return pdag.graph(); }
};

// Starts from cs[0]; each later CPDAG orients the edges that are undirected so
// far, committed only if the result still extends to a DAG. Meek closure at
// the end. Edges of cs[i] that are not adjacencies of cs[0] are ignored.
Apdag aggregate_cpdags(const std::vector<Cpdag>& cs);

struct AgesResult {
  Apdag apdag;
  SolutionPath path;
  std::vector<int> kept;       // path entry indices that were aggregated
  std::vector<int> discarded;  // skeleton not contained in entry 0
};

// lambda_min defaults to 0 for an oracle source and log(n)/(2n) otherwise.
double default_lambda_min(const CovarianceSource& src);

AgesResult ages_run(const CovarianceSource& src, std::optional<double> lambda_min = std::nullopt,
                    PathPolicy policy = PathPolicy::kExact);

struct TrueApdagResult {
  Apdag apdag;
  SolutionPath path;  // oracle path of the model
  std::vector<int> kept;
  std::vector<Dag> sub_dags;       // true DAG restricted to each kept skeleton
  std::vector<Cpdag> sub_cpdags;   // their CPDAGs
};

// The target A0: the oracle path filtered by skeleton containment, each kept
// CPDAG replaced by the CPDAG of the true DAG restricted to its skeleton.
TrueApdagResult true_apdag_detail(const WeightedSem& m, PathPolicy policy = PathPolicy::kExact);
Apdag true_apdag(const WeightedSem& m);

}  // namespace ages
