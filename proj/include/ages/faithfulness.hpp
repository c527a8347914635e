#pragma once

#include <limits>
#include <vector>

#include "ages/aggregate.hpp"
#include "ages/graph.hpp"
#include "ages/sem.hpp"

namespace ages {

struct FaithfulnessViolation {
  VertexId i, j;
  VertexSet s;
  double abs_rho;
  double delta;  // required lower bound, not met
  int stage = 0;  // path position for path checks, 0 otherwise
};

struct FaithfulnessReport {
  bool holds = true;
  std::vector<FaithfulnessViolation> violations;
  // Number of d-connected triples whose partial correlation was compared.
  long triples_checked = 0;
  // Smallest | |rho| - delta | over the compared triples, ties excluded.
  double min_margin = std::numeric_limits<double>::infinity();

  void merge(const FaithfulnessReport& other);
};

// |rho| within this distance of delta counts as equal, which violates the
// strict inequality. The breakpoints of a solution path put some partial
// correlation exactly at delta, so exact ties are common, not accidental.
inline constexpr double kFaithfulnessTie = 1e-12;

// Exhaustive checks are refused above this many vertices.
inline constexpr int kMaxFaithfulnessVertices = 12;

// |rho(i, j | S)| > delta for every (i, j, S) that is d-connected in g.
FaithfulnessReport strong_faithful(const CovarianceSource& src, const Dag& g, double delta);

// Strong faithfulness with respect to each sub-DAG G_i of the true DAG
// restricted to a kept path skeleton, at delta_i = delta_of_lambda(lambda_i),
// for every kept entry after the first.
FaithfulnessReport path_strong_faithfulness(const WeightedSem& m, PathPolicy policy = PathPolicy::kExact);

// The weaker condition that only looks at triples GES actually scores when run
// at critical_lambda(delta): (i, j, S) with S a parent set of j in some member
// of the forward-phase class, i a non-descendant of j there and not adjacent
// to j; plus the conditioning sets of the backward-phase deletions.
FaithfulnessReport ages_strong_faithful(const CovarianceSource& src, const Dag& g, double delta,
                                        std::size_t class_cap = 1'000'000);

enum class Region { kWhite, kGrey, kBlack, kIndeterminate };

const char* region_name(Region r);

struct RegionCell {
  double b13 = 0.0, b23 = 0.0;
  Region region = Region::kIndeterminate;
  Apdag a0;
  Apdag a_oracle;
  bool path_faithful = false;
  double margin = 0.0;
};

struct RegionGrid {
  int resolution = 81;
  double lo = -2.0, hi = 2.0;
  double b12 = 0.1;
};

// Margins below this are not trusted for classification.
inline constexpr double kRegionMarginTolerance = 1e-9;

// The three-vertex family X1 -> X2 (b12), X1 -> X3 (b13), X2 -> X3 (b23), D = I.
WeightedSem region_sem(double b12, double b13, double b23);

RegionCell region_cell(double b12, double b13, double b23);

// Cells in row-major order of (b13, b23). jobs = 0 uses all hardware threads.
std::vector<RegionCell> region_map(const RegionGrid& grid = {}, int jobs = 0);

}  // namespace ages
