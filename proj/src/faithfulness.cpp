#include "ages/faithfulness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "ages/equivalence.hpp"
#include "ages/errors.hpp"
#include "ages/ges.hpp"
#include "ages/score.hpp"
#include "parallel.hpp"

namespace ages {

void FaithfulnessReport::merge(const FaithfulnessReport& other) {
  holds = holds && other.holds;
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  triples_checked += other.triples_checked;
  min_margin = std::min(min_margin, other.min_margin);
}

namespace {

void check_triple(const CovarianceSource& src, const Dag& g, VertexId i, VertexId j, const VertexSet& s,
                  double delta, int stage, FaithfulnessReport& rep) {
  if (d_separated(g, i, j, s)) return;
  const double r = std::abs(partial_correlation(src, i, j, s));
  ++rep.triples_checked;
  const double diff = r - delta;
  if (diff > kFaithfulnessTie) {
    rep.min_margin = std::min(rep.min_margin, diff);
    return;
  }
  if (diff < -kFaithfulnessTie) rep.min_margin = std::min(rep.min_margin, -diff);
  rep.holds = false;
  rep.violations.push_back({i, j, s, r, delta, stage});
}

FaithfulnessReport exhaustive(const CovarianceSource& src, const Dag& g, double delta, int stage) {
  const int p = g.size();
  if (p != src.size()) throw PreconditionError("graph and covariance differ in size");
  if (p > kMaxFaithfulnessVertices) throw PreconditionError("exhaustive faithfulness check limited to 12 vertices");
  FaithfulnessReport rep;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      std::vector<int> rest;
      for (int v = 0; v < p; ++v)
        if (v != i && v != j) rest.push_back(v);
      for (unsigned m = 0; m < (1u << rest.size()); ++m) {
        VertexSet s;
        for (std::size_t b = 0; b < rest.size(); ++b)
          if (m >> b & 1) s.push_back(rest[b]);
        check_triple(src, g, i, j, s, delta, stage, rep);
      }
    }
  }
  return rep;
}

}  // namespace

FaithfulnessReport strong_faithful(const CovarianceSource& src, const Dag& g, double delta) {
  return exhaustive(src, g, delta, 0);
}

FaithfulnessReport path_strong_faithfulness(const WeightedSem& m, PathPolicy policy) {
  const TrueApdagResult t = true_apdag_detail(m, policy);
  const CovarianceSource src = true_covariance(m);
  FaithfulnessReport rep;
  for (std::size_t k = 1; k < t.kept.size(); ++k) {
    const double delta = delta_of_lambda(t.path.entries[t.kept[k]].lambda);
    rep.merge(exhaustive(src, t.sub_dags[k], delta, static_cast<int>(k)));
  }
  return rep;
}

FaithfulnessReport ages_strong_faithful(const CovarianceSource& src, const Dag& g, double delta,
                                        std::size_t class_cap) {
  if (g.size() != src.size()) throw PreconditionError("graph and covariance differ in size");
  if (delta < 0.0 || delta >= 1.0) throw DomainError("delta must lie in [0, 1)");
  const GesResult run = ges_run(src, critical_lambda(delta));

  std::set<std::tuple<VertexId, VertexId, VertexSet>> triples;
  const MixedGraph& fwd = run.forward.graph();
  for (const Dag& member : enumerate_markov_class(run.forward, class_cap)) {
    for (VertexId j = 0; j < g.size(); ++j) {
      const VertexSet pa = member.graph().parents(j);
      const VertexSet desc = descendants(member.graph(), j);
      for (VertexId i = 0; i < g.size(); ++i) {
        if (i == j || fwd.adjacent(i, j) || contains(desc, i)) continue;
        triples.insert({std::min(i, j), std::max(i, j), pa});
      }
    }
  }
  for (const auto& mv : run.backward_moves) triples.insert({std::min(mv.i, mv.j), std::max(mv.i, mv.j), mv.cond});

  FaithfulnessReport rep;
  for (const auto& [i, j, s] : triples) check_triple(src, g, i, j, s, delta, 0, rep);
  return rep;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::kWhite: return "white";
    case Region::kGrey: return "grey";
    case Region::kBlack: return "black";
    case Region::kIndeterminate: return "indeterminate";
  }
  return "?";
}

WeightedSem region_sem(double b12, double b13, double b23) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b(0, 1) = b12;
  b(0, 2) = b13;
  b(1, 2) = b23;
  return WeightedSem(b, Eigen::VectorXd::Ones(3));
}

RegionCell region_cell(double b12, double b13, double b23) {
  const WeightedSem m = region_sem(b12, b13, b23);
  const CovarianceSource src = true_covariance(m);
  RegionCell cell;
  cell.b13 = b13;
  cell.b23 = b23;
  cell.a0 = true_apdag(m);
  cell.a_oracle = ages_run(src).apdag;

  const FaithfulnessReport psf = path_strong_faithfulness(m);
  const FaithfulnessReport classical = strong_faithful(src, m.dag(), 0.0);
  cell.path_faithful = psf.holds;
  cell.margin = std::min(psf.min_margin, classical.min_margin);

  MixedGraph informative(3);
  informative.add_undirected(0, 1);
  informative.add_directed(0, 2);
  informative.add_directed(1, 2);

  // Exact cancellations make G(B) unfaithful; the three-way split assumes a
  // perfect map, so such cells are left unclassified together with cells too
  // close to a boundary.
  if (!classical.holds || cell.margin < kRegionMarginTolerance) {
    cell.region = Region::kIndeterminate;
  } else if (!psf.holds) {
    cell.region = Region::kBlack;
  } else if (cell.a0.graph() == informative) {
    cell.region = Region::kWhite;
  } else {
    cell.region = Region::kGrey;
  }
  return cell;
}

std::vector<RegionCell> region_map(const RegionGrid& grid, int jobs) {
  if (grid.resolution < 2) throw ConfigError("region grid needs at least 2 points per axis");
  if (!(grid.hi > grid.lo)) throw ConfigError("region grid range is empty");
  const int r = grid.resolution;
  // Integer-based coordinates so that symmetric points are exact negatives.
  const auto coord = [&](int k) {
    const int mid2 = r - 1;  // twice the centre index
    if (grid.lo == -grid.hi) return (2 * k - mid2) * (grid.hi - grid.lo) / (2.0 * mid2);
    return grid.lo + k * (grid.hi - grid.lo) / mid2;
  };

  std::vector<RegionCell> cells(static_cast<std::size_t>(r) * r);
  detail::parallel_for(cells.size(), jobs, [&](std::size_t idx) {
    cells[idx] = region_cell(grid.b12, coord(static_cast<int>(idx / r)), coord(static_cast<int>(idx % r)));
  });
  return cells;
}

}  // namespace ages
