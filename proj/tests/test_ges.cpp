#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ages/equivalence.hpp"
#include "ages/errors.hpp"
#include "ages/ges.hpp"
#include "ages/rng.hpp"
#include "ages/score.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ages;
using doctest::Approx;

namespace {

Cpdag empty_cpdag(int p) { return cpdag_of(Dag::from_graph(MixedGraph(p))); }

Cpdag cpdag(const MixedGraph& g) { return Cpdag::from_graph(g); }

// Compares the operator and enumeration generators on one state. Returns the
// number of disagreements.
int compare_generators(const CovarianceSource& src, RhoCache& cache, const Cpdag& c, MoveKind kind) {
  const auto op = best_operator_move(cache, c, kind);
  const auto cm = best_conceptual_move(src, c, kind);
  if (op.has_value() != cm.has_value()) return 1;
  if (!op) return 0;
  int bad = 0;
  bad += op->move.i != cm->move.i || op->move.j != cm->move.j;
  bad += std::abs(std::abs(op->move.rho) - std::abs(cm->move.rho)) > 1e-10;
  bad += !(op->result == cm->result);
  return bad;
}

}  // namespace

TEST_CASE("conceptual step examples") {
  const CovarianceSource src = true_covariance(fixture::weak_link());
  const auto step = conceptual_ges_step(src, empty_cpdag(3), 0.0, MoveKind::kInsert);
  REQUIRE(step);
  CHECK(step->move.i == 1);
  CHECK(step->move.j == 2);
  CHECK(std::abs(step->move.rho) == Approx(1.11 / std::sqrt(1.01 * 3.21)).epsilon(1e-12));
  CHECK(std::abs(step->move.rho) == Approx(0.6163).epsilon(5e-4));
  CHECK(step->move.score_delta < 0.0);
  CHECK(step->result.graph() == fixture::graph(3, "1--2"));

  CHECK_FALSE(conceptual_ges_step(src, cpdag(fixture::triangle_cpdag()), 0.0, MoveKind::kInsert));
  CHECK_FALSE(conceptual_ges_step(src, empty_cpdag(3), 0.0, MoveKind::kDelete));
  // Too large a penalty: the best move exists but is rejected.
  CHECK(best_conceptual_move(src, empty_cpdag(3), MoveKind::kInsert));
  CHECK_FALSE(conceptual_ges_step(src, empty_cpdag(3), 1.0, MoveKind::kInsert));
}

TEST_CASE("operator step agrees with the conceptual step on the worked examples") {
  for (const auto& m : {fixture::weak_link(), fixture::weak_parent(), fixture::four_node(), fixture::faithfulness_gap()}) {
    const CovarianceSource src = true_covariance(m);
    RhoCache cache(src);
    Cpdag c = empty_cpdag(m.size());
    std::vector<Cpdag> states{c};
    while (auto s = best_operator_move(cache, c, MoveKind::kInsert)) {
      if (!accepts(MoveKind::kInsert, s->move.rho, 0.0)) break;
      c = s->result;
      states.push_back(c);
    }
    for (const auto& st : states) {
      CHECK(compare_generators(src, cache, st, MoveKind::kInsert) == 0);
      CHECK(compare_generators(src, cache, st, MoveKind::kDelete) == 0);
    }
  }
}

TEST_CASE("accepting a move needs a strict improvement") {
  const double rho = 0.3;
  const double lc = critical_lambda(rho);
  CHECK(accepts(MoveKind::kInsert, rho, std::nextafter(lc, 0.0)));
  CHECK_FALSE(accepts(MoveKind::kInsert, rho, lc));
  CHECK_FALSE(accepts(MoveKind::kDelete, rho, lc));
  CHECK(accepts(MoveKind::kDelete, rho, std::nextafter(lc, 1.0)));
  CHECK_FALSE(accepts(MoveKind::kInsert, 0.0, 0.0));
  CHECK_FALSE(accepts(MoveKind::kDelete, 0.0, 0.0));
}

TEST_CASE("ges_run examples") {
  const CovarianceSource e1 = true_covariance(fixture::weak_link());
  CHECK(ges_run(e1, 1e-10).cpdag.graph() == fixture::triangle_cpdag());
  CHECK(ges_run(e1, 0.01).cpdag.graph() == fixture::collider_3());
  const double max_marginal = critical_lambda(partial_correlation(e1, 1, 2, {}));
  CHECK(ges_run(e1, max_marginal).cpdag.graph() == MixedGraph(3));
  // Once 1 -- 2 is in, 0 -> 2 <- 1 follows and survives the backward phase.
  CHECK(ges_run(e1, std::nextafter(max_marginal, 0.0)).cpdag.graph() == fixture::collider_3());

  const CovarianceSource e3 = true_covariance(fixture::four_node());
  CHECK(ges_run(e3, 0.02).cpdag.graph() == fixture::four_c3());

  CHECK_THROWS_AS(ges_run(e1, -1.0), DomainError);
  const auto sample = CovarianceSource::sample(e1.sigma(), 100);
  CHECK_THROWS_AS(ges_run(sample, 0.0), DomainError);
  CHECK_NOTHROW(ges_run(sample, bic_lambda(100L)));
}

TEST_CASE("move log records penalized score changes") {
  const CovarianceSource src = true_covariance(fixture::four_node());
  const double lambda = 0.004;
  const GesResult r = ges_run(src, lambda);
  CHECK_FALSE(r.forward_moves.empty());
  for (const auto& m : r.forward_moves) {
    CHECK(m.kind == MoveKind::kInsert);
    CHECK(m.score_delta == 0.5 * std::log1p(-m.rho * m.rho) + lambda);
    CHECK(m.rho == partial_correlation(src, m.i, m.j, m.cond));
    CHECK(m.score_delta < 0.0);
  }
  for (const auto& m : r.backward_moves) {
    CHECK(m.kind == MoveKind::kDelete);
    CHECK(m.score_delta < 0.0);
  }
  // Identical input, identical log.
  const GesResult again = ges_run(src, lambda);
  REQUIRE(again.forward_moves.size() == r.forward_moves.size());
  for (std::size_t k = 0; k < r.forward_moves.size(); ++k) {
    CHECK(again.forward_moves[k].i == r.forward_moves[k].i);
    CHECK(again.forward_moves[k].j == r.forward_moves[k].j);
    CHECK(again.forward_moves[k].cond == r.forward_moves[k].cond);
    CHECK(again.forward_moves[k].rho == r.forward_moves[k].rho);
  }
}

TEST_CASE("operator and conceptual generators agree on random oracle SEMs") {
  Rng rng(2024);
  int states = 0, mismatches = 0;
  for (int t = 0; t < 60; ++t) {
    SemGenConfig cfg;
    cfg.p = 3 + static_cast<int>(rng.index(3));
    cfg.q_strong = 0.3 + 0.3 * rng.uniform();
    cfg.q_weak = 0.3;
    cfg.seed = rng.next();
    cfg.permute = true;
    const CovarianceSource src = true_covariance(random_sem(cfg));
    const SolutionPath path = solution_path(src, 0.0);
    RhoCache cache(src);
    for (const auto& piece : path.pieces) {
      ++states;
      mismatches += compare_generators(src, cache, piece.cpdag, MoveKind::kInsert);
      mismatches += compare_generators(src, cache, piece.cpdag, MoveKind::kDelete);
    }
    for (const auto& f : path.forward_outputs) {
      ++states;
      mismatches += compare_generators(src, cache, f.cpdag, MoveKind::kDelete);
    }
  }
  CHECK(states > 100);
  CHECK(mismatches == 0);
}

TEST_CASE("four-vertex solution path") {
  const SolutionPath path = solution_path(true_covariance(fixture::four_node()), 0.0);
  REQUIRE(path.entries.size() == 7);
  CHECK(path.entries[0].lambda == 0.0);
  CHECK(path.entries[0].cpdag.graph() == fixture::four_cpdag());
  CHECK(path.entries[2].cpdag.graph() == fixture::four_c2());
  CHECK(path.entries[3].cpdag.graph() == fixture::four_c3());
  CHECK(path.entries[4].cpdag.graph() == fixture::four_c4());
  CHECK(path.entries[5].cpdag.graph() == fixture::four_c5());
  CHECK(path.entries[6].cpdag.graph() == MixedGraph(4));
  // The second entry follows from the ordering of two close partial
  // correlations; X1 -- X2 (|rho| = 0.0913 given X4) enters before X3 -- X4
  // (|rho| = 0.0863 given X1, X2).
  CHECK(path.entries[1].cpdag.graph() == fixture::graph(4, "0--1;0--2;0--3;1--2;1--3"));
  for (std::size_t k = 1; k < path.entries.size(); ++k) CHECK(path.entries[k].lambda > path.entries[k - 1].lambda);
}

TEST_CASE("solution path basics") {
  const CovarianceSource diag =
      true_covariance(WeightedSem(Eigen::MatrixXd::Zero(4, 4), Eigen::VectorXd::Ones(4)));
  const SolutionPath p0 = solution_path(diag, 0.0);
  REQUIRE(p0.entries.size() == 1);
  CHECK(p0.entries[0].cpdag.graph() == MixedGraph(4));

  const SolutionPath p1 = solution_path(true_covariance(fixture::weak_link()), 0.0);
  bool has_b = false, has_c = false;
  for (const auto& e : p1.entries) {
    has_b = has_b || e.cpdag.graph() == fixture::triangle_cpdag();
    has_c = has_c || e.cpdag.graph() == fixture::collider_3();
  }
  CHECK(has_b);
  CHECK(has_c);
  CHECK(p1.entries.front().cpdag.graph() == fixture::triangle_cpdag());
}

TEST_CASE("path properties on random SEMs") {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    SemGenConfig cfg;
    cfg.p = 3 + static_cast<int>(rng.index(4));
    cfg.seed = rng.next();
    cfg.permute = rng.uniform() < 0.5;
    const WeightedSem m = random_sem(cfg);
    const bool oracle_mode = rng.uniform() < 0.5;
    const CovarianceSource src = oracle_mode ? true_covariance(m) : sample_data(m, 500, rng.next()).covariance;
    const double lambda_min = oracle_mode ? 0.0 : bic_lambda(500L);
    const SolutionPath path = solution_path(src, lambda_min);

    REQUIRE_FALSE(path.entries.empty());
    CHECK(path.entries.front().lambda == lambda_min);
    CHECK(path.entries.back().cpdag.graph() == MixedGraph(cfg.p));
    for (std::size_t k = 1; k < path.entries.size(); ++k) {
      CHECK(path.entries[k].lambda > path.entries[k - 1].lambda);
      for (std::size_t l = 0; l < k; ++l) CHECK_FALSE(path.entries[k].cpdag == path.entries[l].cpdag);
    }
    // Forward outputs are nested.
    for (std::size_t k = 1; k < path.forward_outputs.size(); ++k) {
      CHECK(skeleton_subset(path.forward_outputs[k].cpdag.graph(), path.forward_outputs[k - 1].cpdag.graph()));
      CHECK(path.forward_outputs[k].lo >= path.forward_outputs[k - 1].hi);
    }
    // Direct runs agree with the path away from breakpoints.
    for (std::size_t k = 0; k < path.pieces.size(); ++k) {
      const auto& piece = path.pieces[k];
      std::vector<double> probes;
      if (std::isinf(piece.hi)) {
        probes = {piece.lo + 1e-6, piece.lo + 1.0};
      } else if (piece.hi - piece.lo > 1e-9) {
        probes = {piece.lo + 0.5 * (piece.hi - piece.lo)};
        if (k == 0 && piece.lo > 0.0) probes.push_back(piece.lo);
      }
      for (double lam : probes) CHECK(ges_run(src, lam).cpdag == path.at(lam));
    }
    // The first entry is GES just above lambda_min.
    if (path.pieces.front().hi - lambda_min > 1e-9) {
      CHECK(ges_run(src, lambda_min + 1e-10).cpdag == path.entries.front().cpdag);
    }
  }
}

TEST_CASE("oracle GES recovers the true CPDAG as lambda goes to zero") {
  Rng rng(31);
  int recovered = 0;
  const int runs = 60;
  for (int t = 0; t < runs; ++t) {
    SemGenConfig cfg;
    cfg.p = 3 + static_cast<int>(rng.index(3));
    cfg.q_strong = 0.4;
    cfg.q_weak = 0.3;
    cfg.seed = rng.next();
    cfg.permute = true;
    const WeightedSem m = random_sem(cfg);
    const CovarianceSource src = true_covariance(m);
    const Cpdag truth = cpdag_of(m.dag());
    const SolutionPath path = solution_path(src, 0.0);
    recovered += path.entries.front().cpdag == truth;
    CHECK(ges_run(src, 1e-12).cpdag == truth);
  }
  CHECK(recovered == runs);
}

TEST_CASE("lower-endpoint policy") {
  const CovarianceSource e3 = true_covariance(fixture::four_node());
  const SolutionPath lower = solution_path(e3, 0.0, PathPolicy::kLowerEndpoint);
  // At exactly lambda = 0 a zero partial correlation is not deleted, so the
  // first entry keeps the spurious X2 -- X4 edge.
  CHECK(lower.entries.front().cpdag == ges_run(e3, 0.0).cpdag);
  CHECK(lower.entries.front().cpdag.graph().num_edges() == 6);
  for (std::size_t k = 1; k < lower.entries.size(); ++k) CHECK(lower.entries[k].lambda > lower.entries[k - 1].lambda);

  // With a sample source both policies start at the same CPDAG.
  const auto sample = sample_data(fixture::four_node(), 2000, 12).covariance;
  const double bic = bic_lambda(2000L);
  CHECK(solution_path(sample, bic).entries.front().cpdag ==
        solution_path(sample, bic, PathPolicy::kLowerEndpoint).entries.front().cpdag);
}

TEST_CASE("the enumeration-based GES reproduces the four-vertex path") {
  const CovarianceSource src = true_covariance(fixture::four_node());
  const SolutionPath path = solution_path(src, 0.0);
  for (const auto& piece : path.pieces) {
    const double lam = std::isinf(piece.hi) ? piece.lo + 1.0 : 0.5 * (piece.lo + piece.hi);
    Cpdag c = empty_cpdag(4);
    while (auto s = conceptual_ges_step(src, c, lam, MoveKind::kInsert)) c = s->result;
    while (auto s = conceptual_ges_step(src, c, lam, MoveKind::kDelete)) c = s->result;
    CHECK(c == piece.cpdag);
  }
}
