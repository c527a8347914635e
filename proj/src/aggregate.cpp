#include "ages/aggregate.hpp"

#include <algorithm>
#include <map>

#include "ages/equivalence.hpp"
#include "ages/errors.hpp"
#include "ages/score.hpp"

namespace ages {

Apdag aggregate_cpdags(const std::vector<Cpdag>& cs) {
  if (cs.empty()) throw PreconditionError("nothing to aggregate");
  const int p = cs.front().size();
  for (const auto& c : cs) {
    if (c.size() != p) throw PreconditionError("CPDAGs must share the vertex set");
  }

  Apdag out;
  std::map<Edge, int> source;
  MixedGraph a = cs.front().graph();
  for (const auto& e : a.directed_edges()) source[e] = 0;

  for (int idx = 1; idx < static_cast<int>(cs.size()); ++idx) {
    MixedGraph work = a;
    std::vector<Edge> added;
    for (const auto& [from, to] : cs[idx].graph().directed_edges()) {
      if (work.has_undirected(from, to)) {
        work.add_directed(from, to);
        added.push_back({from, to});
      } else if (work.has_directed(to, from)) {
        ++out.diagnostics.conflicts_skipped;
      }
    }
    if (added.empty()) continue;
    if (!consistent_extension(work)) {
      out.diagnostics.rejected.push_back(idx);
      continue;
    }
    a = std::move(work);
    for (const auto& e : added) source[e] = idx;
  }

  a = meek_closure(std::move(a));
  for (const auto& e : a.directed_edges()) {
    const auto it = source.find(e);
    out.provenance.push_back({e, it == source.end() ? kMeekSource : it->second});
  }
  out.pdag = Pdag::from_graph(std::move(a));
  return out;
}

double default_lambda_min(const CovarianceSource& src) {
  if (auto n = src.sample_size()) return bic_lambda(*n);
  return 0.0;
}

namespace {

void filter_entries(const SolutionPath& path, std::vector<int>& kept, std::vector<int>& discarded) {
  const MixedGraph& base = path.entries.front().cpdag.graph();
  for (int i = 0; i < static_cast<int>(path.entries.size()); ++i) {
    if (skeleton_subset(path.entries[i].cpdag.graph(), base)) {
      kept.push_back(i);
    } else {
      discarded.push_back(i);
    }
  }
}

}  // namespace

AgesResult ages_run(const CovarianceSource& src, std::optional<double> lambda_min, PathPolicy policy) {
  AgesResult out;
  out.path = solution_path(src, lambda_min.value_or(default_lambda_min(src)), policy);
  filter_entries(out.path, out.kept, out.discarded);
  std::vector<Cpdag> cs;
  for (int i : out.kept) cs.push_back(out.path.entries[i].cpdag);
  out.apdag = aggregate_cpdags(cs);
  return out;
}

TrueApdagResult true_apdag_detail(const WeightedSem& m, PathPolicy policy) {
  TrueApdagResult out;
  out.path = solution_path(true_covariance(m), 0.0, policy);
  std::vector<int> discarded;
  filter_entries(out.path, out.kept, discarded);
  for (int i : out.kept) {
    out.sub_dags.push_back(restrict_to_skeleton(m.dag(), out.path.entries[i].cpdag.graph()));
    out.sub_cpdags.push_back(cpdag_of(out.sub_dags.back()));
  }
  out.apdag = aggregate_cpdags(out.sub_cpdags);
  return out;
}

Apdag true_apdag(const WeightedSem& m) { return true_apdag_detail(m).apdag; }

}  // namespace ages
