#include "ages/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "ages/aggregate.hpp"
#include "ages/equivalence.hpp"
#include "ages/errors.hpp"
#include "ages/ges.hpp"
#include "ages/rng.hpp"
#include "ages/score.hpp"
#include "ages/sem.hpp"
#include "parallel.hpp"

namespace ages {

const char* method_name(Method m) { return m == Method::kGes ? "GES" : "AGES"; }

void ExperimentConfig::validate() const {
  if (p < 1 || p > 64) throw ConfigError("p must lie in [1, 64]");
  if (n < 2) throw ConfigError("n must be at least 2");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (q_strong < 0 || q_weak < 0 || q_strong + q_weak > 1.0) throw ConfigError("need q_s, q_w >= 0 and q_s + q_w <= 1");
  if (lambda_policy == LambdaPolicy::kGrid && lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  for (double l : lambdas()) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda must be finite and non-negative");
  }
}

std::vector<double> ExperimentConfig::lambdas() const {
  switch (lambda_policy) {
    case LambdaPolicy::kBic: return {bic_lambda(n)};
    case LambdaPolicy::kFixed: return {lambda};
    case LambdaPolicy::kGrid: return lambda_grid;
  }
  return {};
}

PrecisionRecall orientation_precision_recall(const MixedGraph& estimate, const Dag& truth) {
  if (estimate.size() != truth.size()) throw PreconditionError("estimate and truth differ in size");
  PrecisionRecall pr;
  const auto est = estimate.directed_edges();
  pr.estimated_directed = static_cast<int>(est.size());
  pr.true_edges = truth.graph().num_edges();
  for (const auto& [a, b] : est) pr.correct += truth.graph().has_directed(a, b);
  if (pr.estimated_directed > 0) pr.precision = static_cast<double>(pr.correct) / pr.estimated_directed;
  if (pr.true_edges > 0) pr.recall = static_cast<double>(pr.correct) / pr.true_edges;
  return pr;
}

MetricSummary summarize(Method method, double lambda, const std::string& metric,
                        const std::vector<std::optional<double>>& values) {
  MetricSummary s;
  s.method = method;
  s.lambda = lambda;
  s.metric = metric;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) {
      ++s.n_undefined;
      continue;
    }
    ++s.n_defined;
    sum += *v;
  }
  if (s.n_defined == 0) {
    s.mean = std::nan("");
    s.sem = std::nan("");
    return s;
  }
  s.mean = sum / s.n_defined;
  double ss = 0.0;
  for (const auto& v : values)
    if (v) ss += (*v - s.mean) * (*v - s.mean);
  s.sem = s.n_defined > 1 ? std::sqrt(ss / (s.n_defined - 1)) / std::sqrt(static_cast<double>(s.n_defined)) : 0.0;
  return s;
}

namespace {

SemGenConfig sem_config(const ExperimentConfig& cfg) {
  SemGenConfig g;
  g.p = cfg.p;
  g.q_strong = cfg.q_strong;
  g.q_weak = cfg.q_weak;
  return g;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct ReplicateOutput {
  std::vector<MetricsRecord> records;
  bool skipped = false;
};

ReplicateOutput run_replicate(const ExperimentConfig& cfg, int rep) {
  ReplicateOutput out;
  Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(rep));
  const WeightedSem m = random_sem(sem_config(cfg), rng);
  try {
    const SampleResult sample = sample_data(m, cfg.n, rng);
    for (double lambda : cfg.lambdas()) {
      auto t0 = std::chrono::steady_clock::now();
      const GesResult ges = ges_run(sample.covariance, lambda);
      const double ges_ms = elapsed_ms(t0);
      t0 = std::chrono::steady_clock::now();
      const AgesResult ages = ages_run(sample.covariance, lambda);
      const double ages_ms = elapsed_ms(t0);

      MetricsRecord g;
      g.replicate = rep;
      g.method = Method::kGes;
      g.lambda = lambda;
      g.metrics = orientation_precision_recall(ges.cpdag.graph(), m.dag());
      g.estimated_undirected = ges.cpdag.graph().num_undirected();
      g.runtime_ms = ges_ms;
      MetricsRecord a = g;
      a.method = Method::kAges;
      a.metrics = orientation_precision_recall(ages.apdag.graph(), m.dag());
      a.estimated_undirected = ages.apdag.graph().num_undirected();
      a.runtime_ms = ages_ms;
      out.records.push_back(g);
      out.records.push_back(a);
    }
  } catch (const SingularError&) {
    out.records.clear();
    out.skipped = true;
  }
  return out;
}

std::pair<double, double> mean_sem(const std::vector<double>& xs) {
  std::vector<std::optional<double>> v(xs.begin(), xs.end());
  const MetricSummary s = summarize(Method::kGes, 0.0, "", v);
  return {s.mean, s.sem};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ReplicateOutput> outs(cfg.replicates);
  detail::parallel_for(outs.size(), cfg.jobs, [&](std::size_t r) { outs[r] = run_replicate(cfg, static_cast<int>(r)); });

  ExperimentResult res;
  for (int r = 0; r < cfg.replicates; ++r) {
    if (outs[r].skipped) res.skipped.push_back(r);
    for (auto& rec : outs[r].records) res.records.push_back(std::move(rec));
  }
  for (double lambda : cfg.lambdas()) {
    for (Method method : {Method::kGes, Method::kAges}) {
      std::vector<std::optional<double>> prec, rec;
      for (const auto& r : res.records) {
        if (r.method != method || r.lambda != lambda) continue;
        prec.push_back(r.metrics.precision);
        rec.push_back(r.metrics.recall);
      }
      res.summary.push_back(summarize(method, lambda, "precision", prec));
      res.summary.push_back(summarize(method, lambda, "recall", rec));
    }
  }
  return res;
}

PathCorrectnessResult path_correctness_rates(const ExperimentConfig& cfg) {
  cfg.validate();
  PathCorrectnessResult res;
  res.records.resize(cfg.replicates);
  detail::parallel_for(res.records.size(), cfg.jobs, [&](std::size_t r) {
    Rng rng = Rng::substream(cfg.seed, r);
    const WeightedSem m = random_sem(sem_config(cfg), rng);
    const TrueApdagResult target = true_apdag_detail(m);
    PathCorrectnessRecord out;
    out.replicate = static_cast<int>(r);

    int equal = 0;
    for (std::size_t k = 0; k < target.kept.size(); ++k)
      equal += target.path.entries[target.kept[k]].cpdag == target.sub_cpdags[k];
    out.cpdag_rate = static_cast<double>(equal) / target.kept.size();

    std::vector<Cpdag> cs;
    for (int k : target.kept) cs.push_back(target.path.entries[k].cpdag);
    const MixedGraph a = aggregate_cpdags(cs).graph();
    const MixedGraph& a0 = target.apdag.graph();
    const auto oriented = a.directed_edges();
    out.oriented_edges = static_cast<int>(oriented.size());
    int match = 0;
    for (const auto& [x, y] : oriented) match += a0.has_directed(x, y);
    out.orientation_rate = oriented.empty() ? 1.0 : static_cast<double>(match) / oriented.size();
    res.records[r] = out;
  });

  std::vector<double> c, o;
  for (const auto& r : res.records) {
    c.push_back(r.cpdag_rate);
    o.push_back(r.orientation_rate);
  }
  std::tie(res.mean_cpdag_rate, res.sem_cpdag_rate) = mean_sem(c);
  std::tie(res.mean_orientation_rate, res.sem_orientation_rate) = mean_sem(o);
  return res;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : "NA"; }

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<MetricsRecord>& records, bool timing) {
  out << "replicate,method,lambda,precision,recall,correct,estimated_directed,estimated_undirected,true_edges";
  if (timing) out << ",runtime_ms";
  out << '\n';
  for (const auto& r : records) {
    out << r.replicate << ',' << method_name(r.method) << ',' << num(r.lambda) << ',' << num(r.metrics.precision) << ','
        << num(r.metrics.recall) << ',' << r.metrics.correct << ',' << r.metrics.estimated_directed << ','
        << r.estimated_undirected << ',' << r.metrics.true_edges;
    if (timing) out << ',' << num(r.runtime_ms);
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<MetricSummary>& summary) {
  out << "method,metric,mean,sem,n_defined,lambda,n_undefined\n";
  for (const auto& s : summary) {
    out << method_name(s.method) << ',' << s.metric << ',' << num(s.mean) << ',' << num(s.sem) << ',' << s.n_defined
        << ',' << num(s.lambda) << ',' << s.n_undefined << '\n';
  }
}

}  // namespace ages
