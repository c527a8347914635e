#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ages/graph.hpp"

namespace ages {

enum class Method { kGes, kAges };
const char* method_name(Method m);

enum class LambdaPolicy { kBic, kFixed, kGrid };

struct ExperimentConfig {
  int p = 10;
  long n = 10000;
  double q_strong = 0.3;
  double q_weak = 0.7;
  LambdaPolicy lambda_policy = LambdaPolicy::kBic;
  double lambda = 0.0;               // kFixed
  std::vector<double> lambda_grid;   // kGrid
  int replicates = 50;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: all hardware threads

  // Throws ConfigError on an invalid combination.
  void validate() const;
  // Penalties evaluated per replicate, in order.
  std::vector<double> lambdas() const;
};

struct PrecisionRecall {
  std::optional<double> precision;  // undefined without directed edges
  std::optional<double> recall;     // undefined for an empty truth
  int correct = 0;
  int estimated_directed = 0;
  int true_edges = 0;
};

// A directed edge counts as correct iff the true DAG has the same edge with
// the same direction.
PrecisionRecall orientation_precision_recall(const MixedGraph& estimate, const Dag& truth);

struct MetricsRecord {
  int replicate = 0;
  Method method = Method::kGes;
  double lambda = 0.0;
  PrecisionRecall metrics;
  int estimated_undirected = 0;
  double runtime_ms = 0.0;
};

struct MetricSummary {
  Method method = Method::kGes;
  double lambda = 0.0;
  std::string metric;  // "precision" or "recall"
  double mean = 0.0;
  double sem = 0.0;    // sample sd / sqrt(n_defined)
  int n_defined = 0;
  int n_undefined = 0;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;  // sorted by (replicate, lambda, method)
  std::vector<MetricSummary> summary;
  std::vector<int> skipped;            // replicates lost to a singular covariance
};

// Per replicate r: a SEM and a sample drawn from substream r of the seed, then
// GES at lambda and AGES with lambda_min = lambda for every lambda of the
// config. Output does not depend on the number of threads.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Mean, standard error and counts over the defined values.
MetricSummary summarize(Method method, double lambda, const std::string& metric,
                        const std::vector<std::optional<double>>& values);

struct PathCorrectnessRecord {
  int replicate = 0;
  // Share of kept path CPDAGs equal to the CPDAG of the matching sub-DAG.
  double cpdag_rate = 1.0;
  // Share of edges oriented by oracle AGES with the same state in A0.
  double orientation_rate = 1.0;
  int oriented_edges = 0;
};

struct PathCorrectnessResult {
  std::vector<PathCorrectnessRecord> records;
  double mean_cpdag_rate = 1.0, sem_cpdag_rate = 0.0;
  double mean_orientation_rate = 1.0, sem_orientation_rate = 0.0;
};

// Oracle-mode comparison of the solution path with the target construction.
// Uses p, q_strong, q_weak, replicates, seed and jobs of the config.
PathCorrectnessResult path_correctness_rates(const ExperimentConfig& cfg);

// CSV writers with fixed columns. Runtime is only written with timing = true
// so that default output is reproducible byte for byte.
void write_records_csv(std::ostream& out, const std::vector<MetricsRecord>& records, bool timing = false);
void write_summary_csv(std::ostream& out, const std::vector<MetricSummary>& summary);

}  // namespace ages
