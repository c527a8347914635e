#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "ages/graph.hpp"
#include "ages/rng.hpp"

namespace ages {

// Linear Gaussian SEM X = B^T X + eps, eps ~ N(0, diag(D)). A nonzero
// weights(i, j) is the edge i -> j.
class WeightedSem {
 public:
  WeightedSem() = default;
  // Throws CycleError if the pattern of B is cyclic, ConfigError on bad shapes
  // or non-positive variances.
  WeightedSem(Eigen::MatrixXd weights, Eigen::VectorXd noise_variances);

  int size() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& noise_variances() const { return noise_variances_; }
  double weight(VertexId from, VertexId to) const { return weights_(from, to); }

  // Graph of the nonzero pattern.
  const Dag& dag() const { return dag_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd noise_variances_;
  Dag dag_;
};

// Either an exact covariance (oracle) or a 1/n sample covariance with its n.
class CovarianceSource {
 public:
  CovarianceSource() = default;
  static CovarianceSource oracle(Eigen::MatrixXd sigma);
  static CovarianceSource sample(Eigen::MatrixXd sigma, long n);

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  std::optional<long> sample_size() const { return n_; }
  bool is_oracle() const { return !n_.has_value(); }
  int size() const { return static_cast<int>(sigma_.rows()); }

 private:
  CovarianceSource(Eigen::MatrixXd sigma, std::optional<long> n);
  Eigen::MatrixXd sigma_;
  std::optional<long> n_;
};

struct Range {
  double lo, hi;
};

struct SemGenConfig {
  int p = 10;
  double q_strong = 0.3;
  double q_weak = 0.7;
  Range strong{0.8, 1.2};
  Range weak{0.1, 0.3};
  Range variance{0.5, 1.5};
  std::uint64_t seed = 1;
  // Relabel vertices by a random permutation after upper-triangular
  // generation. Off reproduces the plain index-ordered construction.
  bool permute = false;

  void validate() const;
};

// Each pair i < j is independently strong (prob q_strong), weak (q_weak) or
// absent. Magnitudes are uniform on the configured ranges with a fair random
// sign; noise variances are uniform on `variance`.
WeightedSem random_sem(const SemGenConfig& cfg);
// Same, drawing from an existing generator (replicate substreams).
WeightedSem random_sem(const SemGenConfig& cfg, Rng& rng);

// Sigma = (I - B^T)^{-1} D (I - B)^{-1}.
CovarianceSource true_covariance(const WeightedSem& m);

struct SampleResult {
  Eigen::MatrixXd data;  // n x p
  CovarianceSource covariance;
};

// Forward substitution in topological order with standard normal draws.
SampleResult sample_data(const WeightedSem& m, long n, std::uint64_t seed);
SampleResult sample_data(const WeightedSem& m, long n, Rng& rng);

// Mean-centered covariance with 1/n normalization.
CovarianceSource sample_covariance(const Eigen::MatrixXd& data);

// Partial correlations with magnitude below this are exactly zero in oracle
// mode; they only arise from rounding of an exact zero.
inline constexpr double kOracleZeroTolerance = 1e-10;
// Reciprocal condition estimate below which a submatrix counts as singular.
inline constexpr double kSingularRcond = 1e-12;

// rho_{i,j|s} = -P_ij / sqrt(P_ii P_jj), P the inverse of the principal
// submatrix over {i, j} u s. Symmetric in (i, j) bit for bit. Throws
// SingularError with the offending subset.
double partial_correlation(const Eigen::MatrixXd& sigma, VertexId i, VertexId j, const VertexSet& s);
double partial_correlation(const CovarianceSource& src, VertexId i, VertexId j, const VertexSet& s);

}  // namespace ages
