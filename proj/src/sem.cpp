#include "ages/sem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ages/errors.hpp"
#include "ages/rng.hpp"

namespace ages {

namespace {

Dag pattern_dag(const Eigen::MatrixXd& weights) {
  const int p = static_cast<int>(weights.rows());
  MixedGraph g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (weights(i, j) == 0.0) continue;
      if (i == j) throw CycleError("SEM weight matrix has a nonzero diagonal entry");
      if (weights(j, i) != 0.0) throw CycleError("SEM weight matrix has a 2-cycle");
      g.add_directed(i, j);
    }
  }
  return Dag::from_graph(std::move(g));
}

}  // namespace

WeightedSem::WeightedSem(Eigen::MatrixXd weights, Eigen::VectorXd noise_variances)
    : weights_(std::move(weights)), noise_variances_(std::move(noise_variances)) {
  if (weights_.rows() != weights_.cols()) throw ConfigError("SEM weight matrix must be square");
  if (noise_variances_.size() != weights_.rows()) throw ConfigError("SEM noise variance vector has wrong length");
  for (Eigen::Index i = 0; i < noise_variances_.size(); ++i) {
    if (!(noise_variances_(i) > 0.0) || !std::isfinite(noise_variances_(i))) {
      throw ConfigError("SEM noise variances must be positive and finite");
    }
  }
  if (!weights_.allFinite()) throw ConfigError("SEM weights must be finite");
  dag_ = pattern_dag(weights_);
}

CovarianceSource::CovarianceSource(Eigen::MatrixXd sigma, std::optional<long> n)
    : sigma_(std::move(sigma)), n_(n) {
  if (sigma_.rows() != sigma_.cols()) throw PreconditionError("covariance matrix must be square");
  if (!sigma_.allFinite()) throw PreconditionError("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("covariance matrix is not symmetric");
  }
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());
  if (sigma_.rows() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
    if (llt.info() != Eigen::Success) {
      std::vector<int> all(sigma_.rows());
      for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
      throw SingularError("covariance matrix is not positive definite", all);
    }
  }
}

CovarianceSource CovarianceSource::oracle(Eigen::MatrixXd sigma) {
  return CovarianceSource(std::move(sigma), std::nullopt);
}

CovarianceSource CovarianceSource::sample(Eigen::MatrixXd sigma, long n) {
  if (n < 2) throw PreconditionError("sample size must be at least 2");
  return CovarianceSource(std::move(sigma), n);
}

void SemGenConfig::validate() const {
  if (p < 1) throw ConfigError("p must be at least 1");
  if (q_strong < 0 || q_weak < 0 || q_strong + q_weak > 1.0 + 1e-12) {
    throw ConfigError("edge probabilities must be nonnegative with q_s + q_w <= 1");
  }
  for (const Range& r : {strong, weak, variance}) {
    if (!(r.lo > 0.0) || !(r.hi >= r.lo)) throw ConfigError("ranges must be positive with lo <= hi");
  }
}

WeightedSem random_sem(const SemGenConfig& cfg, Rng& rng) {
  cfg.validate();
  const int p = cfg.p;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double u = rng.uniform();
      const Range* range = nullptr;
      if (u < cfg.q_strong) {
        range = &cfg.strong;
      } else if (u < cfg.q_strong + cfg.q_weak) {
        range = &cfg.weak;
      }
      if (!range) continue;
      const double magnitude = rng.uniform(range->lo, range->hi);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      b(i, j) = sign * magnitude;
    }
  }
  Eigen::VectorXd d(p);
  for (int i = 0; i < p; ++i) d(i) = rng.uniform(cfg.variance.lo, cfg.variance.hi);

  if (cfg.permute) {
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    for (int i = p - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(static_cast<std::uint64_t>(i) + 1)]);
    Eigen::MatrixXd bp = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd dp(p);
    for (int i = 0; i < p; ++i) {
      dp(perm[i]) = d(i);
      for (int j = 0; j < p; ++j) bp(perm[i], perm[j]) = b(i, j);
    }
    b = std::move(bp);
    d = std::move(dp);
  }
  return WeightedSem(std::move(b), std::move(d));
}

WeightedSem random_sem(const SemGenConfig& cfg) {
  Rng rng(cfg.seed);
  return random_sem(cfg, rng);
}

CovarianceSource true_covariance(const WeightedSem& m) {
  const int p = m.size();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - m.weights().transpose();
  const Eigen::MatrixXd a_inv = a.partialPivLu().inverse();
  Eigen::MatrixXd sigma = a_inv * m.noise_variances().asDiagonal() * a_inv.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return CovarianceSource::oracle(std::move(sigma));
}

CovarianceSource sample_covariance(const Eigen::MatrixXd& data) {
  const long n = static_cast<long>(data.rows());
  if (n < 2) throw PreconditionError("sample covariance needs at least 2 rows");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd sigma = (centered.transpose() * centered) / static_cast<double>(n);
  return CovarianceSource::sample(std::move(sigma), n);
}

SampleResult sample_data(const WeightedSem& m, long n, Rng& rng) {
  if (n < 2) throw PreconditionError("sample size must be at least 2");
  const int p = m.size();
  const auto order = m.dag().graph().topological_order();
  std::vector<double> sd(p);
  for (int v = 0; v < p; ++v) sd[v] = std::sqrt(m.noise_variances()(v));
  std::vector<VertexSet> parents(p);
  for (int v = 0; v < p; ++v) parents[v] = m.dag().parents(v);

  Eigen::MatrixXd data(n, p);
  for (long r = 0; r < n; ++r) {
    for (VertexId v : *order) {
      double x = sd[v] * rng.normal();
      for (VertexId u : parents[v]) x += m.weight(u, v) * data(r, u);
      data(r, v) = x;
    }
  }
  CovarianceSource cov = sample_covariance(data);
  return {std::move(data), std::move(cov)};
}

SampleResult sample_data(const WeightedSem& m, long n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_data(m, n, rng);
}

double partial_correlation(const Eigen::MatrixXd& sigma, VertexId i, VertexId j, const VertexSet& s) {
  const int p = static_cast<int>(sigma.rows());
  if (i < 0 || j < 0 || i >= p || j >= p) throw RangeError("partial correlation index out of range");
  if (i == j) throw PreconditionError("partial correlation needs two distinct vertices");
  std::vector<int> idx{std::min(i, j), std::max(i, j)};
  for (VertexId v : s) {
    if (v < 0 || v >= p) throw RangeError("conditioning vertex out of range");
    if (v == i || v == j) throw PreconditionError("conditioning set contains a queried vertex");
    idx.push_back(v);
  }
  std::sort(idx.begin() + 2, idx.end());
  const int k = static_cast<int>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) sub(a, b) = sigma(idx[a], idx[b]);

  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= kSingularRcond)) {
    std::vector<int> subset = idx;
    std::sort(subset.begin(), subset.end());
    throw SingularError("singular covariance submatrix", subset);
  }
  const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(k, k));
  const double rho = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
  return std::clamp(rho, -1.0, 1.0);
}

double partial_correlation(const CovarianceSource& src, VertexId i, VertexId j, const VertexSet& s) {
  const double rho = partial_correlation(src.sigma(), i, j, s);
  if (src.is_oracle() && std::abs(rho) < kOracleZeroTolerance) return 0.0;
  return rho;
}

}  // namespace ages
