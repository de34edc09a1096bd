#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <vector>

namespace gppo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Hyperparameters of the squared-exponential kernel
///   k(x, x') = sigma_f^2 * exp(-0.5 * lengthscale * |x - x'|^2)
///            + sigma_n^2 * [x == x' componentwise]
/// The exponent uses the scalar `lengthscale` as an isotropic precision
/// factor. `jitter` is the initial diagonal stabilizer added to the Gram
/// matrix before factorization (escalated on failure, see GpModel).
struct KernelConfig {
  double sigma_f = 1.0;
  double lengthscale = 5e-4;
  double sigma_n = 1e-2;
  double jitter = 1e-8;
};

/// One regression sample: parameter vector and its scalar target.
struct GpObservation {
  Vec theta;
  double y = 0.0;
};

/// Bounded FIFO store of observations, oldest first. Pushing beyond
/// capacity evicts index 0.
class GpMemory {
 public:
  explicit GpMemory(std::size_t capacity);

  /// Appends `obs`; evicts the oldest entry first when full.
  /// Throws std::invalid_argument on non-finite y or dimension mismatch
  /// with existing entries.
  void push(GpObservation obs);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const GpObservation& operator[](std::size_t i) const { return entries_[i]; }

  /// Largest stored target; the incumbent for expected improvement.
  /// Requires a nonempty memory.
  double best_y() const;

 private:
  std::size_t capacity_;
  std::deque<GpObservation> entries_;
};

/// Posterior prediction at a query point, with input gradients.
struct GpPosterior {
  double mean = 0.0;
  double variance = 0.0;  // clamped to >= 0
  Vec mean_grad;
  Vec variance_grad;
};

double rbf_kernel(const Vec& x, const Vec& x2, const KernelConfig& cfg);

/// Gram matrix over `points`. The noise delta is applied on the diagonal
/// only (i == j); duplicate inputs at distinct indices covary at sigma_f^2.
/// Exactly symmetric by construction. Jitter is NOT included here; the
/// factorization path adds it.
Mat gram_matrix(const std::vector<Vec>& points, const KernelConfig& cfg);

/// Factorized GP over a memory snapshot. Builds (K + jitter*I) once via
/// Cholesky and serves repeated posterior queries. If the factorization
/// fails, jitter escalates by 10x steps (from 1e-8 if configured as 0) up
/// to 1e-2 before giving up with a diagnostic.
class GpModel {
 public:
  GpModel(const GpMemory& mem, const KernelConfig& cfg);

  GpPosterior predict(const Vec& x) const;

  double applied_jitter() const { return applied_jitter_; }

 private:
  KernelConfig cfg_;
  std::vector<Vec> inputs_;
  Vec targets_;
  Eigen::LLT<Mat> chol_;
  Vec alpha_;  // (K + jitter I)^{-1} y
  double applied_jitter_ = 0.0;
};

/// One-shot posterior at `x`: factorize and predict.
/// Throws std::invalid_argument on empty memory.
GpPosterior posterior(const GpMemory& mem, const Vec& x,
                      const KernelConfig& cfg);

struct Acquisition {
  double value = 0.0;
  Vec grad;
};

/// Expected improvement over incumbent `f_best`, maximization form.
/// For sigma <= sigma_min (1e-9) the degenerate limit max(mean - f_best, 0)
/// is used. Value is clamped at 0 against cancellation; the gradient is the
/// chain rule through mean_grad and variance_grad.
Acquisition expected_improvement(const GpPosterior& p, double f_best);

/// Upper confidence bound mean + kappa*sqrt(variance). At sigma below the
/// degenerate threshold the sqrt term is treated as flat (grad = mean_grad).
Acquisition ucb(const GpPosterior& p, double kappa);

/// Regression target for a policy-parameter observation:
///   ((1 - gamma^(horizon_T+1)) / (1 - gamma)) * mean_weighted_adv + mu_old
/// Throws std::invalid_argument for gamma == 1 (caller must handle the
/// limit explicitly) or gamma outside [0, 1).
double gp_target(double mean_weighted_adv, double gamma, long horizon_T,
                 double mu_old);

/// Count of posterior predictions served since process start (or the last
/// reset). Lets tests assert that baseline-mode runs never touch the GP.
std::uint64_t posterior_eval_count();
void reset_posterior_eval_count();

}  // namespace gppo
