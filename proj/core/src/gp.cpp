#include "gppo/gp.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gppo {

namespace {

std::atomic<std::uint64_t> g_posterior_evals{0};

constexpr double kSigmaMin = 1e-9;  // degenerate-branch threshold for EI/UCB
constexpr double kJitterFloor = 1e-8;
constexpr double kJitterCeil = 1e-2;

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// RBF part only, no noise delta.
double rbf_part(const Vec& x, const Vec& x2, const KernelConfig& cfg) {
  const double sq = (x - x2).squaredNorm();
  return cfg.sigma_f * cfg.sigma_f * std::exp(-0.5 * cfg.lengthscale * sq);
}

}  // namespace

GpMemory::GpMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("GpMemory: capacity must be >= 1");
}

void GpMemory::push(GpObservation obs) {
  if (!std::isfinite(obs.y))
    throw std::invalid_argument("GpMemory::push: non-finite target");
  if (!entries_.empty() && entries_.front().theta.size() != obs.theta.size())
    throw std::invalid_argument("GpMemory::push: dimension mismatch");
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(obs));
}

double GpMemory::best_y() const {
  if (entries_.empty()) throw std::invalid_argument("GpMemory::best_y: empty memory");
  double best = entries_.front().y;
  for (const auto& e : entries_) best = std::max(best, e.y);
  return best;
}

double rbf_kernel(const Vec& x, const Vec& x2, const KernelConfig& cfg) {
  if (x.size() != x2.size())
    throw std::invalid_argument("rbf_kernel: dimension mismatch");
  double k = rbf_part(x, x2, cfg);
  if (x == x2) k += cfg.sigma_n * cfg.sigma_n;
  return k;
}

Mat gram_matrix(const std::vector<Vec>& points, const KernelConfig& cfg) {
  if (points.empty()) throw std::invalid_argument("gram_matrix: empty input");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  for (const auto& p : points)
    if (p.size() != points.front().size())
      throw std::invalid_argument("gram_matrix: dimension mismatch");

  Mat k(n, n);
  const double noise = cfg.sigma_n * cfg.sigma_n;
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = cfg.sigma_f * cfg.sigma_f + noise;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = rbf_part(points[static_cast<std::size_t>(i)],
                                points[static_cast<std::size_t>(j)], cfg);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

GpModel::GpModel(const GpMemory& mem, const KernelConfig& cfg) : cfg_(cfg) {
  if (mem.empty())
    throw std::invalid_argument("GpModel: empty memory; use the prior-mode bonus instead");

  const std::size_t n = mem.size();
  inputs_.reserve(n);
  targets_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    inputs_.push_back(mem[i].theta);
    targets_(static_cast<Eigen::Index>(i)) = mem[i].y;
  }

  const Mat k = gram_matrix(inputs_, cfg_);
  double jitter = cfg_.jitter;
  for (;;) {
    Mat kj = k;
    kj.diagonal().array() += jitter;
    chol_.compute(kj);
    if (chol_.info() == Eigen::Success) {
      applied_jitter_ = jitter;
      break;
    }
    const double next = jitter > 0.0 ? jitter * 10.0 : kJitterFloor;
    if (next > kJitterCeil) {
      std::ostringstream msg;
      msg << "GpModel: Cholesky factorization failed for n=" << n
          << " after escalating jitter to " << jitter
          << " (sigma_f=" << cfg_.sigma_f << ", sigma_n=" << cfg_.sigma_n << ")";
      throw std::runtime_error(msg.str());
    }
    jitter = next;
  }
  alpha_ = chol_.solve(targets_);
}

GpPosterior GpModel::predict(const Vec& x) const {
  g_posterior_evals.fetch_add(1, std::memory_order_relaxed);

  const Eigen::Index n = static_cast<Eigen::Index>(inputs_.size());
  const Eigen::Index dim = x.size();
  if (dim != inputs_.front().size())
    throw std::invalid_argument("GpModel::predict: dimension mismatch");

  // Cross-covariances and their input gradients. The noise delta enters the
  // value when x coincides with a stored input but is constant under
  // differentiation.
  Vec k_star(n);
  Mat k_grad(dim, n);  // column i = d k(x, x_i) / d x
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec& xi = inputs_[static_cast<std::size_t>(i)];
    const double rbf = rbf_part(x, xi, cfg_);
    k_star(i) = rbf + (x == xi ? cfg_.sigma_n * cfg_.sigma_n : 0.0);
    k_grad.col(i) = -cfg_.lengthscale * rbf * (x - xi);
  }

  const Vec beta = chol_.solve(k_star);
  const double k_ss = cfg_.sigma_f * cfg_.sigma_f + cfg_.sigma_n * cfg_.sigma_n;

  GpPosterior post;
  post.mean = k_star.dot(alpha_);
  const double raw_variance = k_ss - k_star.dot(beta);
  post.mean_grad = k_grad * alpha_;
  if (raw_variance < 0.0) {
    post.variance = 0.0;
    post.variance_grad = Vec::Zero(dim);
  } else {
    post.variance = raw_variance;
    post.variance_grad = -2.0 * (k_grad * beta);
  }
  return post;
}

GpPosterior posterior(const GpMemory& mem, const Vec& x,
                      const KernelConfig& cfg) {
  return GpModel(mem, cfg).predict(x);
}

Acquisition expected_improvement(const GpPosterior& p, double f_best) {
  Acquisition acq;
  const double sigma = std::sqrt(std::max(p.variance, 0.0));
  const double delta = p.mean - f_best;
  const Eigen::Index dim = p.mean_grad.size();

  if (sigma <= kSigmaMin) {
    if (delta > 0.0) {
      acq.value = delta;
      acq.grad = p.mean_grad;
    } else {
      acq.value = 0.0;
      acq.grad = Vec::Zero(dim);
    }
    return acq;
  }

  const double z = delta / sigma;
  const double cdf = normal_cdf(z);
  const double pdf = normal_pdf(z);
  acq.value = std::max(delta * cdf + sigma * pdf, 0.0);
  // dEI/dmean = Phi(z), dEI/dsigma = phi(z), dsigma/dvar = 1/(2 sigma).
  acq.grad = cdf * p.mean_grad + (pdf / (2.0 * sigma)) * p.variance_grad;
  return acq;
}

Acquisition ucb(const GpPosterior& p, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("ucb: kappa must be >= 0");
  Acquisition acq;
  const double sigma = std::sqrt(std::max(p.variance, 0.0));
  acq.value = p.mean + kappa * sigma;
  if (sigma > kSigmaMin)
    acq.grad = p.mean_grad + (kappa / (2.0 * sigma)) * p.variance_grad;
  else
    acq.grad = p.mean_grad;
  return acq;
}

double gp_target(double mean_weighted_adv, double gamma, long horizon_T,
                 double mu_old) {
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument(
        "gp_target: gamma must be in [0, 1); the gamma == 1 limit is rejected, "
        "use horizon_T + 1 as the factor explicitly");
  if (horizon_T < 0) throw std::invalid_argument("gp_target: horizon_T must be >= 0");
  const double factor =
      (1.0 - std::pow(gamma, static_cast<double>(horizon_T + 1))) / (1.0 - gamma);
  return factor * mean_weighted_adv + mu_old;
}

std::uint64_t posterior_eval_count() {
  return g_posterior_evals.load(std::memory_order_relaxed);
}

void reset_posterior_eval_count() {
  g_posterior_evals.store(0, std::memory_order_relaxed);
}

}  // namespace gppo
