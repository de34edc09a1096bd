#pragma once

#include <Eigen/Core>
#include <string>

#include "gppo/gp.hpp"
#include "gppo/rng.hpp"

namespace gppo {

/// Architecture of a two-hidden-layer tanh perceptron, in -> hidden ->
/// hidden -> out. Policy heads carry an extra state-independent
/// log-standard-deviation vector of dimension `out`.
struct MlpShape {
  int in = 0;
  int hidden = 64;
  int out = 0;
  bool has_log_std = false;

  /// Flat parameter count: (in*h + h) + (h*h + h) + (h*out + out) [+ out].
  Eigen::Index dim() const;
  bool operator==(const MlpShape&) const = default;
};

/// Weights and biases of one MLP. Flatten layout is layer-major with
/// row-major weights: W1, b1, W2, b2, W3, b3, then log_std when present.
struct MlpParams {
  MlpShape shape;
  Mat w1, w2, w3;
  Vec b1, b2, b3;
  Vec log_std;  // empty unless shape.has_log_std

  static MlpParams zeros(const MlpShape& shape);

  Vec flatten() const;
  static MlpParams unflatten(const MlpShape& shape, const Vec& flat);
};

/// Orthogonal initialization: hidden layers use gain sqrt(2), the output
/// layer uses `output_gain` (0.01 for policy heads, 1.0 for value heads),
/// biases and log_std start at zero.
MlpParams init_mlp(const MlpShape& shape, Rng& rng, double output_gain);

/// Diagonal Gaussian over actions.
struct ActionDistribution {
  Vec mean;
  Vec std;
};

ActionDistribution policy_forward(const MlpParams& policy, const Vec& state);

double value_forward(const MlpParams& value, const Vec& state);

struct ActionSample {
  Vec action;
  double log_prob = 0.0;
};

/// action = mean + std .* z with one standard-normal draw per action
/// dimension (two engine words each, see Rng).
ActionSample sample_action(const ActionDistribution& dist, Rng& rng);

double log_prob(const ActionDistribution& dist, const Vec& action);

/// Batched forward pass; columns are samples. `a1`/`a2` hold the tanh
/// activations needed by the backward pass, `out` the linear head output.
struct MlpCache {
  Mat a1, a2, out;
};

MlpCache mlp_forward(const MlpParams& params, const Mat& states);

/// Log densities of `actions` under the cached policy forward pass.
Vec batch_log_probs(const MlpParams& policy, const Mat& actions,
                    const MlpCache& cache);

/// Gradient of sum_t weights[t] * log pi(actions[:,t] | states[:,t]) with
/// respect to the flat policy parameters (log_std block included).
Vec logprob_backward(const MlpParams& policy, const Mat& states,
                     const Mat& actions, const Vec& weights,
                     const MlpCache& cache);

/// Gradient of sum_t weights[t] * V(states[:,t]) with respect to the flat
/// value parameters.
Vec value_backward(const MlpParams& value, const Mat& states,
                   const Vec& weights, const MlpCache& cache);

/// Actor and critic bundled for joint optimization. The joint flat layout
/// is [policy | value].
struct ActorCritic {
  MlpParams policy;
  MlpParams value;

  Eigen::Index joint_dim() const { return policy.shape.dim() + value.shape.dim(); }
  Vec flatten_joint() const;
  void unflatten_joint(const Vec& flat);
};

/// Text checkpoint with a header line (architecture, flat dimension, layout
/// version) followed by hexfloat parameter values; round-trips bitwise.
void save_checkpoint(const MlpParams& params, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace gppo
