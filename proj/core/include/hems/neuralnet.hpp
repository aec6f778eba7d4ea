#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace hems {

enum class Activation { kTanh, kRelu };
enum class Head { kSoftmaxPolicy, kLinearQ, kLinearValue };

std::string to_string(Activation a);
std::string to_string(Head h);
Activation activation_from_string(const std::string& s);
Head head_from_string(const std::string& s);

/// Fully connected net: input -> hidden[0] -> ... -> hidden.back() -> output.
/// Hidden layers apply `activation`; the output layer is affine, followed by
/// softmax when the head is a policy.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
  Activation activation = Activation::kTanh;
  Head head = Head::kLinearValue;

  void validate() const;
  int layer_count() const { return static_cast<int>(hidden.size()) + 1; }
  /// [input_dim, hidden..., output_dim]
  std::vector<int> layer_dims() const;
};

/// weights[l] is (out x in) for layer l, biases[l] is (out). Layer order is
/// input to output; this is also the JSON serialization order.
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  bool all_finite() const;
};

/// Symmetric uniform init, weights in +-sqrt(6/(fan_in+fan_out)), biases zero.
MlpParams init_params(const MlpSpec& spec, std::mt19937_64& rng);
MlpParams zero_params(const MlpSpec& spec);

Eigen::VectorXd forward(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::VectorXd& input);
/// Rows are samples.
Eigen::MatrixXd forward_batch(const MlpSpec& spec, const MlpParams& params,
                              const Eigen::MatrixXd& inputs);

using MlpGrads = MlpParams;

/// Exact gradients of sum_ij upstream(i,j) * output(i,j) with respect to every
/// parameter; `upstream` is the loss gradient at the network OUTPUT (after the
/// softmax for policy heads). Gradients are summed over the batch rows, so any
/// 1/B averaging belongs in `upstream`.
MlpGrads backward_batch(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream);

/// Adaptive-moment gradient descent (decay 0.9/0.999, epsilon 1e-8).
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const MlpSpec& spec, double learning_rate);

  /// Applies one descent step in place. Rejects non-finite gradients.
  void apply(MlpParams& params, const MlpGrads& grads);

  double learning_rate() const { return learning_rate_; }
  long step_count() const { return step_count_; }

 private:
  double learning_rate_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  long step_count_ = 0;
  MlpGrads first_moment_;
  MlpGrads second_moment_;
};

nlohmann::json mlp_to_json(const MlpSpec& spec, const MlpParams& params);
void mlp_from_json(const nlohmann::json& j, MlpSpec& spec, MlpParams& params);

}  // namespace hems
