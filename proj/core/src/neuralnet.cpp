#include "hems/neuralnet.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

namespace {

void check_input(const MlpSpec& spec, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != spec.input_dim) {
    throw ValidationError("input has " + std::to_string(inputs.cols()) +
                          " features, spec expects " + std::to_string(spec.input_dim));
  }
}

void check_shapes(const MlpSpec& spec, const MlpParams& params) {
  const auto dims = spec.layer_dims();
  if (params.weights.size() != dims.size() - 1 || params.biases.size() != dims.size() - 1) {
    throw ValidationError("parameter layer count does not match spec");
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (params.weights[l].rows() != dims[l + 1] || params.weights[l].cols() != dims[l] ||
        params.biases[l].size() != dims[l + 1]) {
      throw ValidationError("parameter shape mismatch at layer " + std::to_string(l));
    }
  }
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) return z.array().tanh();
  return z.array().max(0.0);
}

// derivative expressed through the activation output
Eigen::MatrixXd activate_grad(const Eigen::MatrixXd& out, Activation a) {
  if (a == Activation::kTanh) return 1.0 - out.array().square();
  return (out.array() > 0.0).cast<double>();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Eigen::RowVectorXd shifted = logits.row(i).array() - logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = shifted.array().exp();
    p.row(i) = e / e.sum();
  }
  return p;
}

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = inputs
  Eigen::MatrixXd logits;                    // pre-head output layer
  Eigen::MatrixXd output;                    // post-head
};

ForwardTrace run_forward(const MlpSpec& spec, const MlpParams& params,
                         const Eigen::MatrixXd& inputs) {
  ForwardTrace t;
  t.activations.push_back(inputs);
  Eigen::MatrixXd h = inputs;
  const int n_hidden = static_cast<int>(spec.hidden.size());
  for (int l = 0; l < n_hidden; ++l) {
    Eigen::MatrixXd z =
        (h * params.weights[l].transpose()).rowwise() + params.biases[l].transpose();
    h = activate(z, spec.activation);
    t.activations.push_back(h);
  }
  t.logits = (h * params.weights[n_hidden].transpose()).rowwise() +
             params.biases[n_hidden].transpose();
  t.output = spec.head == Head::kSoftmaxPolicy ? softmax_rows(t.logits) : t.logits;
  return t;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

std::string to_string(Head h) {
  switch (h) {
    case Head::kSoftmaxPolicy: return "softmax_policy";
    case Head::kLinearQ: return "linear_q";
    case Head::kLinearValue: return "linear_value";
  }
  return "linear_value";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ValidationError("unknown activation '" + s + "'");
}

Head head_from_string(const std::string& s) {
  if (s == "softmax_policy") return Head::kSoftmaxPolicy;
  if (s == "linear_q") return Head::kLinearQ;
  if (s == "linear_value") return Head::kLinearValue;
  throw ValidationError("unknown head '" + s + "'");
}

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) {
    throw ValidationError("network input and output dims must be >= 1");
  }
  for (int w : hidden) {
    if (w < 1) throw ValidationError("hidden layer widths must be >= 1");
  }
}

std::vector<int> MlpSpec::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  return dims;
}

bool MlpParams::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

MlpParams init_params(const MlpSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  MlpParams params;
  const auto dims = spec.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = dist(rng);
      }
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return params;
}

MlpParams zero_params(const MlpSpec& spec) {
  spec.validate();
  MlpParams params;
  const auto dims = spec.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    params.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    params.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  return params;
}

Eigen::VectorXd forward(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::VectorXd& input) {
  return forward_batch(spec, params, input.transpose()).row(0).transpose();
}

Eigen::MatrixXd forward_batch(const MlpSpec& spec, const MlpParams& params,
                              const Eigen::MatrixXd& inputs) {
  check_input(spec, inputs);
  check_shapes(spec, params);
  return run_forward(spec, params, inputs).output;
}

MlpGrads backward_batch(const MlpSpec& spec, const MlpParams& params,
                        const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream) {
  check_input(spec, inputs);
  check_shapes(spec, params);
  if (upstream.rows() != inputs.rows() || upstream.cols() != spec.output_dim) {
    throw ValidationError("upstream gradient shape mismatch");
  }

  const ForwardTrace trace = run_forward(spec, params, inputs);
  const int n_layers = spec.layer_count();

  // head backprop to logits
  Eigen::MatrixXd delta;
  if (spec.head == Head::kSoftmaxPolicy) {
    // dL/dz_k = p_k * (g_k - <g, p>) per row
    const Eigen::MatrixXd& p = trace.output;
    const Eigen::VectorXd dot = (upstream.array() * p.array()).rowwise().sum();
    delta = p.array() * (upstream.colwise() - dot).array();
  } else {
    delta = upstream;
  }

  MlpGrads grads = zero_params(spec);
  for (int l = n_layers - 1; l >= 0; --l) {
    grads.weights[l] = delta.transpose() * trace.activations[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      const Eigen::MatrixXd upstream_h = delta * params.weights[l];
      delta = upstream_h.array() * activate_grad(trace.activations[l], spec.activation).array();
    }
  }
  return grads;
}

AdamOptimizer::AdamOptimizer(const MlpSpec& spec, double learning_rate)
    : learning_rate_(learning_rate),
      first_moment_(zero_params(spec)),
      second_moment_(zero_params(spec)) {
  if (!(learning_rate > 0.0)) {
    throw ValidationError("learning rate must be positive");
  }
}

void AdamOptimizer::apply(MlpParams& params, const MlpGrads& grads) {
  if (!grads.all_finite()) {
    throw NumericError("non-finite gradient in optimizer step");
  }
  if (grads.weights.size() != first_moment_.weights.size()) {
    throw ValidationError("gradient layer count does not match optimizer state");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));

  auto update = [&](auto& m, auto& v, auto& p, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = (beta2_ * v.array() + (1.0 - beta2_) * g.array().square()).matrix();
    p.array() -= learning_rate_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + epsilon_);
  };
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    update(first_moment_.weights[l], second_moment_.weights[l], params.weights[l],
           grads.weights[l]);
    update(first_moment_.biases[l], second_moment_.biases[l], params.biases[l],
           grads.biases[l]);
  }
}

nlohmann::json mlp_to_json(const MlpSpec& spec, const MlpParams& params) {
  check_shapes(spec, params);
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    // row-major (out x in) flattening
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(params.weights[l].size()));
    for (Eigen::Index i = 0; i < params.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < params.weights[l].cols(); ++j) {
        w.push_back(params.weights[l](i, j));
      }
    }
    std::vector<double> b(params.biases[l].data(),
                          params.biases[l].data() + params.biases[l].size());
    layers.push_back({{"weights", w}, {"bias", b}});
  }
  return nlohmann::json{{"input_dim", spec.input_dim},
                        {"hidden", spec.hidden},
                        {"output_dim", spec.output_dim},
                        {"activation", to_string(spec.activation)},
                        {"head", to_string(spec.head)},
                        {"layers", layers}};
}

void mlp_from_json(const nlohmann::json& j, MlpSpec& spec, MlpParams& params) {
  spec.input_dim = j.at("input_dim").get<int>();
  spec.hidden = j.at("hidden").get<std::vector<int>>();
  spec.output_dim = j.at("output_dim").get<int>();
  spec.activation = activation_from_string(j.at("activation").get<std::string>());
  spec.head = head_from_string(j.at("head").get<std::string>());
  spec.validate();

  const auto dims = spec.layer_dims();
  const auto& layers = j.at("layers");
  if (!layers.is_array() || layers.size() != dims.size() - 1) {
    throw ValidationError("layer count in JSON does not match spec");
  }
  params = MlpParams{};
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto w = layers[l].at("weights").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    const std::size_t rows = static_cast<std::size_t>(dims[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(dims[l]);
    if (w.size() != rows * cols || b.size() != rows) {
      throw ValidationError("weight array size mismatch at layer " + std::to_string(l));
    }
    Eigen::MatrixXd wm(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t k = 0; k < cols; ++k) {
        wm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w[i * cols + k];
      }
    }
    params.weights.push_back(std::move(wm));
    params.biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(),
                                                              static_cast<Eigen::Index>(rows)));
  }
  if (!params.all_finite()) {
    throw ValidationError("non-finite parameters in JSON");
  }
}

}  // namespace hems
