#include "hems/neuralnet.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hems/errors.hpp"

using namespace hems;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

// scalar objective: sum of upstream .* forward(inputs)
double objective(const MlpSpec& spec, const MlpParams& params, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& upstream) {
  return (upstream.array() * forward_batch(spec, params, inputs).array()).sum();
}

// central-difference oracle over every parameter
void check_gradients(const MlpSpec& spec, std::mt19937_64& rng) {
  MlpParams params = init_params(spec, rng);
  const Eigen::MatrixXd inputs = random_matrix(3, spec.input_dim, rng);
  const Eigen::MatrixXd upstream = random_matrix(3, spec.output_dim, rng);
  const MlpGrads analytic = backward_batch(spec, params, inputs, upstream);

  const double eps = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& value, double analytic_grad) {
    const double saved = value;
    value = saved + eps;
    const double hi = objective(spec, params, inputs, upstream);
    value = saved - eps;
    const double lo = objective(spec, params, inputs, upstream);
    value = saved;
    const double fd = (hi - lo) / (2.0 * eps);
    const double rel =
        std::abs(fd - analytic_grad) / std::max({std::abs(fd), std::abs(analytic_grad), 1e-6});
    worst = std::max(worst, rel);
  };

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < params.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < params.weights[l].cols(); ++j) {
        probe(params.weights[l](i, j), analytic.weights[l](i, j));
      }
    }
    for (Eigen::Index i = 0; i < params.biases[l].size(); ++i) {
      probe(params.biases[l](i), analytic.biases[l](i));
    }
  }
  CHECK(worst <= 1e-4);
}

}  // namespace

TEST_CASE("forward heads behave at zero parameters") {
  const MlpSpec policy{3, {4}, 2, Activation::kTanh, Head::kSoftmaxPolicy};
  const MlpParams zero_policy = zero_params(policy);
  const Eigen::VectorXd probs = forward(policy, zero_policy, Eigen::Vector3d{0.3, -0.2, 0.9});
  CHECK(probs(0) == doctest::Approx(0.5));
  CHECK(probs(1) == doctest::Approx(0.5));

  const MlpSpec q{3, {4}, 2, Activation::kTanh, Head::kLinearQ};
  const Eigen::VectorXd qs = forward(q, zero_params(q), Eigen::Vector3d{0.3, -0.2, 0.9});
  CHECK(qs(0) == 0.0);
  CHECK(qs(1) == 0.0);
}

TEST_CASE("softmax outputs normalize to one for random parameters") {
  std::mt19937_64 rng(4);
  const MlpSpec spec{5, {8, 8}, 3, Activation::kTanh, Head::kSoftmaxPolicy};
  const MlpParams params = init_params(spec, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd p =
        forward(spec, params, random_matrix(5, 1, rng, 2.0).col(0));
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("forward validates shapes") {
  const MlpSpec spec{3, {4}, 2, Activation::kTanh, Head::kLinearQ};
  const MlpParams params = zero_params(spec);
  CHECK_THROWS_AS(forward(spec, params, Eigen::Vector2d{1, 2}), ValidationError);

  MlpParams broken = params;
  broken.weights[0].resize(5, 3);
  CHECK_THROWS_AS(forward(spec, broken, Eigen::Vector3d{1, 2, 3}), ValidationError);
}

TEST_CASE("analytic gradients match central differences for the published shapes") {
  std::mt19937_64 rng(99);
  SUBCASE("policy-gradient architecture") {
    check_gradients(MlpSpec{5, {32, 32, 32}, 2, Activation::kTanh, Head::kSoftmaxPolicy}, rng);
  }
  SUBCASE("Q-network architecture") {
    check_gradients(MlpSpec{5, {32, 32, 16}, 2, Activation::kTanh, Head::kLinearQ}, rng);
  }
  SUBCASE("value head") {
    check_gradients(MlpSpec{5, {8, 8}, 1, Activation::kTanh, Head::kLinearValue}, rng);
  }
  SUBCASE("relu activation") {
    check_gradients(MlpSpec{4, {6}, 2, Activation::kRelu, Head::kLinearQ}, rng);
  }
}

TEST_CASE("backward is linear in the upstream gradient") {
  std::mt19937_64 rng(7);
  const MlpSpec spec{4, {6, 5}, 2, Activation::kTanh, Head::kSoftmaxPolicy};
  const MlpParams params = init_params(spec, rng);
  const Eigen::MatrixXd inputs = random_matrix(2, 4, rng);

  SUBCASE("zero upstream gives zero gradients") {
    const MlpGrads grads =
        backward_batch(spec, params, inputs, Eigen::MatrixXd::Zero(2, 2));
    for (const auto& w : grads.weights) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& b : grads.biases) CHECK(b.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("a duplicated batch doubles the gradient") {
    const Eigen::MatrixXd upstream = random_matrix(2, 2, rng);
    const MlpGrads single = backward_batch(spec, params, inputs, upstream);

    Eigen::MatrixXd inputs2(4, 4), upstream2(4, 2);
    inputs2 << inputs, inputs;
    upstream2 << upstream, upstream;
    const MlpGrads doubled = backward_batch(spec, params, inputs2, upstream2);
    for (std::size_t l = 0; l < single.weights.size(); ++l) {
      CHECK((doubled.weights[l] - 2.0 * single.weights[l]).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((doubled.biases[l] - 2.0 * single.biases[l]).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("optimizer steps descend and reject bad gradients") {
  const MlpSpec spec{1, {}, 1, Activation::kTanh, Head::kLinearValue};

  SUBCASE("zero gradient leaves fresh parameters unchanged") {
    MlpParams params = zero_params(spec);
    params.weights[0](0, 0) = 0.7;
    AdamOptimizer opt(spec, 1e-3);
    opt.apply(params, zero_params(spec));
    CHECK(params.weights[0](0, 0) == 0.7);
  }

  SUBCASE("a constant positive gradient decreases the parameter") {
    MlpParams params = zero_params(spec);
    params.weights[0](0, 0) = 0.7;
    AdamOptimizer opt(spec, 1e-3);
    MlpGrads grads = zero_params(spec);
    grads.weights[0](0, 0) = 1.0;
    opt.apply(params, grads);
    CHECK(params.weights[0](0, 0) < 0.7);
  }

  SUBCASE("non-finite gradients are rejected") {
    MlpParams params = zero_params(spec);
    AdamOptimizer opt(spec, 1e-3);
    MlpGrads grads = zero_params(spec);
    grads.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(opt.apply(params, grads), NumericError);
  }
}

TEST_CASE("parameters survive a JSON round trip bit for bit") {
  std::mt19937_64 rng(21);
  const MlpSpec spec{5, {32, 32, 16}, 2, Activation::kTanh, Head::kLinearQ};
  const MlpParams params = init_params(spec, rng);

  const nlohmann::json j = mlp_to_json(spec, params);
  MlpSpec spec2;
  MlpParams params2;
  mlp_from_json(j, spec2, params2);

  CHECK(spec2.input_dim == spec.input_dim);
  CHECK(spec2.hidden == spec.hidden);
  CHECK(spec2.head == spec.head);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    CHECK(params2.weights[l] == params.weights[l]);
    CHECK(params2.biases[l] == params.biases[l]);
  }

  nlohmann::json truncated = j;
  truncated["layers"][0]["weights"].erase(0);
  CHECK_THROWS_AS(mlp_from_json(truncated, spec2, params2), ValidationError);
}

TEST_CASE("a one-hidden-unit net separates a linear toy set within 1000 steps") {
  // four points on a line, labels by sign
  const Eigen::Vector4d xs{-1.0, -0.4, 0.4, 1.0};
  const std::vector<int> labels{0, 0, 1, 1};

  const MlpSpec spec{1, {1}, 2, Activation::kTanh, Head::kSoftmaxPolicy};
  std::mt19937_64 rng(5);
  MlpParams params = init_params(spec, rng);
  AdamOptimizer opt(spec, 1e-2);

  Eigen::MatrixXd inputs(4, 1);
  inputs.col(0) = xs;

  for (int it = 0; it < 1000; ++it) {
    const Eigen::MatrixXd probs = forward_batch(spec, params, inputs);
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(4, 2);
    for (int i = 0; i < 4; ++i) {
      // cross-entropy on the true class
      upstream(i, labels[i]) = -1.0 / std::max(probs(i, labels[i]), 1e-9) / 4.0;
    }
    opt.apply(params, backward_batch(spec, params, inputs, upstream));
  }

  const Eigen::MatrixXd probs = forward_batch(spec, params, inputs);
  for (int i = 0; i < 4; ++i) {
    const int predicted = probs(i, 1) > probs(i, 0) ? 1 : 0;
    CHECK(predicted == labels[i]);
  }
}
