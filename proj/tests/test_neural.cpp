#include "doctest.h"

#include "uavnet/neural.hpp"

#include <cmath>
#include <sstream>

using namespace uavnet;
using namespace uavnet::neural;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("dense forward: trivial and hand-computed cases") {
  SUBCASE("zero parameters give zero output") {
    DenseNet<double> net({3, 5, 2}, Activation::Relu, Activation::Identity);
    VectorXd x(3);
    x << 0.1, -0.7, 0.9;
    CHECK(net.forward(x).isZero());
  }
  SUBCASE("identity layer passes the input through") {
    DenseNet<double> net({3, 3}, Activation::Relu, Activation::Identity);
    net.layers()[0].weights = MatrixXd::Identity(3, 3);
    VectorXd x(3);
    x << 0.1, -0.7, 0.9;
    CHECK(net.forward(x) == x);
  }
  SUBCASE("2-2-1 network") {
    DenseNet<double> net({2, 2, 1}, Activation::Relu, Activation::Identity);
    net.layers()[0].weights << 1.0, -1.0, 0.5, 2.0;
    net.layers()[0].bias << 0.0, -1.0;
    net.layers()[1].weights << 2.0, -3.0;
    net.layers()[1].bias << 0.5;
    VectorXd x(2);
    x << 0.5, -0.25;
    // hidden = relu([0.75, -1.25]) = [0.75, 0]; out = 1.5 + 0.5
    CHECK(net.forward(x)[0] == doctest::Approx(2.0));
  }
  SUBCASE("dimension mismatch throws") {
    DenseNet<double> net({2, 1}, Activation::Relu, Activation::Identity);
    CHECK_THROWS_AS(net.forward(VectorXd::Zero(3)), std::invalid_argument);
  }
}

TEST_CASE("dense gradients match finite differences over 20 seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    DenseNet<double> net({4, 8, 1}, Activation::Relu, Activation::Identity, rng);
    const MatrixXd x = random_matrix(rng, 4, 6);
    const MatrixXd t = random_matrix(rng, 1, 6);
    const auto report = grad_check(net, x, t);
    CHECK(report.max_relative_error < 1e-4);
  }
}

TEST_CASE("dense input gradient matches finite differences") {
  Rng rng(17);
  DenseNet<double> net({5, 12, 7, 2}, Activation::Tanh, Activation::Tanh, rng);
  MatrixXd x = random_matrix(rng, 5, 3, -0.9, 0.9);
  const MatrixXd t = random_matrix(rng, 2, 3);
  DenseNet<double>::Tape tape;
  const MatrixXd out = net.forward_batch(x, tape);
  MatrixXd dx;
  net.backward(tape, mse_gradient<double>(out, t), &dx);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + 1e-5;
    const double up = mse<double>(net.forward_batch(x), t);
    x.data()[i] = saved - 1e-5;
    const double down = mse<double>(net.forward_batch(x), t);
    x.data()[i] = saved;
    const double numeric = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(numeric - dx.data()[i]) /
                                std::max({std::abs(numeric), std::abs(dx.data()[i]), 1e-6}));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("zero-gradient case: target equals output") {
  Rng rng(3);
  DenseNet<double> net({4, 8, 1}, Activation::Relu, Activation::Identity, rng);
  const MatrixXd x = random_matrix(rng, 4, 5);
  const MatrixXd t = net.forward_batch(x);
  const auto report = grad_check(net, x, t);
  CHECK(report.max_absolute_error < 1e-8);

  const VectorXd before = net.parameters();
  AdamOptimizer<double> adam;
  const double loss = train_step(net, x, t, adam);
  CHECK(loss == 0.0);
  CHECK(net.parameters() == before);
}

TEST_CASE("training fits y = 3x") {
  Rng rng(42);
  DenseNet<double> net({1, 1}, Activation::Relu, Activation::Identity, rng);
  AdamOptimizer<double> adam(0.05);
  MatrixXd x(1, 32);
  for (int i = 0; i < 32; ++i) x(0, i) = -1.0 + 2.0 * i / 31.0;
  const MatrixXd y = 3.0 * x;
  const double first = net.loss_and_gradient(x, y, nullptr);
  for (int step = 0; step < 500; ++step) train_step(net, x, y, adam);
  const double last = net.loss_and_gradient(x, y, nullptr);
  CHECK(last * 100.0 <= first);
}

TEST_CASE("training is bit-deterministic and stays finite") {
  auto run = [](int steps) {
    Rng rng(7);
    DenseNet<double> net({3, 16, 1}, Activation::Relu, Activation::Identity, rng);
    AdamOptimizer<double> adam;
    Rng data(8);
    for (int s = 0; s < steps; ++s) {
      const MatrixXd x = random_matrix(data, 3, 8);
      const MatrixXd y = (x.colwise().sum() * 0.3).array().sin().matrix();
      train_step(net, x, y, adam);
    }
    return net.parameters();
  };
  const VectorXd a = run(200);
  const VectorXd b = run(200);
  CHECK(a == b);
  CHECK(run(10000).allFinite());
}

TEST_CASE("non-finite loss aborts training") {
  DenseNet<double> net({1, 1}, Activation::Relu, Activation::Identity);
  AdamOptimizer<double> adam;
  MatrixXd x(1, 1);
  x << 0.5;
  MatrixXd y(1, 1);
  y << NAN;
  CHECK_THROWS_AS(train_step(net, x, y, adam), DivergenceError);
  CHECK_THROWS_AS(train_step(net, MatrixXd(1, 0), MatrixXd(1, 0), adam), std::invalid_argument);
}

TEST_CASE("dense checkpoint round-trips bit-exactly") {
  Rng rng(99);
  DenseNet<double> net({6, 32, 16, 1}, Activation::Relu, Activation::Tanh, rng);
  std::stringstream ss;
  net.save(ss);
  const auto loaded = DenseNet<double>::load(ss);
  CHECK(loaded.sizes() == net.sizes());
  CHECK(loaded.output_activation() == Activation::Tanh);
  CHECK(loaded.parameters() == net.parameters());
  std::stringstream bad("uavnet-dense 2\n");
  CHECK_THROWS(DenseNet<double>::load(bad));
}

TEST_CASE("recurrent cell: zero weights keep a zero state") {
  RecurrentCell<double> cell(2, 4);
  RecurrentCell<double>::Sequence seq(5, MatrixXd::Constant(2, 1, 0.7));
  CHECK(cell.final_hidden(seq).isZero());
  CHECK_THROWS(cell.final_hidden({}));
  CHECK_THROWS(cell.final_hidden({MatrixXd::Zero(3, 1)}));
}

TEST_CASE("recurrent cell: hand-computed two-step recurrence") {
  RecurrentCell<double> cell(1, 1);
  // rows: input, forget, output, candidate; columns: [x, h]
  cell.gate_weights() << 0.5, -0.3, 0.8, 0.1, -0.4, 0.6, 1.2, -0.7;
  cell.gate_bias() << 0.1, 0.2, -0.1, 0.05;
  cell.head_weights() << 2.0;
  cell.head_bias() = -0.5;
  const double xs[2] = {0.6, -0.2};
  double h = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double i = sig(0.5 * x - 0.3 * h + 0.1);
    const double f = sig(0.8 * x + 0.1 * h + 0.2);
    const double o = sig(-0.4 * x + 0.6 * h - 0.1);
    const double g = std::tanh(1.2 * x - 0.7 * h + 0.05);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
  CHECK(cell.final_hidden({MatrixXd::Constant(1, 1, 0.6), MatrixXd::Constant(1, 1, -0.2)})(0, 0) ==
        doctest::Approx(h).epsilon(1e-14));
  CHECK(cell.predict_one({0.6, -0.2}) == doctest::Approx(2.0 * h - 0.5).epsilon(1e-14));
}

TEST_CASE("recurrent cell: constant input drives the state to a fixed point") {
  Rng rng(5);
  RecurrentCell<double> cell(1, 6, rng);
  auto state = cell.initial_state(1);
  const MatrixXd x = MatrixXd::Constant(1, 1, 0.4);
  double first_delta = -1.0;
  double last_delta = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto next = cell.step(state, x);
    const double delta = (next.hidden - state.hidden).norm();
    if (t == 1) first_delta = delta;
    last_delta = delta;
    state = next;
  }
  CHECK(last_delta < first_delta);
  CHECK(last_delta < 1e-6);
}

TEST_CASE("recurrent gradients match finite differences over 20 seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 100);
    RecurrentCell<double> cell(2, 5, rng);
    RecurrentCell<double>::Sequence seq;
    for (int t = 0; t < 3; ++t) seq.push_back(random_matrix(rng, 2, 4));
    const VectorXd target = random_matrix(rng, 4, 1);
    const auto report = grad_check(cell, seq, target);
    CHECK(report.max_relative_error < 1e-4);
  }
}

TEST_CASE("recurrent training learns a constant and checkpoints round-trip") {
  Rng rng(6);
  RecurrentCell<double> cell(1, 8, rng);
  AdamOptimizer<double> adam(1e-2);
  RecurrentCell<double>::Sequence seq(6, MatrixXd::Constant(1, 1, 0.3));
  VectorXd target = VectorXd::Constant(1, 0.3);
  for (int s = 0; s < 500; ++s) train_step(cell, seq, target, adam);
  CHECK(std::abs(cell.predict(seq)[0] - 0.3) < 0.015);

  std::stringstream ss;
  cell.save(ss);
  const auto loaded = RecurrentCell<double>::load(ss);
  CHECK(loaded.parameters() == cell.parameters());
}

TEST_CASE("single precision instantiation") {
  Rng rng(1);
  DenseNet<float> net({2, 4, 1}, Activation::Relu, Activation::Identity, rng);
  AdamOptimizer<float> adam;
  Eigen::MatrixXf x = Eigen::MatrixXf::Constant(2, 3, 0.5f);
  Eigen::MatrixXf y = Eigen::MatrixXf::Constant(1, 3, 0.25f);
  const float loss = train_step(net, x, y, adam);
  CHECK(std::isfinite(loss));
}
