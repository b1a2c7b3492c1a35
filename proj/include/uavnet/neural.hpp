#ifndef UAVNET_NEURAL_HPP
#define UAVNET_NEURAL_HPP

// Small trainable models: dense feedforward nets, a gated recurrent (LSTM)
// cell with a scalar head, mean-squared-error loss and an Adam optimizer.
// Batches are stored column-wise: one sample per column.

#include "uavnet/common.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace uavnet::neural {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

inline const char* to_string(Activation act) {
  switch (act) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

inline Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

template <typename Derived>
auto activate(Activation act, const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out(z.rows(), z.cols());
  switch (act) {
    case Activation::Identity: out = z; break;
    case Activation::Relu: out = z.cwiseMax(Scalar(0)); break;
    case Activation::Tanh: out = z.array().tanh().matrix(); break;
    case Activation::Sigmoid:
      out = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
      break;
  }
  return out;
}

// d(act)/dz expressed through the pre-activation z and output y.
template <typename Scalar>
MatrixX<Scalar> activation_slope(Activation act, const MatrixX<Scalar>& z,
                                 const MatrixX<Scalar>& y) {
  switch (act) {
    case Activation::Identity: return MatrixX<Scalar>::Ones(z.rows(), z.cols());
    case Activation::Relu: return (z.array() > Scalar(0)).template cast<Scalar>().matrix();
    case Activation::Tanh: return (Scalar(1) - y.array().square()).matrix();
    case Activation::Sigmoid: return (y.array() * (Scalar(1) - y.array())).matrix();
  }
  return MatrixX<Scalar>::Ones(z.rows(), z.cols());
}

// Callers scale features to roughly [-1, 1]; checked in debug builds only.
inline constexpr double kInputBound = 1.0 + 1e-9;

template <typename Derived>
void debug_check_inputs([[maybe_unused]] const Eigen::MatrixBase<Derived>& x) {
#ifndef NDEBUG
  assert(x.size() == 0 || x.cwiseAbs().maxCoeff() <= kInputBound);
#endif
}

/// Mean of squared errors over every entry.
template <typename Scalar>
Scalar mse(const MatrixX<Scalar>& prediction, const MatrixX<Scalar>& target) {
  return (prediction - target).squaredNorm() / static_cast<Scalar>(prediction.size());
}

template <typename Scalar>
MatrixX<Scalar> mse_gradient(const MatrixX<Scalar>& prediction, const MatrixX<Scalar>& target) {
  return (Scalar(2) / static_cast<Scalar>(prediction.size())) * (prediction - target);
}

/// Adaptive moment estimation over a flat parameter vector.
template <typename Scalar = double>
struct AdamOptimizer {
  Scalar learning_rate = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  VectorX<Scalar> first_moment;
  VectorX<Scalar> second_moment;
  long step_count = 0;

  AdamOptimizer() = default;
  explicit AdamOptimizer(Scalar lr) : learning_rate(lr) {}

  void step(VectorX<Scalar>& params, const VectorX<Scalar>& grad) {
    if (first_moment.size() != params.size()) {
      first_moment = VectorX<Scalar>::Zero(params.size());
      second_moment = VectorX<Scalar>::Zero(params.size());
      step_count = 0;
    }
    ++step_count;
    first_moment = beta1 * first_moment + (Scalar(1) - beta1) * grad;
    second_moment = beta2 * second_moment + (Scalar(1) - beta2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - std::pow(beta1, static_cast<Scalar>(step_count));
    const Scalar c2 = Scalar(1) - std::pow(beta2, static_cast<Scalar>(step_count));
    params.array() -= learning_rate * (first_moment.array() / c1) /
                      ((second_moment.array() / c2).sqrt() + epsilon);
  }
};

template <typename Scalar = double>
class DenseNet {
public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  struct Layer {
    Matrix weights;  // out x in
    Vector bias;
  };

  /// Intermediate values kept for the backward pass.
  struct Tape {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
    std::vector<Matrix> post;    // activation of each layer
  };

  DenseNet() = default;

  /// Zero-initialized network.
  DenseNet(std::vector<int> sizes, Activation hidden, Activation output)
      : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
    if (sizes_.size() < 2) throw std::invalid_argument("DenseNet: need at least two layer sizes");
    for (int s : sizes_) {
      if (s <= 0) throw std::invalid_argument("DenseNet: layer sizes must be positive");
    }
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      layers_.push_back({Matrix::Zero(sizes_[l + 1], sizes_[l]), Vector::Zero(sizes_[l + 1])});
    }
  }

  /// Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  DenseNet(std::vector<int> sizes, Activation hidden, Activation output, Rng& rng)
      : DenseNet(std::move(sizes), hidden, output) {
    for (auto& layer : layers_) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(layer.weights.cols()));
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
        layer.weights.data()[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
        layer.bias[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
      }
    }
  }

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
    return n;
  }

  Vector forward(const Vector& x) const {
    Matrix out = forward_batch(Matrix(x));
    return out.col(0);
  }

  Matrix forward_batch(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Matrix z = layers_[l].weights * a;
      z.colwise() += layers_[l].bias;
      a = activate(activation_of(l), z);
    }
    return a;
  }

  Matrix forward_batch(const Matrix& x, Tape& tape) const {
    check_input(x);
    tape.inputs.clear();
    tape.pre.clear();
    tape.post.clear();
    Matrix a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      tape.inputs.push_back(a);
      Matrix z = layers_[l].weights * a;
      z.colwise() += layers_[l].bias;
      a = activate(activation_of(l), z);
      tape.pre.push_back(std::move(z));
      tape.post.push_back(a);
    }
    return a;
  }

  /// Flat parameter gradient given dL/d(output); optionally dL/d(input).
  Vector backward(const Tape& tape, const Matrix& d_output, Matrix* d_input = nullptr) const {
    Vector grad(parameter_count());
    std::vector<Eigen::Index> offsets = layer_offsets();
    Matrix delta = d_output;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      delta.array() *= activation_slope(activation_of(l), tape.pre[l], tape.post[l]).array();
      const auto& layer = layers_[l];
      const Eigen::Index w_size = layer.weights.size();
      Eigen::Map<Matrix>(grad.data() + offsets[l], layer.weights.rows(), layer.weights.cols()) =
          delta * tape.inputs[l].transpose();
      grad.segment(offsets[l] + w_size, layer.bias.size()) = delta.rowwise().sum();
      if (l > 0 || d_input != nullptr) {
        Matrix next = layer.weights.transpose() * delta;
        if (l == 0) {
          *d_input = std::move(next);
        } else {
          delta = std::move(next);
        }
      }
    }
    return grad;
  }

  /// Weights (column-major) then bias, layer by layer.
  Vector parameters() const {
    Vector flat(parameter_count());
    Eigen::Index pos = 0;
    for (const auto& layer : layers_) {
      flat.segment(pos, layer.weights.size()) =
          Eigen::Map<const Vector>(layer.weights.data(), layer.weights.size());
      pos += layer.weights.size();
      flat.segment(pos, layer.bias.size()) = layer.bias;
      pos += layer.bias.size();
    }
    return flat;
  }

  void set_parameters(const Vector& flat) {
    if (flat.size() != parameter_count()) {
      throw std::invalid_argument("DenseNet::set_parameters: size mismatch");
    }
    Eigen::Index pos = 0;
    for (auto& layer : layers_) {
      Eigen::Map<Vector>(layer.weights.data(), layer.weights.size()) =
          flat.segment(pos, layer.weights.size());
      pos += layer.weights.size();
      layer.bias = flat.segment(pos, layer.bias.size());
      pos += layer.bias.size();
    }
  }

  /// Batch MSE and its flat parameter gradient.
  Scalar loss_and_gradient(const Matrix& x, const Matrix& target, Vector* grad) const {
    Tape tape;
    const Matrix out = forward_batch(x, tape);
    if (out.rows() != target.rows() || out.cols() != target.cols()) {
      throw std::invalid_argument("DenseNet: target shape mismatch");
    }
    if (grad != nullptr) *grad = backward(tape, mse_gradient<Scalar>(out, target));
    return mse<Scalar>(out, target);
  }

  void save(std::ostream& os) const {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "uavnet-dense 1\n";
    buf << "sizes " << sizes_.size();
    for (int s : sizes_) buf << ' ' << s;
    buf << "\nactivations " << to_string(hidden_) << ' ' << to_string(output_) << '\n';
    const Vector flat = parameters();
    buf << "params " << flat.size() << '\n';
    for (Eigen::Index i = 0; i < flat.size(); ++i) buf << static_cast<double>(flat[i]) << '\n';
    os << buf.str();
  }

  static DenseNet load(std::istream& is) {
    is.imbue(std::locale::classic());
    std::string tag;
    int version = 0;
    if (!(is >> tag >> version) || tag != "uavnet-dense" || version != 1) {
      throw std::runtime_error("DenseNet::load: not a uavnet-dense v1 checkpoint");
    }
    std::size_t count = 0;
    if (!(is >> tag >> count) || tag != "sizes") throw std::runtime_error("DenseNet::load: sizes");
    std::vector<int> sizes(count);
    for (auto& s : sizes) {
      if (!(is >> s)) throw std::runtime_error("DenseNet::load: truncated sizes");
    }
    std::string hidden;
    std::string output;
    if (!(is >> tag >> hidden >> output) || tag != "activations") {
      throw std::runtime_error("DenseNet::load: activations");
    }
    DenseNet net(sizes, activation_from_string(hidden), activation_from_string(output));
    Eigen::Index n = 0;
    if (!(is >> tag >> n) || tag != "params" || n != net.parameter_count()) {
      throw std::runtime_error("DenseNet::load: parameter count mismatch");
    }
    Vector flat(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 0.0;
      if (!(is >> v)) throw std::runtime_error("DenseNet::load: truncated parameters");
      flat[i] = static_cast<Scalar>(v);
    }
    net.set_parameters(flat);
    return net;
  }

private:
  Activation activation_of(std::size_t layer) const {
    return layer + 1 == layers_.size() ? output_ : hidden_;
  }

  void check_input(const Matrix& x) const {
    if (x.rows() != input_dim()) {
      std::ostringstream msg;
      msg << "DenseNet: input has " << x.rows() << " rows, expected " << input_dim();
      throw std::invalid_argument(msg.str());
    }
    debug_check_inputs(x);
  }

  std::vector<Eigen::Index> layer_offsets() const {
    std::vector<Eigen::Index> offsets;
    Eigen::Index pos = 0;
    for (const auto& layer : layers_) {
      offsets.push_back(pos);
      pos += layer.weights.size() + layer.bias.size();
    }
    return offsets;
  }

  std::vector<int> sizes_;
  Activation hidden_ = Activation::Relu;
  Activation output_ = Activation::Identity;
  std::vector<Layer> layers_;
};

/// One optimizer step on a batch (columns = samples). Returns the batch MSE
/// measured before the update.
template <typename Scalar>
Scalar train_step(DenseNet<Scalar>& net, const MatrixX<Scalar>& x, const MatrixX<Scalar>& target,
                  AdamOptimizer<Scalar>& optimizer) {
  if (x.cols() == 0) throw std::invalid_argument("train_step: empty batch");
  VectorX<Scalar> grad;
  const Scalar loss = net.loss_and_gradient(x, target, &grad);
  if (!std::isfinite(static_cast<double>(loss)) || !grad.allFinite()) {
    std::ostringstream msg;
    msg << "train_step: non-finite loss (" << loss << ") on batch of " << x.cols();
    throw DivergenceError(msg.str());
  }
  VectorX<Scalar> params = net.parameters();
  optimizer.step(params, grad);
  net.set_parameters(params);
  return loss;
}

/// LSTM cell with a linear scalar read-out of the final hidden state.
/// Gate rows are stacked [input; forget; output; candidate].
template <typename Scalar = double>
class RecurrentCell {
public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using Sequence = std::vector<Matrix>;  // one (input_dim x batch) matrix per step

  struct State {
    Matrix hidden;
    Matrix cell;
  };

  RecurrentCell() = default;

  RecurrentCell(int input_dim, int hidden_dim)
      : input_dim_(input_dim), hidden_dim_(hidden_dim),
        gate_weights_(Matrix::Zero(4 * hidden_dim, input_dim + hidden_dim)),
        gate_bias_(Vector::Zero(4 * hidden_dim)), head_weights_(Vector::Zero(hidden_dim)),
        head_bias_(0) {
    if (input_dim <= 0 || hidden_dim <= 0) {
      throw std::invalid_argument("RecurrentCell: dimensions must be positive");
    }
  }

  RecurrentCell(int input_dim, int hidden_dim, Rng& rng) : RecurrentCell(input_dim, hidden_dim) {
    const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(input_dim + hidden_dim));
    for (Eigen::Index i = 0; i < gate_weights_.size(); ++i) {
      gate_weights_.data()[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
    }
    for (Eigen::Index i = 0; i < gate_bias_.size(); ++i) {
      gate_bias_[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
    }
    const Scalar head_bound = Scalar(1) / std::sqrt(static_cast<Scalar>(hidden_dim));
    for (Eigen::Index i = 0; i < head_weights_.size(); ++i) {
      head_weights_[i] = static_cast<Scalar>(uniform(rng, -head_bound, head_bound));
    }
    head_bias_ = static_cast<Scalar>(uniform(rng, -head_bound, head_bound));
  }

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  Matrix& gate_weights() { return gate_weights_; }
  Vector& gate_bias() { return gate_bias_; }
  Vector& head_weights() { return head_weights_; }
  Scalar& head_bias() { return head_bias_; }

  Eigen::Index parameter_count() const {
    return gate_weights_.size() + gate_bias_.size() + head_weights_.size() + 1;
  }

  State initial_state(Eigen::Index batch) const {
    return {Matrix::Zero(hidden_dim_, batch), Matrix::Zero(hidden_dim_, batch)};
  }

  State step(const State& prev, const Matrix& x) const {
    Gates g = gates(prev, x);
    return {g.h, g.c};
  }

  /// Runs a sequence from a zero state and returns the final hidden state.
  Matrix final_hidden(const Sequence& seq) const {
    check_sequence(seq);
    State s = initial_state(seq.front().cols());
    for (const auto& x : seq) s = step(s, x);
    return s.hidden;
  }

  /// Scalar head applied to the final hidden state, one value per batch column.
  Vector predict(const Sequence& seq) const {
    return (head_weights_.transpose() * final_hidden(seq)).transpose().array() + head_bias_;
  }

  Scalar predict_one(const std::vector<Scalar>& series) const {
    Sequence seq;
    seq.reserve(series.size());
    for (Scalar v : series) seq.push_back(Matrix::Constant(1, 1, v));
    return predict(seq)[0];
  }

  /// MSE of the head output against one target per column, with BPTT gradient.
  Scalar loss_and_gradient(const Sequence& seq, const Vector& target, Vector* grad) const {
    check_sequence(seq);
    const Eigen::Index batch = seq.front().cols();
    if (target.size() != batch) throw std::invalid_argument("RecurrentCell: target size");
    std::vector<Gates> trace;
    trace.reserve(seq.size());
    State s = initial_state(batch);
    for (const auto& x : seq) {
      trace.push_back(gates(s, x));
      s = {trace.back().h, trace.back().c};
    }
    const Vector out = (head_weights_.transpose() * s.hidden).transpose().array() + head_bias_;
    const Scalar loss = (out - target).squaredNorm() / static_cast<Scalar>(batch);
    if (grad == nullptr) return loss;

    const Vector d_out = (Scalar(2) / static_cast<Scalar>(batch)) * (out - target);
    Matrix d_gate_w = Matrix::Zero(gate_weights_.rows(), gate_weights_.cols());
    Vector d_gate_b = Vector::Zero(gate_bias_.size());
    const Vector d_head_w = s.hidden * d_out;
    const Scalar d_head_b = d_out.sum();

    const int H = hidden_dim_;
    Matrix dh = head_weights_ * d_out.transpose();  // H x batch
    Matrix dc = Matrix::Zero(H, batch);
    for (std::size_t t = trace.size(); t-- > 0;) {
      const Gates& g = trace[t];
      const Matrix tanh_c = g.c.array().tanh().matrix();
      const Matrix d_o = (dh.array() * tanh_c.array()).matrix();
      dc.array() += dh.array() * g.o.array() * (Scalar(1) - tanh_c.array().square());
      const Matrix d_i = (dc.array() * g.g.array()).matrix();
      const Matrix d_f = (dc.array() * g.c_prev.array()).matrix();
      const Matrix d_g = (dc.array() * g.i.array()).matrix();
      Matrix dz(4 * H, batch);
      dz.middleRows(0, H) = (d_i.array() * g.i.array() * (Scalar(1) - g.i.array())).matrix();
      dz.middleRows(H, H) = (d_f.array() * g.f.array() * (Scalar(1) - g.f.array())).matrix();
      dz.middleRows(2 * H, H) = (d_o.array() * g.o.array() * (Scalar(1) - g.o.array())).matrix();
      dz.middleRows(3 * H, H) = (d_g.array() * (Scalar(1) - g.g.array().square())).matrix();
      d_gate_w += dz * g.xh.transpose();
      d_gate_b += dz.rowwise().sum();
      const Matrix d_xh = gate_weights_.transpose() * dz;
      dh = d_xh.bottomRows(H);
      dc = (dc.array() * g.f.array()).matrix();
    }

    grad->resize(parameter_count());
    Eigen::Index pos = 0;
    grad->segment(pos, d_gate_w.size()) = Eigen::Map<const Vector>(d_gate_w.data(), d_gate_w.size());
    pos += d_gate_w.size();
    grad->segment(pos, d_gate_b.size()) = d_gate_b;
    pos += d_gate_b.size();
    grad->segment(pos, H) = d_head_w;
    pos += H;
    (*grad)[pos] = d_head_b;
    return loss;
  }

  Vector parameters() const {
    Vector flat(parameter_count());
    Eigen::Index pos = 0;
    flat.segment(pos, gate_weights_.size()) =
        Eigen::Map<const Vector>(gate_weights_.data(), gate_weights_.size());
    pos += gate_weights_.size();
    flat.segment(pos, gate_bias_.size()) = gate_bias_;
    pos += gate_bias_.size();
    flat.segment(pos, head_weights_.size()) = head_weights_;
    pos += head_weights_.size();
    flat[pos] = head_bias_;
    return flat;
  }

  void set_parameters(const Vector& flat) {
    if (flat.size() != parameter_count()) {
      throw std::invalid_argument("RecurrentCell::set_parameters: size mismatch");
    }
    Eigen::Index pos = 0;
    Eigen::Map<Vector>(gate_weights_.data(), gate_weights_.size()) =
        flat.segment(pos, gate_weights_.size());
    pos += gate_weights_.size();
    gate_bias_ = flat.segment(pos, gate_bias_.size());
    pos += gate_bias_.size();
    head_weights_ = flat.segment(pos, head_weights_.size());
    pos += head_weights_.size();
    head_bias_ = flat[pos];
  }

  void save(std::ostream& os) const {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "uavnet-recurrent 1\ndims " << input_dim_ << ' ' << hidden_dim_ << '\n';
    const Vector flat = parameters();
    buf << "params " << flat.size() << '\n';
    for (Eigen::Index i = 0; i < flat.size(); ++i) buf << static_cast<double>(flat[i]) << '\n';
    os << buf.str();
  }

  static RecurrentCell load(std::istream& is) {
    is.imbue(std::locale::classic());
    std::string tag;
    int version = 0;
    int in = 0;
    int hidden = 0;
    if (!(is >> tag >> version) || tag != "uavnet-recurrent" || version != 1) {
      throw std::runtime_error("RecurrentCell::load: not a uavnet-recurrent v1 checkpoint");
    }
    if (!(is >> tag >> in >> hidden) || tag != "dims") {
      throw std::runtime_error("RecurrentCell::load: dims");
    }
    RecurrentCell cell(in, hidden);
    Eigen::Index n = 0;
    if (!(is >> tag >> n) || tag != "params" || n != cell.parameter_count()) {
      throw std::runtime_error("RecurrentCell::load: parameter count mismatch");
    }
    Vector flat(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 0.0;
      if (!(is >> v)) throw std::runtime_error("RecurrentCell::load: truncated parameters");
      flat[i] = static_cast<Scalar>(v);
    }
    cell.set_parameters(flat);
    return cell;
  }

private:
  struct Gates {
    Matrix xh, c_prev, i, f, o, g, c, h;
  };

  static Matrix sigmoid(const Matrix& z) {
    return (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
  }

  Gates gates(const State& prev, const Matrix& x) const {
    if (x.rows() != input_dim_) throw std::invalid_argument("RecurrentCell: input dimension");
    const int H = hidden_dim_;
    Gates g;
    g.xh.resize(input_dim_ + H, x.cols());
    g.xh.topRows(input_dim_) = x;
    g.xh.bottomRows(H) = prev.hidden;
    Matrix z = gate_weights_ * g.xh;
    z.colwise() += gate_bias_;
    g.c_prev = prev.cell;
    g.i = sigmoid(z.middleRows(0, H));
    g.f = sigmoid(z.middleRows(H, H));
    g.o = sigmoid(z.middleRows(2 * H, H));
    g.g = z.middleRows(3 * H, H).array().tanh().matrix();
    g.c = (g.f.array() * prev.cell.array() + g.i.array() * g.g.array()).matrix();
    g.h = (g.o.array() * g.c.array().tanh()).matrix();
    return g;
  }

  void check_sequence(const Sequence& seq) const {
    if (seq.empty()) throw std::invalid_argument("RecurrentCell: empty sequence");
    for (const auto& x : seq) {
      if (x.rows() != input_dim_ || x.cols() != seq.front().cols()) {
        throw std::invalid_argument("RecurrentCell: inconsistent sequence shape");
      }
    }
  }

  int input_dim_ = 0;
  int hidden_dim_ = 0;
  Matrix gate_weights_;
  Vector gate_bias_;
  Vector head_weights_;
  Scalar head_bias_ = 0;
};

template <typename Scalar>
Scalar train_step(RecurrentCell<Scalar>& cell, const typename RecurrentCell<Scalar>::Sequence& seq,
                  const VectorX<Scalar>& target, AdamOptimizer<Scalar>& optimizer) {
  VectorX<Scalar> grad;
  const Scalar loss = cell.loss_and_gradient(seq, target, &grad);
  if (!std::isfinite(static_cast<double>(loss)) || !grad.allFinite()) {
    throw DivergenceError("train_step: non-finite recurrent loss");
  }
  VectorX<Scalar> params = cell.parameters();
  optimizer.step(params, grad);
  cell.set_parameters(params);
  return loss;
}

struct GradCheckReport {
  double max_relative_error = 0.0;  // |a - n| / max(|a|, |n|, scale_floor)
  double max_absolute_error = 0.0;
  Eigen::Index worst_index = -1;
};

/// Compares an analytic flat gradient with central finite differences of
/// `loss` over every parameter of `model`. `model` must expose
/// parameters()/set_parameters(); it is restored on return.
template <typename Model, typename LossFn>
GradCheckReport compare_with_finite_differences(Model& model, const Eigen::VectorXd& analytic,
                                                LossFn&& loss, double step = 1e-5,
                                                double scale_floor = 1e-6) {
  GradCheckReport report;
  auto params = model.parameters();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const auto saved = params[i];
    params[i] = saved + step;
    model.set_parameters(params);
    const double up = static_cast<double>(loss());
    params[i] = saved - step;
    model.set_parameters(params);
    const double down = static_cast<double>(loss());
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double diff = std::abs(numeric - analytic[i]);
    const double rel = diff / std::max({std::abs(numeric), std::abs(analytic[i]), scale_floor});
    report.max_absolute_error = std::max(report.max_absolute_error, diff);
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_index = i;
    }
  }
  model.set_parameters(params);
  return report;
}

inline GradCheckReport grad_check(DenseNet<double>& net, const Eigen::MatrixXd& x,
                                  const Eigen::MatrixXd& target, double step = 1e-5) {
  Eigen::VectorXd analytic;
  net.loss_and_gradient(x, target, &analytic);
  return compare_with_finite_differences(
      net, analytic, [&] { return net.loss_and_gradient(x, target, nullptr); }, step);
}

inline GradCheckReport grad_check(RecurrentCell<double>& cell,
                                  const RecurrentCell<double>::Sequence& seq,
                                  const Eigen::VectorXd& target, double step = 1e-5) {
  Eigen::VectorXd analytic;
  cell.loss_and_gradient(seq, target, &analytic);
  return compare_with_finite_differences(
      cell, analytic, [&] { return cell.loss_and_gradient(seq, target, nullptr); }, step);
}

}  // namespace uavnet::neural

#endif  // UAVNET_NEURAL_HPP
