#include "enose/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace enose {

double log_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

SigmoidTable::SigmoidTable(double lower, double upper, std::size_t n)
    : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
    throw std::invalid_argument("sigmoid table needs finite bounds with lower < upper");
  if (n < 2) throw std::invalid_argument("sigmoid table needs at least 2 entries");
  step_ = (upper - lower) / static_cast<double>(n - 1);
  inv_step_ = 1.0 / step_;
  values_.resize(n);
  for (std::size_t i = 0; i < n; ++i) values_[i] = log_sigmoid(node(i));
}

double SigmoidTable::node(std::size_t i) const {
  if (i + 1 == values_.size()) return upper_;
  return lower_ + static_cast<double>(i) * step_;
}

SigmoidTable build_sigmoid_table(double lower, double upper, std::size_t n) {
  return SigmoidTable(lower, upper, n);
}

std::string_view activation_name(ActivationMode mode) {
  return mode == ActivationMode::Exact ? "exact" : "table";
}

std::optional<ActivationMode> parse_activation(std::string_view name) {
  if (name == "exact") return ActivationMode::Exact;
  if (name == "table") return ActivationMode::Table;
  return std::nullopt;
}

void NetworkConfig::validate() const {
  if (hidden == 0) throw std::invalid_argument("hidden layer size must be >= 1");
  if (!std::isfinite(table.lower) || !std::isfinite(table.upper) || !(table.lower < table.upper))
    throw std::invalid_argument("table bounds must satisfy lower < upper");
  if (table.entries < 2) throw std::invalid_argument("table needs at least 2 entries");
}

Network::Network(NetworkConfig config)
    : Network(config, Matrix(config.hidden, kInputs), std::vector<double>(config.hidden, 0.0),
              Matrix(kOutputs, config.hidden), std::vector<double>(kOutputs, 0.0)) {}

Network::Network(NetworkConfig config, Matrix w1, std::vector<double> b1, Matrix w2,
                 std::vector<double> b2)
    : config_(config), w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  config_.validate();
  const auto z = config_.hidden;
  if (w1_.rows() != z || w1_.cols() != kInputs || b1_.size() != z || w2_.rows() != kOutputs ||
      w2_.cols() != z || b2_.size() != kOutputs)
    throw std::invalid_argument("network weight shapes do not match 7-" + std::to_string(z) + "-5");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(w1_.data().begin(), w1_.data().end(), finite) ||
      !std::all_of(b1_.begin(), b1_.end(), finite) ||
      !std::all_of(w2_.data().begin(), w2_.data().end(), finite) ||
      !std::all_of(b2_.begin(), b2_.end(), finite))
    throw std::invalid_argument("network weights must be finite");
  if (config_.activation == ActivationMode::Table)
    table_ = std::make_shared<const SigmoidTable>(config_.table.lower, config_.table.upper,
                                                  config_.table.entries);
}

Network Network::with_activation(ActivationMode mode) const {
  NetworkConfig cfg = config_;
  cfg.activation = mode;
  return Network(cfg, w1_, b1_, w2_, b2_);
}

std::size_t Network::parameter_count() const {
  return w1_.data().size() + b1_.size() + w2_.data().size() + b2_.size();
}

bool Network::same_weights(const Network& other) const {
  return config_ == other.config_ && w1_ == other.w1_ && b1_ == other.b1_ && w2_ == other.w2_ &&
         b2_ == other.b2_;
}

void forward_into(const Network& net, std::span<const double, kInputs> input,
                  std::span<double> hidden, std::span<double, kOutputs> output) {
  const auto z = net.hidden_size();
  const Matrix& w1 = net.w1();
  const Matrix& w2 = net.w2();
  for (std::size_t j = 0; j < z; ++j) {
    double a = net.b1()[j];
    const auto row = w1.row(j);
    for (std::size_t i = 0; i < kInputs; ++i) a += row[i] * input[i];
    hidden[j] = net.activate(a);
  }
  for (std::size_t k = 0; k < kOutputs; ++k) {
    double a = net.b2()[k];
    const auto row = w2.row(k);
    for (std::size_t j = 0; j < z; ++j) a += row[j] * hidden[j];
    output[k] = net.activate(a);
  }
}

ForwardResult forward(const Network& network, std::span<const double> input) {
  if (input.size() != kInputs)
    throw std::invalid_argument("forward expects 7 inputs, got " + std::to_string(input.size()));
  ForwardResult r;
  r.hidden.resize(network.hidden_size());
  forward_into(network, input.first<kInputs>(), r.hidden, r.output);
  return r;
}

Gradients Gradients::zeros_like(const Network& network) {
  const auto z = network.hidden_size();
  return {Matrix(z, kInputs), std::vector<double>(z, 0.0), Matrix(kOutputs, z),
          std::vector<double>(kOutputs, 0.0)};
}

namespace {

// Backpropagation into a preallocated gradient buffer.
void backprop(const Network& net, std::span<const double, kInputs> input,
              std::span<const double, kOutputs> target, std::vector<double>& hidden,
              std::vector<double>& delta_hidden, Gradients& g) {
  const auto z = net.hidden_size();
  ClassVector out{};
  forward_into(net, input, hidden, out);

  ClassVector delta_out{};
  for (std::size_t k = 0; k < kOutputs; ++k)
    delta_out[k] = (out[k] - target[k]) * out[k] * (1.0 - out[k]);

  for (std::size_t k = 0; k < kOutputs; ++k) {
    auto row = g.w2.row(k);
    for (std::size_t j = 0; j < z; ++j) row[j] = delta_out[k] * hidden[j];
    g.b2[k] = delta_out[k];
  }

  for (std::size_t j = 0; j < z; ++j) {
    double back = 0.0;
    for (std::size_t k = 0; k < kOutputs; ++k) back += net.w2()(k, j) * delta_out[k];
    delta_hidden[j] = back * hidden[j] * (1.0 - hidden[j]);
  }

  for (std::size_t j = 0; j < z; ++j) {
    auto row = g.w1.row(j);
    for (std::size_t i = 0; i < kInputs; ++i) row[i] = delta_hidden[j] * input[i];
    g.b1[j] = delta_hidden[j];
  }
}

void require_exact(const Network& net, const char* what) {
  if (net.activation() != ActivationMode::Exact)
    throw std::logic_error(std::string(what) + " requires an exact-activation network");
}

}  // namespace

Gradients gradient(const Network& network, std::span<const double> input,
                   std::span<const double> target) {
  require_exact(network, "gradient");
  if (input.size() != kInputs || target.size() != kOutputs)
    throw std::invalid_argument("gradient expects 7 inputs and 5 targets");
  auto g = Gradients::zeros_like(network);
  std::vector<double> hidden(network.hidden_size());
  std::vector<double> delta(network.hidden_size());
  backprop(network, input.first<kInputs>(), target.first<kOutputs>(), hidden, delta, g);
  return g;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0,1)");
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (!(init_half_range >= 0.0) || !std::isfinite(init_half_range))
    throw std::invalid_argument("init half range must be >= 0");
}

Network init_weights(const NetworkConfig& config, const TrainConfig& train_config) {
  config.validate();
  Network net(config);
  const double h = train_config.init_half_range;
  if (h == 0.0) return net;
  std::mt19937_64 rng(train_config.seed);
  std::uniform_real_distribution<double> dist(-h, h);
  auto fill = [&](std::span<double> values) {
    for (auto& v : values) v = dist(rng);
  };
  fill(net.w1().data());
  fill(net.b1());
  fill(net.w2().data());
  fill(net.b2());
  return net;
}

MomentumTrainer::MomentumTrainer(Network network, double learning_rate, double momentum)
    : network_(std::move(network)),
      learning_rate_(learning_rate),
      momentum_(momentum),
      velocity_(Gradients::zeros_like(network_)) {
  require_exact(network_, "training");
}

void MomentumTrainer::step(std::span<const double> input, std::span<const double> target) {
  auto g = gradient(network_, input, target);
  auto update = [&](std::span<double> w, std::span<double> v, std::span<const double> grad) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = -learning_rate_ * grad[i] + momentum_ * v[i];
      w[i] += v[i];
    }
  };
  update(network_.w1().data(), velocity_.w1.data(), g.w1.data());
  update(network_.b1(), velocity_.b1, g.b1);
  update(network_.w2().data(), velocity_.w2.data(), g.w2.data());
  update(network_.b2(), velocity_.b2, g.b2);
}

double mean_squared_error(const Network& network, std::span<const ChannelArray> inputs,
                          std::span<const ChemicalClass> labels) {
  if (inputs.size() != labels.size()) throw std::invalid_argument("inputs/labels size mismatch");
  if (inputs.empty()) return 0.0;
  std::vector<double> hidden(network.hidden_size());
  ClassVector out{};
  double sum = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    forward_into(network, inputs[n], hidden, out);
    const auto target = encode_one_hot(labels[n]);
    for (std::size_t k = 0; k < kOutputs; ++k) {
      const double d = out[k] - target[k];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(inputs.size() * kOutputs);
}

namespace {

bool all_finite(const Network& n) {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(n.w1().data().begin(), n.w1().data().end(), ok) &&
         std::all_of(n.b1().begin(), n.b1().end(), ok) &&
         std::all_of(n.w2().data().begin(), n.w2().data().end(), ok) &&
         std::all_of(n.b2().begin(), n.b2().end(), ok);
}

}  // namespace

TrainResult train(Network network, const Dataset& dataset, const Scaler& scaler,
                  const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("cannot train on an empty dataset");

  std::vector<ChannelArray> inputs;
  std::vector<ChemicalClass> labels;
  std::vector<ClassVector> targets;
  inputs.reserve(dataset.size());
  for (const auto& s : dataset.samples) {
    inputs.push_back(scaler.apply(s.frame));
    labels.push_back(s.label);
    targets.push_back(encode_one_hot(s.label));
  }

  MomentumTrainer trainer(std::move(network), config.learning_rate, config.momentum);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  TrainReport report;
  report.mse_history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (auto idx : order) trainer.step(inputs[idx], targets[idx]);
    const double mse = mean_squared_error(trainer.network(), inputs, labels);
    // Saturated sigmoids can keep the loss finite on overflowed weights.
    if (!std::isfinite(mse) || !all_finite(trainer.network()))
      throw DivergenceError(epoch, "training diverged: non-finite loss at epoch " + std::to_string(epoch));
    report.mse_history.push_back(mse);
    ++report.epochs_run;
  }
  return {std::move(trainer).release(), std::move(report)};
}

}  // namespace enose
