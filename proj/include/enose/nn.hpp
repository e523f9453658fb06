#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "enose/core.hpp"

namespace enose {

inline constexpr std::size_t kInputs = kChannels;
inline constexpr std::size_t kOutputs = kClasses;

/// Row-major dense matrix; sized once at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Activation

/// Numerically stable logistic function 1/(1+exp(-x)).
double log_sigmoid(double x);

/// Uniformly sampled logistic function with linear interpolation between
/// nodes and clamping outside [lower, upper].
class SigmoidTable {
 public:
  /// Throws std::invalid_argument unless lower < upper (both finite) and n >= 2.
  SigmoidTable(double lower, double upper, std::size_t n);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t size() const { return values_.size(); }
  double step() const { return step_; }
  std::span<const double> values() const { return values_; }
  /// Abscissa of node i.
  double node(std::size_t i) const;

  double lookup(double x) const {
    if (!(x > lower_)) return values_.front();
    if (!(x < upper_)) return values_.back();
    const double pos = (x - lower_) * inv_step_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= values_.size() - 1) return values_.back();
    const double frac = pos - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
  }

 private:
  double lower_;
  double upper_;
  double step_;
  double inv_step_;
  std::vector<double> values_;
};

SigmoidTable build_sigmoid_table(double lower, double upper, std::size_t n);
inline double lookup_sigmoid(const SigmoidTable& table, double x) { return table.lookup(x); }

// ---------------------------------------------------------------------------
// Network

enum class ActivationMode { Exact, Table };

std::string_view activation_name(ActivationMode mode);
std::optional<ActivationMode> parse_activation(std::string_view name);

struct TableSpec {
  double lower = -8.0;
  double upper = 8.0;
  std::size_t entries = 2048;

  friend bool operator==(const TableSpec&, const TableSpec&) = default;
};

struct NetworkConfig {
  std::size_t hidden = 3;
  ActivationMode activation = ActivationMode::Exact;
  TableSpec table{};

  static constexpr std::size_t input_size = kInputs;
  static constexpr std::size_t output_size = kOutputs;

  /// Throws std::invalid_argument if hidden == 0 or the table spec is invalid.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// 7-Z-5 feedforward network with log-sigmoid hidden and output layers.
class Network {
 public:
  /// All-zero weights.
  explicit Network(NetworkConfig config);
  /// Throws std::invalid_argument on shape mismatch or non-finite weights.
  Network(NetworkConfig config, Matrix w1, std::vector<double> b1, Matrix w2, std::vector<double> b2);

  const NetworkConfig& config() const { return config_; }
  std::size_t hidden_size() const { return config_.hidden; }
  ActivationMode activation() const { return config_.activation; }

  const Matrix& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const Matrix& w2() const { return w2_; }
  const std::vector<double>& b2() const { return b2_; }
  Matrix& w1() { return w1_; }
  std::vector<double>& b1() { return b1_; }
  Matrix& w2() { return w2_; }
  std::vector<double>& b2() { return b2_; }

  /// Same weights, different activation mode. Builds the lookup table on demand.
  Network with_activation(ActivationMode mode) const;

  /// Table used in Table mode; null in Exact mode.
  const SigmoidTable* table() const { return table_.get(); }

  double activate(double x) const {
    return table_ ? table_->lookup(x) : log_sigmoid(x);
  }

  /// Number of trainable parameters: 7Z + Z + 5Z + 5.
  std::size_t parameter_count() const;

  /// True iff shapes, activation and every weight are bit-identical.
  bool same_weights(const Network& other) const;

 private:
  NetworkConfig config_;
  Matrix w1_;               // Z x 7
  std::vector<double> b1_;  // Z
  Matrix w2_;               // 5 x Z
  std::vector<double> b2_;  // 5
  std::shared_ptr<const SigmoidTable> table_;
};

struct ForwardResult {
  ClassVector output{};
  std::vector<double> hidden;
};

/// Throws std::invalid_argument if input.size() != 7.
ForwardResult forward(const Network& network, std::span<const double> input);

/// Allocation-free forward pass; `hidden` must hold Z values.
void forward_into(const Network& network, std::span<const double, kInputs> input,
                  std::span<double> hidden, std::span<double, kOutputs> output);

struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;

  static Gradients zeros_like(const Network& network);
};

/// Gradient of E = sum_k (o_k - t_k)^2 / 2 for one sample.
/// Throws std::logic_error for Table-mode networks.
Gradients gradient(const Network& network, std::span<const double> input,
                   std::span<const double> target);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 1000;
  std::uint64_t seed = 7;
  double init_half_range = 0.5;

  /// Throws std::invalid_argument on lr <= 0, momentum outside [0,1),
  /// epochs == 0 or a negative init range.
  void validate() const;
};

/// Weights and biases i.i.d. uniform in [-h, h] from a generator seeded with
/// train_config.seed. h == 0 yields an all-zero network.
Network init_weights(const NetworkConfig& config, const TrainConfig& train_config);

struct TrainReport {
  std::vector<double> mse_history;
  std::size_t epochs_run = 0;

  double final_mse() const { return mse_history.empty() ? 0.0 : mse_history.back(); }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  /// 0-based epoch at which training blew up.
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Online backpropagation with momentum:
///   v <- -lr * dE/dw + momentum * v;  w <- w + v
/// Velocities start at zero.
class MomentumTrainer {
 public:
  /// Throws std::logic_error if the network is not in Exact mode.
  MomentumTrainer(Network network, double learning_rate, double momentum);

  /// One update from one (normalized input, target) pair.
  void step(std::span<const double> input, std::span<const double> target);

  const Network& network() const { return network_; }
  Network release() && { return std::move(network_); }

 private:
  Network network_;
  double learning_rate_;
  double momentum_;
  Gradients velocity_;
};

/// Mean over samples and outputs of (o - t)^2 on already-normalized inputs.
double mean_squared_error(const Network& network, std::span<const ChannelArray> inputs,
                          std::span<const ChemicalClass> labels);

struct TrainResult {
  Network network;
  TrainReport report;
};

/// Runs exactly config.epochs passes of online updates. Each epoch visits the
/// samples in an order shuffled from config.seed. Throws std::invalid_argument
/// on an empty dataset and DivergenceError when the epoch loss or any weight
/// becomes non-finite.
TrainResult train(Network network, const Dataset& dataset, const Scaler& scaler,
                  const TrainConfig& config);

// ---------------------------------------------------------------------------
// Persistence

class ModelFormatError : public std::runtime_error {
 public:
  enum class Kind { Version, Dimension, Corrupt, Io };
  ModelFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Model {
  Network network;
  Scaler scaler;
};

inline constexpr std::string_view kModelMagic = "ENOSE-MODEL v1";

std::string format_model(const Network& network, const Scaler& scaler);
Model parse_model(std::string_view text);
void save_model(const Network& network, const Scaler& scaler, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace enose
