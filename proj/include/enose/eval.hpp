#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "enose/core.hpp"
#include "enose/nn.hpp"

namespace enose {

/// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kClasses>, kClasses> counts{};

  void add(ChemicalClass truth, ChemicalClass predicted) {
    ++counts[index_of(truth)][index_of(predicted)];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline constexpr double kDefaultThreshold = 0.5;

struct EvalReport {
  ConfusionMatrix confusion;
  std::size_t samples = 0;
  double accuracy = 0.0;
  /// Non-target outputs strictly above the threshold.
  std::uint64_t fp_activations = 0;
  /// fp_activations / (samples * 4).
  double fp_rate = 0.0;
  /// Output k: activations above threshold over samples whose label is not k.
  std::array<std::uint64_t, kClasses> fp_per_class{};
  ClassVector fp_rate_per_class{};
  double threshold = kDefaultThreshold;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Throws std::invalid_argument unless 0 < threshold < 1.
void validate_threshold(double threshold);

EvalReport tally_serial(std::span<const ClassVector> outputs, std::span<const ChemicalClass> labels,
                        double threshold);
/// OpenMP reduction over samples; identical to tally_serial.
EvalReport tally(std::span<const ClassVector> outputs, std::span<const ChemicalClass> labels,
                 double threshold);

/// Scales, runs the network and tallies. Throws std::invalid_argument on an
/// empty dataset or a threshold outside (0,1).
EvalReport evaluate(const Network& network, const Scaler& scaler, const Dataset& dataset,
                    double threshold = kDefaultThreshold);

struct OpCount {
  std::size_t multiply_adds = 0;  // 7Z + 5Z
  std::size_t bias_adds = 0;      // Z + 5
  std::size_t total() const { return multiply_adds + bias_adds; }

  friend bool operator==(const OpCount&, const OpCount&) = default;
};

/// Per-inference arithmetic of a 7-Z-5 network.
OpCount inference_op_count(std::size_t hidden);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> test_indices;
  std::uint64_t fingerprint = 0;
};

/// Per-class seeded shuffle, first round(train_fraction * n_c) to train.
Split stratified_split(const Dataset& dataset, std::uint64_t seed, double train_fraction = 0.7);

struct ArchitectureResult {
  std::size_t hidden = 0;
  EvalReport eval;
  double final_mse = 0.0;
  double train_seconds = 0.0;
  OpCount ops;
  std::uint64_t split_fingerprint = 0;
};

struct ComparisonReport {
  std::vector<ArchitectureResult> architectures;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
};

/// Trains every hidden size from the same seed on one shared stratified 70/30
/// split and evaluates each on the held-out part.
ComparisonReport compare_architectures(const Dataset& dataset, const TrainConfig& train_config,
                                       std::span<const std::size_t> hidden_sizes,
                                       double threshold = kDefaultThreshold);

std::string format_eval_text(const EvalReport& report);
/// `key = value` lines; the confusion matrix as a bracketed row-per-line block.
std::string format_eval_kv(const EvalReport& report, const std::string& prefix = {});

std::string format_comparison_text(const ComparisonReport& report, bool include_timing = true);
std::string format_comparison_kv(const ComparisonReport& report, bool include_timing = true);

std::string hex64(std::uint64_t value);

}  // namespace enose
