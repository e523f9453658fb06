#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "enose/core.hpp"

namespace enose {

using GasArray = std::array<double, kGasChannels>;

inline constexpr double kReferenceHumidity = 50.0;     // %RH
inline constexpr double kReferenceTemperature = 25.0;  // C

/// Response distribution of the five gas sensors to one chemical.
struct ChemicalSignature {
  ChemicalClass chemical = ChemicalClass::None;
  GasArray mean_response{};
  GasArray noise_sigma{};
  GasArray humidity_coeff{};     // shift per %RH away from 50
  GasArray temperature_coeff{};  // shift per C away from 25

  void validate() const;
};

struct EnvProfile {
  double humidity_mean = 50.0;
  double humidity_sigma = 8.0;
  double temperature_mean = 25.0;
  double temperature_sigma = 3.0;

  void validate() const;
};

struct SimConfig {
  std::array<ChemicalSignature, kClasses> signatures;
  EnvProfile env;
  std::size_t samples_per_class = 40;
  std::uint64_t seed = 7;
  double overlap_factor = 1.0;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Defaults live in signatures.cpp. They are hand-picked constants, not
/// measured sensor data.
std::array<ChemicalSignature, kClasses> default_signatures();
SimConfig default_sim_config();

/// Seeded engine plus a standard-normal source.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}
  double gaussian() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// humidity ~ N clamped to [0,100]; temperature ~ N;
/// gas_i = max(0, mean_i + hc_i (h-50) + tc_i (t-25) + overlap * sigma_i * N(0,1)).
SensorFrame generate_sample(const ChemicalSignature& signature, const EnvProfile& env,
                            double overlap_factor, SimRng& rng);

/// samples_per_class frames for each class in class-index order.
Dataset generate_dataset(const SimConfig& config);

/// Fraction of samples whose nearest foreign-class centroid is strictly
/// closer (Euclidean, all 7 channels) than their own class centroid.
double measure_cluster_overlap(const Dataset& dataset);

/// Key-value config text. Required: seed, samples_per_class, overlap_factor,
/// humidity_mean, humidity_sigma, temperature_mean, temperature_sigma.
/// Optional per-class overrides: signature.<label>.{mean_response,
/// noise_sigma, humidity_coeff, temperature_coeff} = five reals.
/// Throws KeyValueError naming the offending key.
SimConfig parse_sim_config(std::string_view text);
std::string format_sim_config(const SimConfig& config);

}  // namespace enose
