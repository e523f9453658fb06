#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enose {

inline constexpr std::size_t kChannels = 7;
inline constexpr std::size_t kGasChannels = 5;
inline constexpr std::size_t kClasses = 5;

using ChannelArray = std::array<double, kChannels>;
using ClassVector = std::array<double, kClasses>;

// Channel order shared by SensorFrame, the dataset CSV and the wire format.
enum class Channel : std::uint8_t {
  Mq2 = 0,
  Mq135 = 1,
  Mq3 = 2,
  Tgs2610 = 3,
  Tgs2611 = 4,
  Humidity = 5,
  Temperature = 6,
};

inline constexpr std::array<std::string_view, kChannels> kChannelNames = {
    "mq2", "mq135", "mq3", "tgs2610", "tgs2611", "humidity", "temperature"};

enum class ChemicalClass : std::uint8_t {
  None = 0,
  Acetone = 1,
  FloorCleaner = 2,
  IsopropylAlcohol = 3,
  LighterGas = 4,
};

inline constexpr std::array<ChemicalClass, kClasses> kAllClasses = {
    ChemicalClass::None, ChemicalClass::Acetone, ChemicalClass::FloorCleaner,
    ChemicalClass::IsopropylAlcohol, ChemicalClass::LighterGas};

constexpr std::size_t index_of(ChemicalClass c) { return static_cast<std::size_t>(c); }

/// Throws std::out_of_range for indices >= kClasses.
ChemicalClass class_from_index(std::size_t index);

/// Lowercase identifier used in CSV files and CLI output ("floor_cleaner").
std::string_view label_name(ChemicalClass c);
std::optional<ChemicalClass> parse_label(std::string_view name);

/// One 7-channel reading: five gas responses, humidity (%RH), temperature (C).
class SensorFrame {
 public:
  SensorFrame() = default;
  /// Throws std::invalid_argument if any channel is NaN or infinite.
  explicit SensorFrame(const ChannelArray& channels);

  const ChannelArray& channels() const { return channels_; }
  double operator[](std::size_t i) const { return channels_[i]; }
  double operator[](Channel c) const { return channels_[static_cast<std::size_t>(c)]; }
  double humidity() const { return (*this)[Channel::Humidity]; }
  double temperature() const { return (*this)[Channel::Temperature]; }

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;

 private:
  ChannelArray channels_{};
};

struct LabeledSample {
  SensorFrame frame;
  ChemicalClass label = ChemicalClass::None;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct Dataset {
  std::vector<LabeledSample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

ClassVector encode_one_hot(ChemicalClass label);

struct Decision {
  ChemicalClass label;
  double confidence;
};

/// Class of the maximal output; ties go to the lowest index.
Decision decode_argmax(std::span<const double, kClasses> outputs);

/// Per-channel min-max normalization to [0,1].
struct Scaler {
  ChannelArray min{};
  ChannelArray max{};

  /// Constant channels map to 0.5; values outside [min,max] are clamped.
  ChannelArray apply(const SensorFrame& frame) const;
  ChannelArray apply(const ChannelArray& channels) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Throws std::invalid_argument on an empty dataset.
Scaler fit_scaler(const Dataset& dataset);
inline ChannelArray apply_scaler(const Scaler& scaler, const SensorFrame& frame) {
  return scaler.apply(frame);
}

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, BadHeader, MalformedRow, UnknownLabel, WrongColumnCount, Io };

  DatasetError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

inline constexpr std::string_view kDatasetHeader =
    "mq2,mq135,mq3,tgs2610,tgs2611,humidity,temperature,label";

Dataset parse_dataset(std::string_view text, std::string provenance = {});
std::string format_dataset(const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);
/// Strict full-token parse; std::nullopt on any trailing garbage.
std::optional<double> parse_real(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace enose
