#include "enose/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace enose {

namespace {

constexpr std::array<std::string_view, kClasses> kLabelNames = {
    "none", "acetone", "floor_cleaner", "isopropyl_alcohol", "lighter_gas"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

ChemicalClass class_from_index(std::size_t index) {
  if (index >= kClasses) throw std::out_of_range("class index out of range: " + std::to_string(index));
  return static_cast<ChemicalClass>(index);
}

std::string_view label_name(ChemicalClass c) { return kLabelNames.at(index_of(c)); }

std::optional<ChemicalClass> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kClasses; ++i)
    if (kLabelNames[i] == name) return static_cast<ChemicalClass>(i);
  return std::nullopt;
}

SensorFrame::SensorFrame(const ChannelArray& channels) : channels_(channels) {
  for (std::size_t i = 0; i < kChannels; ++i)
    if (!std::isfinite(channels_[i]))
      throw std::invalid_argument("non-finite value in channel " + std::string(kChannelNames[i]));
}

ClassVector encode_one_hot(ChemicalClass label) {
  ClassVector v{};
  v[index_of(label)] = 1.0;
  return v;
}

Decision decode_argmax(std::span<const double, kClasses> outputs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kClasses; ++i)
    if (outputs[i] > outputs[best]) best = i;
  return {static_cast<ChemicalClass>(best), outputs[best]};
}

ChannelArray Scaler::apply(const ChannelArray& channels) const {
  ChannelArray out{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    const double span = max[i] - min[i];
    if (!(span > 0.0)) {
      out[i] = 0.5;
      continue;
    }
    out[i] = std::clamp((channels[i] - min[i]) / span, 0.0, 1.0);
  }
  return out;
}

ChannelArray Scaler::apply(const SensorFrame& frame) const { return apply(frame.channels()); }

Scaler fit_scaler(const Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("cannot fit scaler on an empty dataset");
  Scaler s;
  s.min = s.max = dataset.samples.front().frame.channels();
  for (const auto& sample : dataset.samples) {
    for (std::size_t i = 0; i < kChannels; ++i) {
      s.min[i] = std::min(s.min[i], sample.frame[i]);
      s.max[i] = std::max(s.max[i], sample.frame[i]);
    }
  }
  return s;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format real");
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  // from_chars rejects a leading '+', which is fine for our own output.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

Dataset parse_dataset(std::string_view text, std::string provenance) {
  using Kind = DatasetError::Kind;
  Dataset ds;
  ds.provenance = std::move(provenance);
  bool header_seen = false;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kDatasetHeader)
        throw DatasetError(Kind::BadHeader, line_no,
                           "line " + std::to_string(line_no) + ": expected header '" +
                               std::string(kDatasetHeader) + "'");
      header_seen = true;
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != kChannels + 1)
      throw DatasetError(Kind::WrongColumnCount, line_no,
                         "line " + std::to_string(line_no) + ": malformed row, expected " +
                             std::to_string(kChannels + 1) + " columns, got " +
                             std::to_string(fields.size()));
    ChannelArray channels{};
    for (std::size_t i = 0; i < kChannels; ++i) {
      auto v = parse_real(fields[i]);
      if (!v || !std::isfinite(*v))
        throw DatasetError(Kind::MalformedRow, line_no,
                           "line " + std::to_string(line_no) + ": malformed row, bad value for " +
                               std::string(kChannelNames[i]) + ": '" + std::string(fields[i]) + "'");
      channels[i] = *v;
    }
    auto label_text = trim(fields[kChannels]);
    auto label = parse_label(label_text);
    if (!label)
      throw DatasetError(Kind::UnknownLabel, line_no,
                         "line " + std::to_string(line_no) + ": unknown label '" +
                             std::string(label_text) + "'");
    ds.samples.push_back({SensorFrame(channels), *label});
  }
  if (!header_seen) throw DatasetError(Kind::BadHeader, 0, "dataset has no header line");
  return ds;
}

std::string format_dataset(const Dataset& dataset) {
  std::string out;
  out.reserve(64 * (dataset.size() + 1));
  out += kDatasetHeader;
  out += '\n';
  for (const auto& s : dataset.samples) {
    for (std::size_t i = 0; i < kChannels; ++i) {
      out += format_real(s.frame[i]);
      out += ',';
    }
    out += label_name(s.label);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::MissingFile, 0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError(DatasetError::Kind::Io, 0, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DatasetError(DatasetError::Kind::Io, 0, "write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, format_dataset(dataset));
}

}  // namespace enose
