#include "enose/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "enose/keyvalue.hpp"

namespace enose {

namespace {

bool all_finite(const GasArray& a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void ChemicalSignature::validate() const {
  const std::string who(label_name(chemical));
  if (!all_finite(mean_response) || !all_finite(noise_sigma) || !all_finite(humidity_coeff) ||
      !all_finite(temperature_coeff))
    throw std::invalid_argument("signature " + who + " has non-finite parameters");
  for (std::size_t i = 0; i < kGasChannels; ++i) {
    if (mean_response[i] < 0.0) throw std::invalid_argument("signature " + who + ": negative mean_response");
    if (noise_sigma[i] < 0.0) throw std::invalid_argument("signature " + who + ": negative noise_sigma");
  }
}

void EnvProfile::validate() const {
  if (!(humidity_mean >= 0.0 && humidity_mean <= 100.0))
    throw std::invalid_argument("humidity mean must lie in [0,100]");
  if (!(humidity_sigma >= 0.0) || !(temperature_sigma >= 0.0) || !std::isfinite(humidity_sigma) ||
      !std::isfinite(temperature_sigma) || !std::isfinite(temperature_mean))
    throw std::invalid_argument("environment sigmas must be finite and >= 0");
}

void SimConfig::validate() const {
  for (std::size_t c = 0; c < kClasses; ++c) {
    if (signatures[c].chemical != class_from_index(c))
      throw std::invalid_argument("signature slot " + std::to_string(c) + " holds the wrong class");
    signatures[c].validate();
  }
  env.validate();
  if (samples_per_class == 0) throw std::invalid_argument("samples_per_class must be >= 1");
  if (!(overlap_factor >= 0.0) || !std::isfinite(overlap_factor))
    throw std::invalid_argument("overlap_factor must be >= 0");
}

SensorFrame generate_sample(const ChemicalSignature& sig, const EnvProfile& env,
                            double overlap_factor, SimRng& rng) {
  const double h = std::clamp(env.humidity_mean + env.humidity_sigma * rng.gaussian(), 0.0, 100.0);
  const double t = env.temperature_mean + env.temperature_sigma * rng.gaussian();
  ChannelArray ch{};
  for (std::size_t i = 0; i < kGasChannels; ++i) {
    const double v = sig.mean_response[i] + sig.humidity_coeff[i] * (h - kReferenceHumidity) +
                     sig.temperature_coeff[i] * (t - kReferenceTemperature) +
                     overlap_factor * sig.noise_sigma[i] * rng.gaussian();
    ch[i] = std::max(0.0, v);
  }
  ch[static_cast<std::size_t>(Channel::Humidity)] = h;
  ch[static_cast<std::size_t>(Channel::Temperature)] = t;
  return SensorFrame(ch);
}

Dataset generate_dataset(const SimConfig& config) {
  config.validate();
  Dataset ds;
  ds.provenance = "simulator seed=" + std::to_string(config.seed) +
                  " overlap=" + format_real(config.overlap_factor) +
                  " per_class=" + std::to_string(config.samples_per_class);
  ds.samples.reserve(config.samples_per_class * kClasses);
  SimRng rng(config.seed);
  for (const auto& sig : config.signatures)
    for (std::size_t n = 0; n < config.samples_per_class; ++n)
      ds.samples.push_back({generate_sample(sig, config.env, config.overlap_factor, rng), sig.chemical});
  return ds;
}

double measure_cluster_overlap(const Dataset& dataset) {
  if (dataset.empty()) return 0.0;
  std::array<ChannelArray, kClasses> centroid{};
  std::array<std::size_t, kClasses> count{};
  for (const auto& s : dataset.samples) {
    auto c = index_of(s.label);
    ++count[c];
    for (std::size_t i = 0; i < kChannels; ++i) centroid[c][i] += s.frame[i];
  }
  for (std::size_t c = 0; c < kClasses; ++c)
    if (count[c])
      for (auto& v : centroid[c]) v /= static_cast<double>(count[c]);

  auto dist2 = [](const ChannelArray& a, const ChannelArray& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < kChannels; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
  };
  std::size_t overlapping = 0;
  for (const auto& s : dataset.samples) {
    const auto own = index_of(s.label);
    const double own_d = dist2(s.frame.channels(), centroid[own]);
    double foreign = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kClasses; ++c)
      if (c != own && count[c]) foreign = std::min(foreign, dist2(s.frame.channels(), centroid[c]));
    if (foreign < own_d) ++overlapping;
  }
  return static_cast<double>(overlapping) / static_cast<double>(dataset.size());
}

namespace {

double real_value(const KeyValueFile& kv, const std::string& key) {
  const auto& text = kv.require(key);
  auto v = parse_real(text);
  if (!v || !std::isfinite(*v))
    throw KeyValueError(key, "key '" + key + "': expected a real number, got '" + text + "'");
  return *v;
}

std::uint64_t unsigned_value(const KeyValueFile& kv, const std::string& key) {
  const auto& text = kv.require(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw KeyValueError(key, "key '" + key + "': expected an unsigned integer, got '" + text + "'");
  return v;
}

GasArray gas_values(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  GasArray out{};
  std::string tok;
  std::size_t n = 0;
  while (is >> tok) {
    auto v = parse_real(tok);
    if (!v || !std::isfinite(*v) || n >= kGasChannels)
      throw KeyValueError(key, "key '" + key + "': expected five reals");
    out[n++] = *v;
  }
  if (n != kGasChannels) throw KeyValueError(key, "key '" + key + "': expected five reals");
  return out;
}

constexpr std::array<std::string_view, 7> kRequiredKeys = {
    "seed", "samples_per_class", "overlap_factor", "humidity_mean",
    "humidity_sigma", "temperature_mean", "temperature_sigma"};

constexpr std::array<std::string_view, 4> kSignatureFields = {
    "mean_response", "noise_sigma", "humidity_coeff", "temperature_coeff"};

GasArray& signature_field(ChemicalSignature& sig, std::string_view field) {
  if (field == "mean_response") return sig.mean_response;
  if (field == "noise_sigma") return sig.noise_sigma;
  if (field == "humidity_coeff") return sig.humidity_coeff;
  return sig.temperature_coeff;
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  const auto kv = KeyValueFile::parse(text);
  for (const auto& e : kv.entries()) {
    bool known = std::find(kRequiredKeys.begin(), kRequiredKeys.end(), e.key) != kRequiredKeys.end();
    if (!known && e.key.starts_with("signature.")) {
      auto rest = std::string_view(e.key).substr(10);
      auto dot = rest.find('.');
      known = dot != std::string_view::npos && parse_label(rest.substr(0, dot)) &&
              std::find(kSignatureFields.begin(), kSignatureFields.end(), rest.substr(dot + 1)) !=
                  kSignatureFields.end();
    }
    if (!known)
      throw KeyValueError(e.key, "line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
  }

  SimConfig cfg = default_sim_config();
  cfg.seed = unsigned_value(kv, "seed");
  cfg.samples_per_class = unsigned_value(kv, "samples_per_class");
  cfg.overlap_factor = real_value(kv, "overlap_factor");
  cfg.env.humidity_mean = real_value(kv, "humidity_mean");
  cfg.env.humidity_sigma = real_value(kv, "humidity_sigma");
  cfg.env.temperature_mean = real_value(kv, "temperature_mean");
  cfg.env.temperature_sigma = real_value(kv, "temperature_sigma");
  for (auto& sig : cfg.signatures) {
    for (auto field : kSignatureFields) {
      const std::string key = "signature." + std::string(label_name(sig.chemical)) + "." + std::string(field);
      if (auto* e = kv.find(key)) signature_field(sig, field) = gas_values(key, e->value);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw KeyValueError({}, std::string("invalid simulator config: ") + e.what());
  }
  return cfg;
}

std::string format_sim_config(const SimConfig& cfg) {
  std::ostringstream os;
  os << "seed = " << cfg.seed << '\n';
  os << "samples_per_class = " << cfg.samples_per_class << '\n';
  os << "overlap_factor = " << format_real(cfg.overlap_factor) << '\n';
  os << "humidity_mean = " << format_real(cfg.env.humidity_mean) << '\n';
  os << "humidity_sigma = " << format_real(cfg.env.humidity_sigma) << '\n';
  os << "temperature_mean = " << format_real(cfg.env.temperature_mean) << '\n';
  os << "temperature_sigma = " << format_real(cfg.env.temperature_sigma) << '\n';
  for (auto sig : cfg.signatures) {
    for (auto field : kSignatureFields) {
      os << "signature." << label_name(sig.chemical) << '.' << field << " =";
      for (double v : signature_field(sig, field)) os << ' ' << format_real(v);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace enose
