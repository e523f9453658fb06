#include "enose/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "enose/kernels.hpp"

namespace enose {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < kClasses; ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kClasses; ++i)
    for (std::size_t j = 0; j < kClasses; ++j) counts[i][j] += other.counts[i][j];
  return *this;
}

void validate_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("threshold must lie strictly between 0 and 1");
}

namespace {

struct Tally {
  ConfusionMatrix confusion;
  std::array<std::uint64_t, kClasses> fp{};
  std::array<std::uint64_t, kClasses> negatives{};

  void add(const ClassVector& out, ChemicalClass label, double threshold) {
    confusion.add(label, decode_argmax(out).label);
    const auto target = index_of(label);
    for (std::size_t k = 0; k < kClasses; ++k) {
      if (k == target) continue;
      ++negatives[k];
      if (out[k] > threshold) ++fp[k];
    }
  }

  void merge(const Tally& o) {
    confusion += o.confusion;
    for (std::size_t k = 0; k < kClasses; ++k) {
      fp[k] += o.fp[k];
      negatives[k] += o.negatives[k];
    }
  }
};

EvalReport finish(const Tally& t, std::size_t samples, double threshold) {
  EvalReport r;
  r.confusion = t.confusion;
  r.samples = samples;
  r.threshold = threshold;
  r.fp_per_class = t.fp;
  for (std::size_t k = 0; k < kClasses; ++k) {
    r.fp_activations += t.fp[k];
    r.fp_rate_per_class[k] =
        t.negatives[k] ? static_cast<double>(t.fp[k]) / static_cast<double>(t.negatives[k]) : 0.0;
  }
  if (samples) {
    r.accuracy = static_cast<double>(t.confusion.trace()) / static_cast<double>(t.confusion.total());
    r.fp_rate = static_cast<double>(r.fp_activations) / static_cast<double>(samples * (kClasses - 1));
  }
  return r;
}

void check_tally_args(std::span<const ClassVector> outputs, std::span<const ChemicalClass> labels,
                      double threshold) {
  validate_threshold(threshold);
  if (outputs.size() != labels.size()) throw std::invalid_argument("outputs/labels size mismatch");
}

}  // namespace

EvalReport tally_serial(std::span<const ClassVector> outputs, std::span<const ChemicalClass> labels,
                        double threshold) {
  check_tally_args(outputs, labels, threshold);
  Tally t;
  for (std::size_t n = 0; n < outputs.size(); ++n) t.add(outputs[n], labels[n], threshold);
  return finish(t, outputs.size(), threshold);
}

EvalReport tally(std::span<const ClassVector> outputs, std::span<const ChemicalClass> labels,
                 double threshold) {
  check_tally_args(outputs, labels, threshold);
  Tally total;
  const auto count = static_cast<std::ptrdiff_t>(outputs.size());
#pragma omp parallel
  {
    Tally local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t n = 0; n < count; ++n)
      local.add(outputs[static_cast<std::size_t>(n)], labels[static_cast<std::size_t>(n)], threshold);
#pragma omp critical(enose_tally_merge)
    total.merge(local);
  }
  return finish(total, outputs.size(), threshold);
}

EvalReport evaluate(const Network& network, const Scaler& scaler, const Dataset& dataset,
                    double threshold) {
  validate_threshold(threshold);
  if (dataset.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  const auto inputs = scale_batch(scaler, dataset);
  const auto outputs = forward_batch(network, inputs);
  std::vector<ChemicalClass> labels;
  labels.reserve(dataset.size());
  for (const auto& s : dataset.samples) labels.push_back(s.label);
  return tally(outputs, labels, threshold);
}

OpCount inference_op_count(std::size_t hidden) {
  return {kInputs * hidden + kOutputs * hidden, hidden + kOutputs};
}

Split stratified_split(const Dataset& dataset, std::uint64_t seed, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0,1)");
  std::array<std::vector<std::size_t>, kClasses> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    by_class[index_of(dataset.samples[i].label)].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }

  Split split;
  split.train.provenance = dataset.provenance + " [train split]";
  split.test.provenance = dataset.provenance + " [test split]";
  for (auto i : train_idx) split.train.samples.push_back(dataset.samples[i]);
  for (auto i : test_idx) split.test.samples.push_back(dataset.samples[i]);
  split.test_indices = test_idx;

  // FNV-1a over the held-out indices.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto i : test_idx) {
    auto v = static_cast<std::uint64_t>(i);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  split.fingerprint = h;
  return split;
}

ComparisonReport compare_architectures(const Dataset& dataset, const TrainConfig& train_config,
                                       std::span<const std::size_t> hidden_sizes, double threshold) {
  validate_threshold(threshold);
  if (hidden_sizes.size() < 2) throw std::invalid_argument("comparison needs at least two hidden sizes");
  if (dataset.empty()) throw std::invalid_argument("cannot compare on an empty dataset");
  const auto split = stratified_split(dataset, train_config.seed);
  if (split.train.empty() || split.test.empty())
    throw std::invalid_argument("dataset too small for a 70/30 split");
  const auto scaler = fit_scaler(split.train);

  ComparisonReport report;
  report.train_size = split.train.size();
  report.test_size = split.test.size();
  report.seed = train_config.seed;
  report.threshold = threshold;
  for (auto z : hidden_sizes) {
    NetworkConfig cfg;
    cfg.hidden = z;
    const auto start = std::chrono::steady_clock::now();
    auto trained = train(init_weights(cfg, train_config), split.train, scaler, train_config);
    const auto stop = std::chrono::steady_clock::now();
    ArchitectureResult r;
    r.hidden = z;
    r.final_mse = trained.report.final_mse();
    r.train_seconds = std::chrono::duration<double>(stop - start).count();
    r.eval = evaluate(trained.network, scaler, split.test, threshold);
    r.ops = inference_op_count(z);
    r.split_fingerprint = split.fingerprint;
    report.architectures.push_back(std::move(r));
  }
  return report;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.insert(0, width - out.size(), ' ');
  return out;
}

}  // namespace

std::string format_eval_text(const EvalReport& r) {
  std::ostringstream os;
  os << "samples        " << r.samples << '\n';
  os << "accuracy       " << fixed(r.accuracy, 4) << '\n';
  os << "threshold      " << fixed(r.threshold, 3) << '\n';
  os << "fp activations " << r.fp_activations << " of " << r.samples * (kClasses - 1) << '\n';
  os << "fp rate        " << fixed(r.fp_rate, 4) << '\n';
  os << "\nconfusion (rows = true, cols = predicted)\n";
  os << pad("", 18);
  for (auto c : kAllClasses) os << pad(label_name(c).substr(0, 8), 9);
  os << pad("fp rate", 9) << '\n';
  for (std::size_t i = 0; i < kClasses; ++i) {
    os << pad(label_name(kAllClasses[i]), 18);
    for (std::size_t j = 0; j < kClasses; ++j) os << pad(std::to_string(r.confusion.counts[i][j]), 9);
    os << pad(fixed(r.fp_rate_per_class[i], 4), 9) << '\n';
  }
  return os.str();
}

std::string format_eval_kv(const EvalReport& r, const std::string& prefix) {
  std::ostringstream os;
  os << prefix << "samples = " << r.samples << '\n';
  os << prefix << "accuracy = " << format_real(r.accuracy) << '\n';
  os << prefix << "threshold = " << format_real(r.threshold) << '\n';
  os << prefix << "fp_activations = " << r.fp_activations << '\n';
  os << prefix << "fp_rate = " << format_real(r.fp_rate) << '\n';
  os << prefix << "fp_rate_per_class =";
  for (double v : r.fp_rate_per_class) os << ' ' << format_real(v);
  os << '\n';
  os << prefix << "confusion = [\n";
  for (const auto& row : r.confusion.counts) {
    for (std::size_t j = 0; j < kClasses; ++j) os << (j ? " " : "") << row[j];
    os << '\n';
  }
  os << "]\n";
  return os.str();
}

std::string format_comparison_text(const ComparisonReport& c, bool include_timing) {
  std::ostringstream os;
  os << "split          stratified 70/30, seed " << c.seed << ", train " << c.train_size << ", test "
     << c.test_size << '\n';
  if (!c.architectures.empty())
    os << "split hash     " << hex64(c.architectures.front().split_fingerprint) << '\n';
  os << "threshold      " << fixed(c.threshold, 3) << "\n\n";
  os << pad("arch", 10) << pad("accuracy", 10) << pad("fp acts", 9) << pad("fp rate", 9)
     << pad("final mse", 12) << pad("mul-add", 9) << pad("bias", 6) << pad("ops", 6);
  if (include_timing) os << pad("train s", 10);
  os << '\n';
  for (const auto& a : c.architectures) {
    os << pad("7-" + std::to_string(a.hidden) + "-5", 10) << pad(fixed(a.eval.accuracy, 4), 10)
       << pad(std::to_string(a.eval.fp_activations), 9) << pad(fixed(a.eval.fp_rate, 4), 9)
       << pad(fixed(a.final_mse, 6), 12) << pad(std::to_string(a.ops.multiply_adds), 9)
       << pad(std::to_string(a.ops.bias_adds), 6) << pad(std::to_string(a.ops.total()), 6);
    if (include_timing) os << pad(fixed(a.train_seconds, 3), 10);
    os << '\n';
  }
  return os.str();
}

std::string format_comparison_kv(const ComparisonReport& c, bool include_timing) {
  std::ostringstream os;
  os << "seed = " << c.seed << '\n';
  os << "train_size = " << c.train_size << '\n';
  os << "test_size = " << c.test_size << '\n';
  os << "threshold = " << format_real(c.threshold) << '\n';
  os << "architectures =";
  for (const auto& a : c.architectures) os << ' ' << a.hidden;
  os << '\n';
  for (const auto& a : c.architectures) {
    const std::string p = "z" + std::to_string(a.hidden) + ".";
    os << p << "split_fingerprint = " << hex64(a.split_fingerprint) << '\n';
    os << p << "multiply_adds = " << a.ops.multiply_adds << '\n';
    os << p << "bias_adds = " << a.ops.bias_adds << '\n';
    os << p << "final_mse = " << format_real(a.final_mse) << '\n';
    if (include_timing) os << p << "train_seconds = " << format_real(a.train_seconds) << '\n';
    os << format_eval_kv(a.eval, p);
  }
  return os.str();
}

}  // namespace enose
