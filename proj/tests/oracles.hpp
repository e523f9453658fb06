#pragma once

// Test-only reference implementations. None of these call into the code
// path they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "enose/core.hpp"
#include "enose/nn.hpp"

namespace enose::oracle {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::pair<ChannelArray, ChannelArray> min_max_scan(const Dataset& ds) {
  ChannelArray lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < kChannels; ++i)
    for (const auto& s : ds.samples) {
      if (s.frame[i] < lo[i]) lo[i] = s.frame[i];
      if (s.frame[i] > hi[i]) hi[i] = s.frame[i];
    }
  return {lo, hi};
}

/// Per-sample squared error sum_k (o_k - t_k)^2 / 2, written out longhand.
inline double half_squared_error(const Network& net, const ChannelArray& x, const ClassVector& t) {
  const auto z = net.hidden_size();
  std::vector<double> h(z);
  for (std::size_t j = 0; j < z; ++j) {
    double a = net.b1()[j];
    for (std::size_t i = 0; i < kInputs; ++i) a += net.w1()(j, i) * x[i];
    h[j] = sigmoid(a);
  }
  double e = 0.0;
  for (std::size_t k = 0; k < kOutputs; ++k) {
    double a = net.b2()[k];
    for (std::size_t j = 0; j < z; ++j) a += net.w2()(k, j) * h[j];
    const double d = sigmoid(a) - t[k];
    e += 0.5 * d * d;
  }
  return e;
}

/// Central finite differences of half_squared_error for every parameter, in
/// the order W1 (row-major), b1, W2 (row-major), b2.
inline std::vector<double> finite_difference_gradient(Network net, const ChannelArray& x,
                                                      const ClassVector& t, double h = 1e-5) {
  std::vector<double> out;
  auto probe = [&](double& w) {
    const double saved = w;
    w = saved + h;
    const double up = half_squared_error(net, x, t);
    w = saved - h;
    const double down = half_squared_error(net, x, t);
    w = saved;
    out.push_back((up - down) / (2.0 * h));
  };
  for (auto& w : net.w1().data()) probe(w);
  for (auto& w : net.b1()) probe(w);
  for (auto& w : net.w2().data()) probe(w);
  for (auto& w : net.b2()) probe(w);
  return out;
}

inline std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  out.insert(out.end(), g.w1.data().begin(), g.w1.data().end());
  out.insert(out.end(), g.b1.begin(), g.b1.end());
  out.insert(out.end(), g.w2.data().begin(), g.w2.data().end());
  out.insert(out.end(), g.b2.begin(), g.b2.end());
  return out;
}

/// |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Plain gradient descent on a 7-Z-5 sigmoid net: w <- w - lr * dE/dw.
/// Separate forward and backward loops, no momentum state.
class VanillaGd {
 public:
  VanillaGd(std::size_t z, std::vector<double> w1, std::vector<double> b1, std::vector<double> w2,
            std::vector<double> b2)
      : z_(z), w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {}

  static VanillaGd from(const Network& n) {
    auto v = [](auto span) { return std::vector<double>(span.begin(), span.end()); };
    return VanillaGd(n.hidden_size(), v(n.w1().data()), n.b1(), v(n.w2().data()), n.b2());
  }

  void step(const ChannelArray& x, const ClassVector& t, double lr) {
    std::vector<double> h(z_), dh(z_);
    std::array<double, kOutputs> o{}, dout{};
    for (std::size_t j = 0; j < z_; ++j) {
      double a = b1_[j];
      for (std::size_t i = 0; i < kInputs; ++i) a += w1_[j * kInputs + i] * x[i];
      h[j] = sigmoid(a);
    }
    for (std::size_t k = 0; k < kOutputs; ++k) {
      double a = b2_[k];
      for (std::size_t j = 0; j < z_; ++j) a += w2_[k * z_ + j] * h[j];
      o[k] = sigmoid(a);
      dout[k] = (o[k] - t[k]) * o[k] * (1.0 - o[k]);
    }
    for (std::size_t j = 0; j < z_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < kOutputs; ++k) s += w2_[k * z_ + j] * dout[k];
      dh[j] = s * h[j] * (1.0 - h[j]);
    }
    for (std::size_t k = 0; k < kOutputs; ++k) {
      for (std::size_t j = 0; j < z_; ++j) w2_[k * z_ + j] -= lr * (dout[k] * h[j]);
      b2_[k] -= lr * dout[k];
    }
    for (std::size_t j = 0; j < z_; ++j) {
      for (std::size_t i = 0; i < kInputs; ++i) w1_[j * kInputs + i] -= lr * (dh[j] * x[i]);
      b1_[j] -= lr * dh[j];
    }
  }

  /// Largest absolute difference against a network's parameters, and whether
  /// every parameter is bit-identical.
  std::pair<double, bool> compare(const Network& n) const {
    double worst = 0.0;
    bool exact = true;
    auto cmp = [&](const std::vector<double>& mine, auto theirs) {
      for (std::size_t i = 0; i < mine.size(); ++i) {
        worst = std::max(worst, std::abs(mine[i] - theirs[i]));
        exact = exact && mine[i] == theirs[i];
      }
    };
    cmp(w1_, n.w1().data());
    cmp(b1_, std::span<const double>(n.b1()));
    cmp(w2_, n.w2().data());
    cmp(b2_, std::span<const double>(n.b2()));
    return {worst, exact};
  }

 private:
  std::size_t z_;
  std::vector<double> w1_, b1_, w2_, b2_;
};

/// Single-layer sigmoid network (no hidden layer) trained with online
/// backpropagation + momentum on one-hot MSE targets. Baseline only.
class Perceptron {
 public:
  Perceptron(std::uint64_t seed, double half_range = 0.5) : rng_(seed) {
    std::uniform_real_distribution<double> u(-half_range, half_range);
    for (auto& row : w_)
      for (auto& v : row) v = u(rng_);
  }

  void train(const std::vector<ChannelArray>& xs, const std::vector<ChemicalClass>& ys, double lr,
             double momentum, std::size_t epochs) {
    std::array<std::array<double, kInputs + 1>, kOutputs> vel{};
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t e = 0; e < epochs; ++e) {
      std::shuffle(order.begin(), order.end(), rng_);
      for (auto n : order) {
        const auto& x = xs[n];
        for (std::size_t k = 0; k < kOutputs; ++k) {
          const double y = sigmoid(activation(k, x));
          const double t = index_of(ys[n]) == k ? 1.0 : 0.0;
          const double d = (y - t) * y * (1.0 - y);
          for (std::size_t i = 0; i <= kInputs; ++i) {
            const double g = d * (i < kInputs ? x[i] : 1.0);
            vel[k][i] = -lr * g + momentum * vel[k][i];
            w_[k][i] += vel[k][i];
          }
        }
      }
    }
  }

  ChemicalClass predict(const ChannelArray& x) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kOutputs; ++k)
      if (activation(k, x) > activation(best, x)) best = k;
    return class_from_index(best);
  }

 private:
  double activation(std::size_t k, const ChannelArray& x) const {
    double a = w_[k][kInputs];
    for (std::size_t i = 0; i < kInputs; ++i) a += w_[k][i] * x[i];
    return a;
  }

  std::mt19937_64 rng_;
  std::array<std::array<double, kInputs + 1>, kOutputs> w_{};
};

/// Fraction of `test` whose nearest `train` sample (Euclidean, raw channels)
/// carries the same label.
inline double one_nn_accuracy(const Dataset& train, const Dataset& test) {
  std::size_t ok = 0;
  for (const auto& q : test.samples) {
    double best = std::numeric_limits<double>::infinity();
    ChemicalClass label = ChemicalClass::None;
    for (const auto& r : train.samples) {
      double d = 0.0;
      for (std::size_t i = 0; i < kChannels; ++i) d += (q.frame[i] - r.frame[i]) * (q.frame[i] - r.frame[i]);
      if (d < best) {
        best = d;
        label = r.label;
      }
    }
    ok += label == q.label;
  }
  return static_cast<double>(ok) / static_cast<double>(test.size());
}

/// XOR of the bytes strictly between '$' and '*'.
inline unsigned xor_between_markers(const std::string& line) {
  unsigned c = 0;
  const auto start = line.find('$');
  const auto stop = line.find('*');
  for (auto i = start + 1; i < stop; ++i) c ^= static_cast<unsigned char>(line[i]);
  return c;
}

}  // namespace enose::oracle
