// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "enose/acquisition.hpp"
#include "enose/eval.hpp"
#include "enose/kernels.hpp"
#include "enose/nn.hpp"
#include "enose/simulator.hpp"
#include "oracles.hpp"

using namespace enose;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChannelArray random_unit_input(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ChannelArray x;
  for (auto& v : x) v = u(rng);
  return x;
}

Dataset simulated(double overlap, std::size_t per_class, std::uint64_t seed) {
  auto cfg = default_sim_config();
  cfg.overlap_factor = overlap;
  cfg.samples_per_class = per_class;
  cfg.seed = seed;
  return generate_dataset(cfg);
}

/// 7-3-5 trained with the default settings on the 70% part of the split.
struct Trained {
  Split split;
  Scaler scaler;
  Network network;
};

Trained train_on_split(const Dataset& ds, std::size_t hidden, const TrainConfig& tc) {
  Trained t{stratified_split(ds, tc.seed), {}, Network(NetworkConfig{})};
  t.scaler = fit_scaler(t.split.train);
  NetworkConfig nc;
  nc.hidden = hidden;
  t.network = train(init_weights(nc, tc), t.split.train, t.scaler, tc).network;
  return t;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t components = 0, nets = 0;
  for (std::size_t z : {3u, 10u}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      NetworkConfig nc;
      nc.hidden = z;
      TrainConfig tc;
      tc.seed = 1000 + seed * 17 + z;
      tc.init_half_range = 1.0;
      auto net = init_weights(nc, tc);
      auto x = random_unit_input(rng);
      auto t = encode_one_hot(class_from_index(rng() % kClasses));
      auto analytic = oracle::flatten(gradient(net, x, t));
      auto numeric = oracle::finite_difference_gradient(net, x, t, 1e-5);
      for (std::size_t i = 0; i < analytic.size(); ++i)
        worst = std::max(worst, oracle::relative_error(analytic[i], numeric[i]));
      components += analytic.size();
      ++nets;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 10.0,
          fmt("%zu networks, %zu components, max rel err %.2e (<= 1e-4), %.2fs (< 10s)", nets, components,
              worst, secs)};
}

Outcome headline() {
  const auto t0 = std::chrono::steady_clock::now();
  auto ds = simulated(0.5, 40, 7);
  TrainConfig tc;  // 0.01, 0.9, 1000 epochs, seed 7
  auto t = train_on_split(ds, 3, tc);
  auto report = evaluate(t.network, t.scaler, t.split.test);
  const double secs = seconds_since(t0);
  return {report.accuracy >= 0.99 && secs < 60.0,
          fmt("7-3-5 held-out accuracy %.4f on %zu samples (>= 0.99), %.2fs (< 60s)", report.accuracy,
              report.samples, secs)};
}

Outcome architecture_comparison() {
  auto ds = simulated(1.0, 40, 7);
  const std::vector<std::size_t> sizes{3, 10};
  auto a = compare_architectures(ds, TrainConfig{}, sizes);
  auto b = compare_architectures(ds, TrainConfig{}, sizes);
  const bool deterministic = format_comparison_kv(a, false) == format_comparison_kv(b, false);
  bool ok = a.architectures.size() == 2;
  if (ok) {
    const auto& z3 = a.architectures[0];
    const auto& z10 = a.architectures[1];
    ok = z3.hidden == 3 && z10.hidden == 10 && z3.split_fingerprint == z10.split_fingerprint &&
         z3.ops.multiply_adds == 7 * 3 + 5 * 3 && z10.ops.multiply_adds == 7 * 10 + 5 * 10 &&
         z3.ops.total() < z10.ops.total() && z3.eval.samples == a.test_size && z10.eval.samples == a.test_size;
  }

  // Same protocol through the command line, run twice.
  testing::Workspace ws;
  bool cli = ws.enose("simulate --seed 7 --out d.csv").status == 0 &&
             ws.enose("compare --data d.csv --hidden 3 --hidden 10 --out a.kv").status == 0 &&
             ws.enose("compare --data d.csv --hidden 3 --hidden 10 --out b.kv").status == 0;
  const auto kv = ws.read("a.kv");
  cli = cli && kv == ws.read("b.kv") && kv.find("z3.fp_rate = ") != std::string::npos &&
        kv.find("z10.fp_rate = ") != std::string::npos && kv.find("z3.multiply_adds = 36") != std::string::npos &&
        kv.find("z10.multiply_adds = 120") != std::string::npos;

  std::string detail = "ops ";
  if (a.architectures.size() == 2)
    detail += fmt("%zu+%zu=%zu < %zu+%zu=%zu, fp rate %.4f / %.4f, split %s", a.architectures[0].ops.multiply_adds,
                  a.architectures[0].ops.bias_adds, a.architectures[0].ops.total(),
                  a.architectures[1].ops.multiply_adds, a.architectures[1].ops.bias_adds,
                  a.architectures[1].ops.total(), a.architectures[0].eval.fp_rate, a.architectures[1].eval.fp_rate,
                  hex64(a.architectures[0].split_fingerprint).c_str());
  detail += deterministic ? ", library rerun identical" : ", library rerun DIFFERS";
  detail += cli ? ", cli rerun identical" : ", cli check FAILED";
  return {ok && deterministic && cli, detail};
}

Outcome table_fidelity() {
  const TableSpec spec;
  auto table = build_sigmoid_table(spec.lower, spec.upper, spec.entries);
  const std::size_t probes = (spec.entries - 1) * 10 + 1;
  double pointwise = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const double x = spec.lower + (spec.upper - spec.lower) * static_cast<double>(i) / static_cast<double>(probes - 1);
    pointwise = std::max(pointwise, std::abs(table.lookup(x) - oracle::sigmoid(x)));
  }

  auto trained = train_on_split(simulated(0.5, 40, 7), 3, TrainConfig{});
  const auto& exact = trained.network;
  const auto tabled = exact.with_activation(ActivationMode::Table);
  std::mt19937_64 rng(4);
  std::vector<ChannelArray> inputs(1000);
  for (auto& x : inputs) x = random_unit_input(rng);
  auto oe = forward_batch(exact, inputs);
  auto ot = forward_batch(tabled, inputs);
  double divergence = 0.0;
  std::size_t agree = 0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    for (std::size_t k = 0; k < kOutputs; ++k) divergence = std::max(divergence, std::abs(oe[n][k] - ot[n][k]));
    agree += decode_argmax(oe[n]).label == decode_argmax(ot[n]).label;
  }
  const double agreement = static_cast<double>(agree) / static_cast<double>(inputs.size());
  return {pointwise <= 1e-3 && divergence <= 5e-3 && agreement >= 0.999,
          fmt("pointwise %.2e over %zu probes (<= 1e-3), output divergence %.2e (<= 5e-3), agreement %.4f (>= 0.999)",
              pointwise, probes, divergence, agreement)};
}

Outcome momentum_degeneracy() {
  NetworkConfig nc;
  TrainConfig tc;
  tc.seed = 99;
  auto net = init_weights(nc, tc);
  auto reference = oracle::VanillaGd::from(net);
  MomentumTrainer trainer(net, 0.05, 0.0);
  std::mt19937_64 rng(17);
  std::vector<std::pair<ChannelArray, ClassVector>> toy;
  for (std::size_t i = 0; i < 10; ++i) toy.emplace_back(random_unit_input(rng), encode_one_hot(class_from_index(i % 5)));
  for (std::size_t step = 0; step < 100; ++step) {
    const auto& [x, t] = toy[step % toy.size()];
    trainer.step(x, t);
    reference.step(x, t, 0.05);
  }
  auto [worst, exact] = reference.compare(trainer.network());
  return {exact || worst <= 1e-12,
          fmt("100 steps, %s, max abs diff %.2e", exact ? "bit-identical" : "not bit-identical", worst)};
}

Outcome wire_protocol() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> gas(0.0, 1023.0), hum(0.0, 100.0), temp(-40.0, 85.0);
  std::uniform_int_distribution<std::uint32_t> seqs;
  auto random_frame = [&] {
    ChannelArray a;
    for (std::size_t i = 0; i < kGasChannels; ++i) a[i] = gas(rng);
    a[5] = hum(rng);
    a[6] = temp(rng);
    return a;
  };

  std::size_t round_trip_ok = 0;
  const std::size_t round_trips = 100000;
  for (std::size_t n = 0; n < round_trips; ++n) {
    const auto a = random_frame();
    const auto s = seqs(rng);
    const auto line = serialize_frame(s, a);
    auto parsed = try_parse_frame(line);
    bool ok = std::holds_alternative<WireFrame>(parsed);
    if (ok) {
      const auto& f = std::get<WireFrame>(parsed);
      ok = f.seq == s && serialize_frame(f.seq, f.frame) == line;
      for (std::size_t i = 0; i < kChannels; ++i) ok = ok && std::abs(f.frame[i] - a[i]) <= 0.0005 + 1e-9;
    }
    round_trip_ok += ok;
  }

  std::size_t rejected = 0;
  const std::size_t fuzz = 10000;
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t n = 0; n < fuzz; ++n) {
    auto line = serialize_frame(seqs(rng), random_frame());
    const auto star = line.find('*');
    std::uniform_int_distribution<std::size_t> pos(1, star - 1);
    const auto p = pos(rng);
    char c;
    do c = static_cast<char>(byte(rng));
    while (c == line[p]);
    line[p] = c;
    rejected += std::holds_alternative<WireError>(try_parse_frame(line));
  }

  std::string stream;
  std::uint32_t seq = 0;
  for (std::size_t n = 0; n < 1000; ++n) {
    if (n % 97 == 13) stream += "noise\x01\xfe";
    if (n % 151 == 7) ++seq;
    stream += serialize_frame(seq++, random_frame());
  }
  StreamReader whole;
  auto expected = whole.feed(stream);
  whole.finish(expected);
  std::size_t invariant = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> len(1, trial % 2 ? 8 : 400);
    StreamReader r;
    std::vector<StreamEvent> got;
    for (std::size_t at = 0; at < stream.size();) {
      const auto n = std::min(len(rng), stream.size() - at);
      r.feed(std::string_view(stream).substr(at, n), got);
      at += n;
    }
    r.finish(got);
    invariant += got == expected;
  }
  return {round_trip_ok == round_trips && rejected == fuzz && invariant == 100,
          fmt("round trips %zu/%zu, mutations rejected %zu/%zu, re-chunkings invariant %zu/100 (%zu events)",
              round_trip_ok, round_trips, rejected, fuzz, invariant, expected.size())};
}

Outcome determinism() {
  const char* steps[] = {
      "simulate --seed 7 --overlap 0.5 --out d.csv",
      "simulate --seed 7 --overlap 0.5 --wire --out d.wire",
      "train --data d.csv --hidden 3 --out m3.model",
      "train --data d.csv --hidden 10 --activation table --out m10.model",
      "evaluate --model m3.model --data d.csv --out e3.kv",
      "evaluate --model m10.model --data d.csv --out e10.kv",
  };
  testing::Workspace a, b;
  for (const auto* cmd : steps)
    if (a.enose(cmd).status != 0 || b.enose(cmd).status != 0) return {false, fmt("command failed: %s", cmd)};
  std::size_t files = 0, identical = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.dir())) {
    const auto name = entry.path().filename().string();
    if (name.starts_with(".")) continue;
    ++files;
    identical += a.read(name) == b.read(name) && !a.read(name).empty();
  }
  return {files == 12 && identical == files, fmt("%zu/%zu artifacts byte-identical across two runs", identical, files)};
}

Outcome nonlinearity() {
  auto ds = simulated(1.0, 100, 7);
  TrainConfig tc;
  auto mlp = train_on_split(ds, 3, tc);
  const double mlp_acc = evaluate(mlp.network, mlp.scaler, mlp.split.test).accuracy;

  std::vector<ChannelArray> xs;
  std::vector<ChemicalClass> ys;
  for (const auto& s : mlp.split.train.samples) {
    xs.push_back(apply_scaler(mlp.scaler, s.frame));
    ys.push_back(s.label);
  }
  oracle::Perceptron perceptron(tc.seed);
  perceptron.train(xs, ys, tc.learning_rate, tc.momentum, tc.epochs);
  std::size_t ok = 0;
  for (const auto& s : mlp.split.test.samples) ok += perceptron.predict(apply_scaler(mlp.scaler, s.frame)) == s.label;
  const double lin_acc = static_cast<double>(ok) / static_cast<double>(mlp.split.test.size());
  return {lin_acc < mlp_acc, fmt("perceptron %.4f < 7-3-5 MLP %.4f on %zu held-out samples", lin_acc, mlp_acc,
                                 mlp.split.test.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_check},
      {"headline reproduction", headline},
      {"architecture comparison", architecture_comparison},
      {"lookup-table fidelity", table_fidelity},
      {"momentum degeneracy", momentum_degeneracy},
      {"wire protocol", wire_protocol},
      {"pipeline determinism", determinism},
      {"nonlinearity premise", nonlinearity},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
