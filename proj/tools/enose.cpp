// enose: simulate, train, evaluate, compare and stream-classify.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "enose/acquisition.hpp"
#include "enose/eval.hpp"
#include "enose/keyvalue.hpp"
#include "enose/simulator.hpp"

namespace {

using namespace enose;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Records how an artifact was produced. The `args` line replays the run.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
      if (k == key) {
        v += ' ' + value;
        return;
      }
    entries_.emplace_back(key, value);
  }
  void arg(const std::string& flag, const std::string& value) {
    args_ += ' ' + flag + ' ' + quote(value);
    set(flag.substr(2), value);
  }
  void flag(const std::string& flag) {
    args_ += ' ' + flag;
    set(flag.substr(2), "true");
  }

  void write(const std::string& artifact) const {
    std::ostringstream os;
    os << "# enose run manifest\n";
    os << "tool = enose\n";
    os << "version = " << ENOSE_VERSION << '\n';
    os << "command = " << command_ << '\n';
    os << "args = " << command_ << args_ << '\n';
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
    write_file(artifact + ".manifest", os.str());
  }

 private:
  static std::string quote(const std::string& s) {
    if (!s.empty() && s.find_first_of(" \t'\"") == std::string::npos) return s;
    return "'" + s + "'";
  }

  std::string command_;
  std::string args_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string real(double v) { return format_real(v); }

void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) throw UsageError("--threshold must lie strictly between 0 and 1");
}

ActivationMode activation_or_throw(const std::string& name) {
  auto mode = parse_activation(name);
  if (!mode) throw UsageError("--activation must be 'exact' or 'table'");
  return *mode;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples_per_class;
  std::optional<double> overlap;
  bool wire = false;
};

int run_simulate(const SimulateOptions& o) {
  SimConfig cfg = o.config.empty() ? default_sim_config() : parse_sim_config(read_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples_per_class) cfg.samples_per_class = *o.samples_per_class;
  if (o.overlap) cfg.overlap_factor = *o.overlap;
  const auto ds = generate_dataset(cfg);
  write_file(o.out, o.wire ? serialize_stream(ds) : format_dataset(ds));

  Manifest m("simulate");
  if (!o.config.empty()) m.arg("--config", o.config);
  m.arg("--seed", std::to_string(cfg.seed));
  m.arg("--samples-per-class", std::to_string(cfg.samples_per_class));
  m.arg("--overlap", real(cfg.overlap_factor));
  if (o.wire) m.flag("--wire");
  m.arg("--out", o.out);
  m.set("rows", std::to_string(ds.size()));
  std::istringstream resolved(format_sim_config(cfg));
  for (std::string line; std::getline(resolved, line);) {
    auto eq = line.find(" = ");
    m.set("config." + line.substr(0, eq), line.substr(eq + 3));
  }
  m.write(o.out);
  std::cerr << "wrote " << ds.size() << (o.wire ? " wire frames" : " samples") << " to " << o.out << '\n';
  return 0;
}

struct TrainOptions {
  std::string data;
  std::string out;
  std::size_t hidden = 3;
  TrainConfig train;
  std::string activation = "exact";
};

int run_train(const TrainOptions& o) {
  const auto mode = activation_or_throw(o.activation);
  if (o.hidden == 0) throw UsageError("--hidden must be >= 1");
  try {
    o.train.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto ds = load_dataset(o.data);
  if (ds.empty()) throw std::runtime_error("dataset " + o.data + " has no samples");
  const auto scaler = fit_scaler(ds);
  NetworkConfig cfg;
  cfg.hidden = o.hidden;
  auto result = train(init_weights(cfg, o.train), ds, scaler, o.train);
  save_model(result.network.with_activation(mode), scaler, o.out);

  Manifest m("train");
  m.arg("--data", o.data);
  m.arg("--hidden", std::to_string(o.hidden));
  m.arg("--lr", real(o.train.learning_rate));
  m.arg("--momentum", real(o.train.momentum));
  m.arg("--epochs", std::to_string(o.train.epochs));
  m.arg("--seed", std::to_string(o.train.seed));
  m.arg("--init-range", real(o.train.init_half_range));
  m.arg("--activation", o.activation);
  m.arg("--out", o.out);
  m.set("architecture", "7-" + std::to_string(o.hidden) + "-5");
  m.set("samples", std::to_string(ds.size()));
  m.set("final_mse", real(result.report.final_mse()));
  m.write(o.out);

  std::cout << "architecture   7-" << o.hidden << "-5 (" << activation_name(mode) << " inference)\n";
  std::cout << "samples        " << ds.size() << '\n';
  std::cout << "learning rate  " << real(o.train.learning_rate) << '\n';
  std::cout << "momentum       " << real(o.train.momentum) << '\n';
  std::cout << "epochs         " << result.report.epochs_run << '\n';
  std::cout << "seed           " << o.train.seed << '\n';
  std::cout << "final mse      " << real(result.report.final_mse()) << "\n\n";
  std::cout << "epoch mse\n";
  for (std::size_t e = 0; e < result.report.mse_history.size(); ++e)
    std::cout << e + 1 << ' ' << real(result.report.mse_history[e]) << '\n';
  return 0;
}

struct EvaluateOptions {
  std::string model;
  std::string data;
  std::string out;
  std::string activation;
  double threshold = kDefaultThreshold;
};

int run_evaluate(const EvaluateOptions& o) {
  check_threshold(o.threshold);
  auto model = load_model(o.model);
  if (!o.activation.empty())
    model.network = model.network.with_activation(activation_or_throw(o.activation));
  const auto ds = load_dataset(o.data);
  if (ds.empty()) throw std::runtime_error("dataset " + o.data + " has no samples");
  const auto report = evaluate(model.network, model.scaler, ds, o.threshold);
  std::cout << "model          " << o.model << " (7-" << model.network.hidden_size() << "-5, "
            << activation_name(model.network.activation()) << ")\n";
  std::cout << "dataset        " << o.data << "\n";
  std::cout << format_eval_text(report);
  if (!o.out.empty()) {
    write_file(o.out, format_eval_kv(report));
    Manifest m("evaluate");
    m.arg("--model", o.model);
    m.arg("--data", o.data);
    m.arg("--threshold", real(o.threshold));
    if (!o.activation.empty()) m.arg("--activation", o.activation);
    m.arg("--out", o.out);
    m.write(o.out);
  }
  return 0;
}

struct CompareOptions {
  std::string data;
  std::string out;
  std::vector<std::size_t> hidden{3, 10};
  TrainConfig train;
  double threshold = kDefaultThreshold;
};

int run_compare(const CompareOptions& o) {
  check_threshold(o.threshold);
  if (o.hidden.size() < 2) throw UsageError("compare needs at least two --hidden sizes");
  for (auto z : o.hidden)
    if (z == 0) throw UsageError("--hidden must be >= 1");
  try {
    o.train.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto ds = load_dataset(o.data);
  const auto report = compare_architectures(ds, o.train, o.hidden, o.threshold);
  std::cout << format_comparison_text(report);
  if (!o.out.empty()) {
    write_file(o.out, format_comparison_kv(report, false));
    Manifest m("compare");
    m.arg("--data", o.data);
    for (auto z : o.hidden) m.arg("--hidden", std::to_string(z));
    m.arg("--lr", real(o.train.learning_rate));
    m.arg("--momentum", real(o.train.momentum));
    m.arg("--epochs", std::to_string(o.train.epochs));
    m.arg("--seed", std::to_string(o.train.seed));
    m.arg("--init-range", real(o.train.init_half_range));
    m.arg("--threshold", real(o.threshold));
    m.arg("--out", o.out);
    m.write(o.out);
  }
  return 0;
}

struct StreamOptions {
  std::string model;
  std::string input = "-";
  std::string activation;
};

int run_stream(const StreamOptions& o) {
  auto model = load_model(o.model);
  if (!o.activation.empty())
    model.network = model.network.with_activation(activation_or_throw(o.activation));

  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file.open(o.input, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + o.input);
    in = &file;
  }

  std::vector<double> hidden(model.network.hidden_size());
  ClassVector out{};
  auto sink = [&](const StreamEvent& ev) {
    if (const auto* f = std::get_if<WireFrame>(&ev)) {
      const auto x = model.scaler.apply(f->frame);
      forward_into(model.network, x, hidden, out);
      const auto d = decode_argmax(out);
      char conf[32];
      std::snprintf(conf, sizeof conf, "%.4f", d.confidence);
      std::cout << "seq=" << f->seq << " class=" << label_name(d.label) << " confidence=" << conf << '\n';
    } else if (const auto* s = std::get_if<SkipNotice>(&ev)) {
      std::cerr << "skip: " << (s->reason ? wire_error_name(*s->reason) : "junk") << ": " << s->detail
                << '\n';
    } else if (const auto* g = std::get_if<GapNotice>(&ev)) {
      std::cerr << "gap: " << g->missing << " frame(s) missing between seq " << g->previous << " and "
                << g->received << '\n';
    }
  };
  const auto reader = read_stream(*in, sink);
  std::cout.flush();
  std::cerr << "stream: " << reader.frames() << " frames, " << reader.skipped() << " skipped, "
            << reader.gaps() << " gaps (" << reader.missing() << " missing)\n";
  return 0;
}

void add_train_flags(CLI::App* cmd, TrainConfig& t) {
  cmd->add_option("--lr", t.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--momentum", t.momentum, "Momentum coefficient")->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--seed", t.seed, "Seed for initialization, shuffling and splitting")->capture_default_str();
  cmd->add_option("--init-range", t.init_half_range, "Uniform init half range")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electronic-nose toolkit: simulate, train, evaluate, compare, stream"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ENOSE_VERSION);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  simulate->add_option("--config", sim.config, "Simulator key-value config file")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the config seed");
  simulate->add_option("--samples-per-class", sim.samples_per_class, "Override samples per class");
  simulate->add_option("--overlap", sim.overlap, "Override the overlap factor");
  simulate->add_flag("--wire", sim.wire, "Emit the wire-format stream instead of CSV");
  simulate->add_option("--out", sim.out, "Output path")->required();

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a 7-Z-5 network");
  train_cmd->add_option("--data", tr.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer size Z")->capture_default_str();
  add_train_flags(train_cmd, tr.train);
  train_cmd->add_option("--activation", tr.activation, "Inference activation stored in the model: exact|table")
      ->capture_default_str();
  train_cmd->add_option("--out", tr.out, "Model output path")->required();

  EvaluateOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on a dataset");
  eval_cmd->add_option("--model", ev.model, "Model file")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--threshold", ev.threshold, "False-positive threshold in (0,1)")->capture_default_str();
  eval_cmd->add_option("--activation", ev.activation, "Override the model activation: exact|table");
  eval_cmd->add_option("--out", ev.out, "Key-value report path");

  CompareOptions cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Compare hidden-layer sizes on one shared split");
  compare_cmd->add_option("--data", cmp.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--hidden", cmp.hidden, "Hidden sizes to compare (repeatable)")->capture_default_str();
  add_train_flags(compare_cmd, cmp.train);
  compare_cmd->add_option("--threshold", cmp.threshold, "False-positive threshold in (0,1)")->capture_default_str();
  compare_cmd->add_option("--out", cmp.out, "Key-value report path");

  StreamOptions st;
  auto* stream_cmd = app.add_subcommand("stream", "Classify wire frames from a file or stdin");
  stream_cmd->add_option("--model", st.model, "Model file")->required();
  stream_cmd->add_option("input", st.input, "Wire stream file, '-' for stdin")->capture_default_str();
  stream_cmd->add_option("--activation", st.activation, "Override the model activation: exact|table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*train_cmd) return run_train(tr);
    if (*eval_cmd) return run_evaluate(ev);
    if (*compare_cmd) return run_compare(cmp);
    if (*stream_cmd) return run_stream(st);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
