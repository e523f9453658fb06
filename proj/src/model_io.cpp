#include "enose/nn.hpp"

#include <cmath>
#include <sstream>

namespace enose {

namespace {

using Kind = ModelFormatError::Kind;

void append_row(std::string& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_real(values[i]);
  }
  out += '\n';
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    if (pos_ >= text_.size())
      throw ModelFormatError(Kind::Corrupt, std::string("model file truncated: missing ") + what);
    auto end = text_.find('\n', pos_);
    auto line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return line;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

double number(std::string_view tok, std::size_t line_no) {
  auto v = parse_real(tok);
  if (!v || !std::isfinite(*v))
    throw ModelFormatError(Kind::Corrupt, "model file line " + std::to_string(line_no) +
                                              ": bad number '" + std::string(tok) + "'");
  return *v;
}

std::size_t count(std::string_view tok, std::size_t line_no) {
  auto v = parse_real(tok);
  if (!v || *v < 0 || *v != std::floor(*v) || *v > 1e9)
    throw ModelFormatError(Kind::Corrupt, "model file line " + std::to_string(line_no) +
                                              ": bad integer '" + std::string(tok) + "'");
  return static_cast<std::size_t>(*v);
}

std::vector<double> row(LineReader& in, std::size_t expected, const char* what) {
  auto line = in.next(what);
  auto toks = tokens(line);
  if (toks.size() != expected)
    throw ModelFormatError(Kind::Dimension, "model file line " + std::to_string(in.line_no()) +
                                                ": " + what + " has " + std::to_string(toks.size()) +
                                                " values, expected " + std::to_string(expected));
  std::vector<double> out;
  out.reserve(expected);
  for (auto t : toks) out.push_back(number(t, in.line_no()));
  return out;
}

Matrix matrix(LineReader& in, std::size_t rows, std::size_t cols, const char* what) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto values = row(in, cols, what);
    std::copy(values.begin(), values.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

std::string format_model(const Network& network, const Scaler& scaler) {
  const auto& cfg = network.config();
  std::string out;
  out += kModelMagic;
  out += '\n';
  out += "dims 7 " + std::to_string(cfg.hidden) + " 5\n";
  out += "activation " + std::string(activation_name(cfg.activation)) + ' ' +
         format_real(cfg.table.lower) + ' ' + format_real(cfg.table.upper) + ' ' +
         std::to_string(cfg.table.entries) + '\n';
  out += "scaler";
  for (double v : scaler.min) out += ' ' + format_real(v);
  for (double v : scaler.max) out += ' ' + format_real(v);
  out += '\n';
  for (std::size_t r = 0; r < network.w1().rows(); ++r) append_row(out, network.w1().row(r));
  append_row(out, network.b1());
  for (std::size_t r = 0; r < network.w2().rows(); ++r) append_row(out, network.w2().row(r));
  append_row(out, network.b2());
  return out;
}

Model parse_model(std::string_view text) {
  // Every line we write ends in LF; anything else was cut short.
  if (text.empty() || text.back() != '\n')
    throw ModelFormatError(Kind::Corrupt, "model file truncated: missing final newline");
  LineReader in(text);

  auto magic = in.next("header");
  if (!magic.empty() && magic.back() == '\r') magic.remove_suffix(1);
  if (magic != kModelMagic) {
    if (magic.starts_with("ENOSE-MODEL"))
      throw ModelFormatError(Kind::Version, "unsupported model version '" + std::string(magic) + "'");
    throw ModelFormatError(Kind::Corrupt, "not an enose model file");
  }

  auto dims = tokens(in.next("dims"));
  if (dims.size() != 4 || dims[0] != "dims")
    throw ModelFormatError(Kind::Corrupt, "model file line 2: expected 'dims 7 <Z> 5'");
  const auto n_in = count(dims[1], 2), z = count(dims[2], 2), n_out = count(dims[3], 2);
  if (n_in != kInputs || n_out != kOutputs || z == 0)
    throw ModelFormatError(Kind::Dimension, "model dims must be 7 <Z> 5 with Z >= 1");

  auto act = tokens(in.next("activation"));
  if (act.size() != 5 || act[0] != "activation")
    throw ModelFormatError(Kind::Corrupt, "model file line 3: expected 'activation <mode> <lower> <upper> <N>'");
  NetworkConfig cfg;
  cfg.hidden = z;
  auto mode = parse_activation(act[1]);
  if (!mode) throw ModelFormatError(Kind::Corrupt, "unknown activation '" + std::string(act[1]) + "'");
  cfg.activation = *mode;
  cfg.table.lower = number(act[2], 3);
  cfg.table.upper = number(act[3], 3);
  cfg.table.entries = count(act[4], 3);

  auto sc = tokens(in.next("scaler"));
  if (sc.empty() || sc[0] != "scaler")
    throw ModelFormatError(Kind::Corrupt, "model file line 4: expected scaler line");
  if (sc.size() != 1 + 2 * kChannels)
    throw ModelFormatError(Kind::Dimension, "scaler line must carry 14 values");
  Scaler scaler;
  for (std::size_t i = 0; i < kChannels; ++i) {
    scaler.min[i] = number(sc[1 + i], 4);
    scaler.max[i] = number(sc[1 + kChannels + i], 4);
    if (scaler.min[i] > scaler.max[i])
      throw ModelFormatError(Kind::Corrupt, "scaler min exceeds max for " + std::string(kChannelNames[i]));
  }

  auto w1 = matrix(in, z, kInputs, "W1 row");
  auto b1 = row(in, z, "b1");
  auto w2 = matrix(in, kOutputs, z, "W2 row");
  auto b2 = row(in, kOutputs, "b2");
  if (!in.at_end())
    throw ModelFormatError(Kind::Dimension, "model file has trailing rows beyond declared dims");

  try {
    return {Network(cfg, std::move(w1), std::move(b1), std::move(w2), std::move(b2)), scaler};
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Kind::Corrupt, e.what());
  }
}

void save_model(const Network& network, const Scaler& scaler, const std::filesystem::path& path) {
  try {
    write_file(path, format_model(network, scaler));
  } catch (const DatasetError& e) {
    throw ModelFormatError(Kind::Io, e.what());
  }
}

Model load_model(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DatasetError& e) {
    throw ModelFormatError(Kind::Io, e.what());
  }
  return parse_model(text);
}

}  // namespace enose
