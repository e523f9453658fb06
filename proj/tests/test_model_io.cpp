#include <doctest.h>

#include <filesystem>
#include <random>

#include "enose/nn.hpp"

using namespace enose;

namespace {

Model sample_model(std::size_t z, ActivationMode mode = ActivationMode::Exact) {
  NetworkConfig cfg;
  cfg.hidden = z;
  cfg.activation = mode;
  TrainConfig tc;
  tc.seed = 17;
  tc.init_half_range = 3.0;
  Scaler s;
  for (std::size_t i = 0; i < kChannels; ++i) {
    s.min[i] = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
    s.max[i] = 100.0 + static_cast<double>(i) / 7.0;
  }
  return {init_weights(cfg, tc), s};
}

ModelFormatError::Kind error_kind(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ModelFormatError& e) {
    return e.kind();
  }
  FAIL("expected a ModelFormatError");
  return ModelFormatError::Kind::Io;
}

}  // namespace

TEST_CASE("model file layout") {
  auto m = sample_model(3);
  auto text = format_model(m.network, m.scaler);
  CHECK(text.starts_with("ENOSE-MODEL v1\ndims 7 3 5\nactivation exact -8 8 2048\nscaler "));
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 4 + 3 + 1 + 5 + 1);
}

TEST_CASE("model round trip is bit-identical") {
  for (auto mode : {ActivationMode::Exact, ActivationMode::Table}) {
    for (std::size_t z : {1u, 3u, 10u}) {
      auto m = sample_model(z, mode);
      const auto path = std::filesystem::temp_directory_path() / "enose_model_roundtrip.txt";
      save_model(m.network, m.scaler, path);
      auto back = load_model(path);
      std::filesystem::remove(path);
      CHECK(back.network.same_weights(m.network));
      CHECK(back.scaler == m.scaler);

      std::mt19937_64 rng(z);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < 100; ++i) {
        ChannelArray x;
        for (auto& v : x) v = u(rng);
        CHECK(forward(back.network, x).output == forward(m.network, x).output);
      }
    }
  }
}

TEST_CASE("model parsing failures") {
  auto m = sample_model(3);
  const auto text = format_model(m.network, m.scaler);

  SUBCASE("truncation anywhere is a corrupt file") {
    for (std::size_t cut = 1; cut < text.size(); cut += 7)
      CHECK(error_kind(text.substr(0, cut)) == ModelFormatError::Kind::Corrupt);
    // Cut at a line boundary: rows are missing.
    auto at_line = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK(error_kind(at_line) == ModelFormatError::Kind::Corrupt);
  }
  SUBCASE("version mismatch") {
    auto v2 = "ENOSE-MODEL v2" + text.substr(text.find('\n'));
    CHECK(error_kind(v2) == ModelFormatError::Kind::Version);
    CHECK(error_kind("SOMETHING ELSE\n") == ModelFormatError::Kind::Corrupt);
  }
  SUBCASE("declared Z=3 with Z=10 rows") {
    auto big = sample_model(10);
    auto t = format_model(big.network, big.scaler);
    t.replace(t.find("dims 7 10 5"), 11, "dims 7 3 5");
    CHECK(error_kind(t) == ModelFormatError::Kind::Dimension);
  }
  SUBCASE("bad dims line") {
    auto t = text;
    t.replace(t.find("dims 7 3 5"), 10, "dims 8 3 5");
    CHECK(error_kind(t) == ModelFormatError::Kind::Dimension);
  }
  SUBCASE("trailing rows") { CHECK(error_kind(text + "1 2 3 4 5\n") == ModelFormatError::Kind::Dimension); }
  SUBCASE("garbage number") {
    auto t = text;
    auto pos = t.find('\n', t.find("scaler")) + 1;
    t.replace(pos, 1, "x");
    CHECK(error_kind(t) == ModelFormatError::Kind::Corrupt);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model("/nonexistent/model.txt"), ModelFormatError);
  }
}
