#include "enose/acquisition.hpp"

#include <charconv>
#include <cmath>
#include <istream>

namespace enose {

namespace {

constexpr std::string_view kHex = "0123456789ABCDEF";
constexpr std::size_t kWireFields = 2 + kChannels;  // "F", seq, channels

std::optional<std::uint8_t> hex_digit(char c) {
  if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
  if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
  return std::nullopt;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::optional<std::uint32_t> parse_seq(std::string_view s) {
  if (s.empty() || s.size() > 10) return std::nullopt;
  for (char c : s)
    if (!is_digit(c)) return std::nullopt;
  std::uint64_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  if (v > 0xFFFFFFFFULL) return std::nullopt;
  return static_cast<std::uint32_t>(v);
}

// -?digits.ddd
std::optional<double> parse_channel(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  const std::size_t int_start = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == int_start || i >= s.size() || s[i] != '.') return std::nullopt;
  ++i;
  if (s.size() - i != 3) return std::nullopt;
  for (; i < s.size(); ++i)
    if (!is_digit(s[i])) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

WireError fail(WireErrorKind kind, std::string_view line, std::string detail) {
  return {kind, std::string(line), std::move(detail)};
}

}  // namespace

std::string_view wire_error_name(WireErrorKind kind) {
  switch (kind) {
    case WireErrorKind::BadPrefix: return "bad_prefix";
    case WireErrorKind::BadFieldCount: return "bad_field_count";
    case WireErrorKind::BadNumber: return "bad_number";
    case WireErrorKind::BadChecksum: return "bad_checksum";
  }
  return "unknown";
}

WireFormatError::WireFormatError(WireError error)
    : std::runtime_error(std::string(wire_error_name(error.kind)) + ": " + error.detail),
      error_(std::move(error)) {}

std::uint8_t wire_checksum(std::string_view payload) {
  std::uint8_t cs = 0;
  for (char c : payload) cs ^= static_cast<std::uint8_t>(c);
  return cs;
}

std::string serialize_frame(std::uint32_t seq, const ChannelArray& channels) {
  std::string payload = "F," + std::to_string(seq);
  for (std::size_t i = 0; i < kChannels; ++i) {
    if (!std::isfinite(channels[i]))
      throw std::invalid_argument("cannot serialize non-finite " + std::string(kChannelNames[i]));
    char buf[400];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, channels[i], std::chars_format::fixed, 3);
    if (ec != std::errc{}) throw std::invalid_argument("channel value too large to serialize");
    payload += ',';
    payload.append(buf, ptr);
  }
  const auto cs = wire_checksum(payload);
  std::string line;
  line.reserve(payload.size() + 5);
  line += '$';
  line += payload;
  line += '*';
  line += kHex[cs >> 4];
  line += kHex[cs & 0xF];
  line += '\n';
  return line;
}

std::string serialize_frame(std::uint32_t seq, const SensorFrame& frame) {
  return serialize_frame(seq, frame.channels());
}

std::string serialize_stream(const Dataset& dataset, std::uint32_t first_seq) {
  std::string out;
  std::uint32_t seq = first_seq;
  for (const auto& s : dataset.samples) out += serialize_frame(seq++, s.frame);
  return out;
}

std::variant<WireFrame, WireError> try_parse_frame(std::string_view line) {
  const std::string_view original = line;
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.empty() || line.front() != '$')
    return fail(WireErrorKind::BadPrefix, original, "line does not start with '$'");

  const auto star = line.find('*');
  if (star == std::string_view::npos)
    return fail(WireErrorKind::BadChecksum, original, "missing '*' checksum delimiter");
  const auto payload = line.substr(1, star - 1);
  const auto cs_text = line.substr(star + 1);

  std::vector<std::string_view> fields;
  for (std::size_t start = 0;;) {
    auto comma = payload.find(',', start);
    fields.push_back(payload.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.front() != "F")
    return fail(WireErrorKind::BadPrefix, original, "sentence type is not 'F'");
  if (fields.size() != kWireFields)
    return fail(WireErrorKind::BadFieldCount, original,
                "expected 7 channels, got " + std::to_string(fields.size() >= 2 ? fields.size() - 2 : 0));

  auto seq = parse_seq(fields[1]);
  if (!seq) return fail(WireErrorKind::BadNumber, original, "bad sequence number '" + std::string(fields[1]) + "'");
  ChannelArray channels{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    auto v = parse_channel(fields[2 + i]);
    if (!v)
      return fail(WireErrorKind::BadNumber, original,
                  "bad " + std::string(kChannelNames[i]) + " value '" + std::string(fields[2 + i]) + "'");
    channels[i] = *v;
  }

  if (cs_text.size() != 2)
    return fail(WireErrorKind::BadChecksum, original, "checksum must be two hex digits");
  auto hi = hex_digit(cs_text[0]);
  auto lo = hex_digit(cs_text[1]);
  if (!hi || !lo) return fail(WireErrorKind::BadChecksum, original, "checksum must be uppercase hex");
  const auto declared = static_cast<std::uint8_t>((*hi << 4) | *lo);
  const auto actual = wire_checksum(payload);
  if (declared != actual)
    return fail(WireErrorKind::BadChecksum, original,
                std::string("checksum mismatch: declared ") + cs_text[0] + cs_text[1] + ", computed " +
                    kHex[actual >> 4] + kHex[actual & 0xF]);

  return WireFrame{*seq, SensorFrame(channels), declared};
}

WireFrame parse_frame(std::string_view line) {
  auto r = try_parse_frame(line);
  if (auto* err = std::get_if<WireError>(&r)) throw WireFormatError(std::move(*err));
  return std::get<WireFrame>(std::move(r));
}

void StreamReader::flush_junk(std::string_view why, std::vector<StreamEvent>& out) {
  if (pending_.empty()) return;
  ++skipped_;
  out.emplace_back(SkipNotice{std::nullopt, std::move(pending_), std::string(why)});
  pending_.clear();
}

void StreamReader::complete_line(std::vector<StreamEvent>& out) {
  if (pending_.empty()) return;
  auto parsed = try_parse_frame(pending_);
  if (auto* err = std::get_if<WireError>(&parsed)) {
    ++skipped_;
    out.emplace_back(SkipNotice{err->kind, std::move(pending_), std::move(err->detail)});
    pending_.clear();
    return;
  }
  auto frame = std::get<WireFrame>(std::move(parsed));
  if (last_seq_ && frame.seq > *last_seq_ + std::uint64_t{1}) {
    const std::uint64_t missing = std::uint64_t{frame.seq} - *last_seq_ - 1;
    ++gaps_;
    missing_ += missing;
    out.emplace_back(GapNotice{*last_seq_, frame.seq, missing});
  }
  last_seq_ = frame.seq;
  ++frames_;
  out.emplace_back(std::move(frame));
  pending_.clear();
}

void StreamReader::feed(std::string_view bytes, std::vector<StreamEvent>& out) {
  for (char c : bytes) {
    if (c == '$') {
      discarding_ = false;
      flush_junk("unterminated bytes before '$'", out);
      pending_.push_back(c);
    } else if (c == '\n') {
      if (discarding_) {
        discarding_ = false;
        continue;
      }
      complete_line(out);
    } else if (!discarding_) {
      pending_.push_back(c);
      if (pending_.size() > kMaxLineBytes) {
        flush_junk("line exceeds maximum length", out);
        discarding_ = true;
      }
    }
  }
}

std::vector<StreamEvent> StreamReader::feed(std::string_view bytes) {
  std::vector<StreamEvent> out;
  feed(bytes, out);
  return out;
}

void StreamReader::finish(std::vector<StreamEvent>& out) {
  discarding_ = false;
  flush_junk("unterminated line at end of input", out);
}

std::vector<StreamEvent> StreamReader::finish() {
  std::vector<StreamEvent> out;
  finish(out);
  return out;
}

StreamReader read_stream(std::istream& in, const std::function<void(const StreamEvent&)>& sink,
                         std::size_t chunk_size) {
  StreamReader reader;
  std::string buf(chunk_size == 0 ? 1 : chunk_size, '\0');
  std::vector<StreamEvent> events;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    events.clear();
    reader.feed(std::string_view(buf.data(), got), events);
    for (const auto& e : events) sink(e);
  }
  events.clear();
  reader.finish(events);
  for (const auto& e : events) sink(e);
  return reader;
}

}  // namespace enose
