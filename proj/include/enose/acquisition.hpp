#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "enose/core.hpp"

namespace enose {

// Line protocol emitted by the acquisition board:
//
//   $F,<seq>,<mq2>,<mq135>,<mq3>,<tgs2610>,<tgs2611>,<hum>,<temp>*<HH>\n
//
// Channels carry exactly three fraction digits. HH is the XOR of every byte
// strictly between '$' and '*', as two uppercase hex digits.

struct WireFrame {
  std::uint32_t seq = 0;
  SensorFrame frame;
  std::uint8_t checksum = 0;

  friend bool operator==(const WireFrame&, const WireFrame&) = default;
};

enum class WireErrorKind { BadPrefix, BadFieldCount, BadNumber, BadChecksum };

std::string_view wire_error_name(WireErrorKind kind);

struct WireError {
  WireErrorKind kind;
  std::string line;
  std::string detail;
};

class WireFormatError : public std::runtime_error {
 public:
  explicit WireFormatError(WireError error);
  const WireError& error() const { return error_; }
  WireErrorKind kind() const { return error_.kind; }

 private:
  WireError error_;
};

std::uint8_t wire_checksum(std::string_view payload);

/// Throws std::invalid_argument if a channel is non-finite.
std::string serialize_frame(std::uint32_t seq, const ChannelArray& channels);
std::string serialize_frame(std::uint32_t seq, const SensorFrame& frame);

/// Every sample of `dataset` as consecutive wire lines, seq starting at `first_seq`.
std::string serialize_stream(const Dataset& dataset, std::uint32_t first_seq = 0);

/// Accepts the line with or without its terminating LF.
std::variant<WireFrame, WireError> try_parse_frame(std::string_view line);
/// Throws WireFormatError.
WireFrame parse_frame(std::string_view line);

/// A line (or run of bytes) discarded by the stream reader.
struct SkipNotice {
  /// Parse error, or nullopt for bytes that never formed a terminated line.
  std::optional<WireErrorKind> reason;
  std::string bytes;
  std::string detail;

  friend bool operator==(const SkipNotice&, const SkipNotice&) = default;
};

/// Forward jump in sequence numbers.
struct GapNotice {
  std::uint32_t previous = 0;
  std::uint32_t received = 0;
  std::uint64_t missing = 0;

  friend bool operator==(const GapNotice&, const GapNotice&) = default;
};

using StreamEvent = std::variant<WireFrame, SkipNotice, GapNotice>;

/// Reassembles frames from arbitrarily fragmented input. A '$' always starts
/// a new line, so junk before it is dropped as one skip notice. Output
/// depends only on the concatenated byte sequence, not on chunk boundaries.
class StreamReader {
 public:
  static constexpr std::size_t kMaxLineBytes = 256;

  /// Appends the events completed by `bytes` to `out`.
  void feed(std::string_view bytes, std::vector<StreamEvent>& out);
  std::vector<StreamEvent> feed(std::string_view bytes);
  /// End of source: a pending unterminated line becomes a skip notice.
  void finish(std::vector<StreamEvent>& out);
  std::vector<StreamEvent> finish();

  std::uint64_t frames() const { return frames_; }
  std::uint64_t skipped() const { return skipped_; }
  std::uint64_t gaps() const { return gaps_; }
  std::uint64_t missing() const { return missing_; }

 private:
  void flush_junk(std::string_view why, std::vector<StreamEvent>& out);
  void complete_line(std::vector<StreamEvent>& out);

  std::string pending_;
  bool discarding_ = false;
  std::optional<std::uint32_t> last_seq_;
  std::uint64_t frames_ = 0;
  std::uint64_t skipped_ = 0;
  std::uint64_t gaps_ = 0;
  std::uint64_t missing_ = 0;
};

/// Pulls `chunk_size` bytes at a time from `in` until EOF and hands every
/// event to `sink`. Returns the reader for its counters.
StreamReader read_stream(std::istream& in, const std::function<void(const StreamEvent&)>& sink,
                         std::size_t chunk_size = 4096);

}  // namespace enose
