#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enose {

/// `key = value` text: one entry per line, '#' comments and blank lines ignored.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  /// Throws KeyValueError on lines without '=' and on duplicate keys.
  static KeyValueFile parse(std::string_view text);

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  /// Throws KeyValueError naming the key when absent.
  const std::string& require(std::string_view key) const;

 private:
  std::vector<Entry> entries_;
};

class KeyValueError : public std::runtime_error {
 public:
  KeyValueError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace enose
