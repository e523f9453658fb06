#include "enose/keyvalue.hpp"

namespace enose {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw KeyValueError({}, "line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw KeyValueError({}, "line " + std::to_string(line_no) + ": empty key");
    if (kv.find(key))
      throw KeyValueError(key, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv.entries_.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
  }
  return kv;
}

const KeyValueFile::Entry* KeyValueFile::find(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

const std::string& KeyValueFile::require(std::string_view key) const {
  if (auto* e = find(key)) return e->value;
  throw KeyValueError(std::string(key), "missing required key '" + std::string(key) + "'");
}

}  // namespace enose
