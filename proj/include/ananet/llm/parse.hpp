#pragma once

// Tolerant line-oriented parsing of completions.

#include <cctype>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ananet/error.hpp"
#include "ananet/text.hpp"

namespace ananet::llm {

enum class Shape { ObjectList, SentenceList, AgentBlock, YesNo };

// Agent block as written by the model, before any normalization.
struct ParsedAgent {
  std::string name;
  std::vector<std::string> add;
  std::vector<std::string> condition;
  std::vector<std::string> del;
  bool has_add = false;
};

namespace detail {

inline std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  for (auto& line : text::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

// Drops list markers ("- ", "* ", "3. ", "2) "), wrapping quotes and a
// trailing period.
inline std::string clean_item(std::string_view raw) {
  std::string_view s = text::trim(raw);
  if (!s.empty() && (s.front() == '-' || s.front() == '*')) s = text::trim(s.substr(1));
  if (s.size() >= 3 && s.substr(0, 3) == "\xE2\x80\xA2") s = text::trim(s.substr(3));
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) s = text::trim(s.substr(digits + 1));
  while (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = text::trim(s.substr(1, s.size() - 2));
  while (!s.empty() && (s.back() == '.' || s.back() == ';' || s.back() == ',')) s = text::trim(s.substr(0, s.size() - 1));
  return std::string(s);
}

inline bool is_none(std::string_view s) {
  auto lower = text::to_lower(text::trim(s));
  return lower.empty() || lower == "none" || lower == "n/a" || lower == "-" || lower == "nothing";
}

inline std::vector<std::string> split_list_value(std::string_view value) {
  std::vector<std::string> items;
  if (is_none(clean_item(value))) return items;
  std::string normalized(value);
  for (auto& c : normalized)
    if (c == ';') c = ',';
  for (const auto& part : text::split(normalized, ',')) {
    auto item = clean_item(part);
    if (!is_none(item)) items.push_back(std::move(item));
  }
  return items;
}

inline std::size_t word_count(std::string_view s) { return text::split_words(s).size(); }

// Returns the value after `key` (case-insensitive, followed by ':') or npos.
inline std::size_t value_offset(std::string_view line, std::initializer_list<std::string_view> keys) {
  for (auto key : keys) {
    if (text::starts_with_ci(line, key) && line.size() > key.size() && line[key.size()] == ':')
      return key.size() + 1;
  }
  return std::string_view::npos;
}

}  // namespace detail

inline std::vector<std::string> parse_object_list(std::string_view completion) {
  std::vector<std::string> raw_lines;
  for (const auto& line : detail::lines_of(completion)) {
    auto item = detail::clean_item(line);
    if (!item.empty()) raw_lines.push_back(item);
  }
  std::vector<std::string> items;
  for (const auto& line : raw_lines) {
    auto parts = line.find(',') != std::string::npos ? detail::split_list_value(line) : std::vector<std::string>{line};
    for (auto& p : parts) {
      if (detail::is_none(p)) continue;
      if (detail::word_count(p) > 6) throw ShapeError("object-list", p);
      items.push_back(std::move(p));
    }
  }
  return items;
}

inline std::vector<std::string> parse_sentence_list(std::string_view completion) {
  std::vector<std::string> items;
  for (const auto& line : detail::lines_of(completion)) {
    auto item = detail::clean_item(line);
    if (item.empty() || detail::is_none(item) || item.back() == ':') continue;
    if (detail::word_count(item) > 40) throw ShapeError("sentence-list", item.substr(0, 80));
    items.push_back(std::move(item));
  }
  return items;
}

// One or more blocks of "Agent:", "Add list:", "Condition list:",
// "Delete list:" lines. "none" parses to an empty list.
inline std::vector<ParsedAgent> parse_agent_blocks(std::string_view completion) {
  std::vector<ParsedAgent> blocks;
  for (const auto& raw : detail::lines_of(completion)) {
    const std::string line = detail::clean_item(raw);
    if (auto off = detail::value_offset(line, {"agent", "agent name", "name"}); off != std::string::npos) {
      ParsedAgent a;
      a.name = detail::clean_item(std::string_view(line).substr(off));
      if (a.name.empty()) throw ShapeError("agent-block", line);
      blocks.push_back(std::move(a));
      continue;
    }
    if (blocks.empty()) continue;
    auto& cur = blocks.back();
    if (auto off = detail::value_offset(line, {"add list", "add", "adds"}); off != std::string::npos) {
      cur.add = detail::split_list_value(std::string_view(line).substr(off));
      cur.has_add = true;
    } else if (auto off = detail::value_offset(line, {"condition list", "conditions", "precondition list",
                                                       "preconditions"});
               off != std::string::npos) {
      cur.condition = detail::split_list_value(std::string_view(line).substr(off));
    } else if (auto off = detail::value_offset(line, {"delete list", "deletes", "delete"}); off != std::string::npos) {
      cur.del = detail::split_list_value(std::string_view(line).substr(off));
    }
  }
  if (blocks.empty()) throw ShapeError("agent-block", std::string(completion.substr(0, 80)));
  for (const auto& b : blocks)
    if (!b.has_add) throw ShapeError("agent-block", "Agent: " + b.name + " (missing \"Add list:\")");
  return blocks;
}

inline bool parse_yes_no(std::string_view completion) {
  auto words = text::canonical_words(completion);
  if (!words.empty()) {
    if (words.front() == "yes" || words.front() == "true") return true;
    if (words.front() == "no" || words.front() == "false") return false;
  }
  throw ShapeError("yes-no", std::string(text::trim(completion.substr(0, 80))));
}

using Parsed = std::variant<std::vector<std::string>, std::vector<ParsedAgent>, bool>;

inline Parsed parse_structured(std::string_view completion, Shape shape) {
  switch (shape) {
    case Shape::ObjectList: return parse_object_list(completion);
    case Shape::SentenceList: return parse_sentence_list(completion);
    case Shape::AgentBlock: return parse_agent_blocks(completion);
    case Shape::YesNo: return parse_yes_no(completion);
  }
  throw ShapeError("unknown shape", "");
}

}  // namespace ananet::llm
