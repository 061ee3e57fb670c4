#pragma once

// Small text helpers shared by status canonicalization, agent naming and the
// verb -> status derivation rule. ASCII only; non-ASCII bytes pass through.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ananet::text {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

inline std::string join(const std::vector<std::string>& words, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

// Lowercases, replaces punctuation other than '-', '\'', '(', ')' and '#' with
// spaces, and collapses whitespace.
inline std::vector<std::string> canonical_words(std::string_view raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (unsigned char c : raw) {
    if (std::isalnum(c) || c == '-' || c == '\'' || c == '(' || c == ')' || c == '#' || c >= 0x80)
      cleaned.push_back(static_cast<char>(std::tolower(c)));
    else
      cleaned.push_back(' ');
  }
  return split_words(cleaned);
}

inline bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

inline std::vector<std::string> strip_articles(std::vector<std::string> words) {
  words.erase(std::remove_if(words.begin(), words.end(), [](const std::string& w) { return is_article(w); }),
              words.end());
  return words;
}

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline int syllable_groups(std::string_view w) {
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    const bool v = is_vowel(c) || c == 'y';
    if (v && !in_vowel) ++groups;
    in_vowel = v;
  }
  return groups;
}

// Single-syllable consonant-vowel-consonant words double their final letter
// before a vowel suffix ("stop" -> "stopped", "sit" -> "sitting").
inline bool doubles_final_consonant(std::string_view w) {
  if (w.size() < 3) return false;
  const char last = w[w.size() - 1], mid = w[w.size() - 2], first = w[w.size() - 3];
  if (is_vowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  if (!is_vowel(mid) || is_vowel(first)) return false;
  return syllable_groups(w) == 1;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

namespace detail {

struct Pair {
  std::string_view from;
  std::string_view to;
};

inline constexpr auto kUninflectedNouns = std::to_array<std::string_view>({"glass", "gas",   "bus",     "lens",   "news",   "clothes", "scissors", "pants",
    "dress",                   "grass", "series",  "species", "cactus", "status",  "physics",  "mathematics",
    "jeans",                   "tongs", "glasses", "trousers", "shorts", "stairs"});

inline constexpr std::array kIrregularPlurals{
    Pair{"children", "child"}, Pair{"people", "person"}, Pair{"men", "man"},   Pair{"women", "woman"},
    Pair{"feet", "foot"},      Pair{"teeth", "tooth"},   Pair{"mice", "mouse"}, Pair{"knives", "knife"},
    Pair{"leaves", "leaf"},    Pair{"shelves", "shelf"}, Pair{"loaves", "loaf"}, Pair{"wives", "wife"}};

// Resultative adjectives and irregular past participles. "clean window"
// derives "window clean", so adjectival results map to themselves.
inline constexpr std::array kParticiples{
    Pair{"clean", "clean"},    Pair{"dry", "dry"},         Pair{"empty", "empty"},     Pair{"open", "open"},
    Pair{"fill", "full"},      Pair{"warm", "warm"},       Pair{"cool", "cool"},       Pair{"tidy", "tidy"},
    Pair{"drink", "drunk"},    Pair{"eat", "eaten"},       Pair{"make", "made"},       Pair{"break", "broken"},
    Pair{"write", "written"},  Pair{"read", "read"},       Pair{"put", "put"},         Pair{"set", "set"},
    Pair{"cut", "cut"},        Pair{"shut", "shut"},       Pair{"hang", "hung"},       Pair{"hold", "held"},
    Pair{"bring", "brought"},  Pair{"buy", "bought"},      Pair{"take", "taken"},      Pair{"give", "given"},
    Pair{"throw", "thrown"},   Pair{"wear", "worn"},       Pair{"tear", "torn"},       Pair{"sweep", "swept"},
    Pair{"feed", "fed"},       Pair{"leave", "left"},      Pair{"keep", "kept"},       Pair{"find", "found"},
    Pair{"build", "built"},    Pair{"draw", "drawn"},      Pair{"drive", "driven"},    Pair{"ride", "ridden"},
    Pair{"hide", "hidden"},    Pair{"shake", "shaken"},    Pair{"wake", "woken"},      Pair{"sell", "sold"},
    Pair{"tell", "told"},      Pair{"send", "sent"},       Pair{"spend", "spent"},     Pair{"lay", "laid"},
    Pair{"pay", "paid"},       Pair{"do", "done"},         Pair{"see", "seen"},        Pair{"get", "gotten"},
    Pair{"run", "run"},        Pair{"sing", "sung"},       Pair{"begin", "begun"},     Pair{"forget", "forgotten"},
    Pair{"freeze", "frozen"},  Pair{"choose", "chosen"},   Pair{"steal", "stolen"},    Pair{"speak", "spoken"},
    Pair{"grow", "grown"},     Pair{"know", "known"},      Pair{"blow", "blown"},      Pair{"fly", "flown"},
    Pair{"spin", "spun"},      Pair{"stick", "stuck"},     Pair{"hit", "hit"},         Pair{"let", "let"},
    Pair{"spread", "spread"},  Pair{"split", "split"},     Pair{"light", "lit"},       Pair{"lose", "lost"},
    Pair{"bend", "bent"},      Pair{"bind", "bound"},      Pair{"wind", "wound"},      Pair{"dig", "dug"},
    Pair{"sit", "sat"},        Pair{"stand", "stood"},     Pair{"win", "won"},         Pair{"mean", "meant"},
    Pair{"catch", "caught"},   Pair{"teach", "taught"},    Pair{"fight", "fought"},    Pair{"think", "thought"},
    Pair{"feel", "felt"},      Pair{"meet", "met"},        Pair{"lead", "led"},        Pair{"shine", "shone"}};

inline constexpr auto kParticles = std::to_array<std::string_view>({"up", "down", "off", "on", "out", "away", "back", "over"});

template <class Table>
const std::string_view* lookup(const Table& table, std::string_view key) {
  for (const auto& p : table)
    if (p.from == key) return &p.to;
  return nullptr;
}

}  // namespace detail

inline bool is_particle(std::string_view w) {
  return std::find(detail::kParticles.begin(), detail::kParticles.end(), w) != detail::kParticles.end();
}

// Head-noun singularization. Idempotent: singularize(singularize(w)) == singularize(w).
inline std::string singularize(std::string_view w) {
  if (std::find(detail::kUninflectedNouns.begin(), detail::kUninflectedNouns.end(), w) !=
      detail::kUninflectedNouns.end())
    return std::string(w);
  if (const auto* irr = detail::lookup(detail::kIrregularPlurals, w)) return std::string(*irr);
  if (w.size() > 4 && ends_with(w, "ies")) return std::string(w.substr(0, w.size() - 3)) + "y";
  if (w.size() > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "sses") || ends_with(w, "xes") ||
                       ends_with(w, "zzes")))
    return std::string(w.substr(0, w.size() - 2));
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
    return std::string(w.substr(0, w.size() - 1));
  return std::string(w);
}

// Resultative / passive participle of a base-form verb.
inline std::string participle(std::string_view verb) {
  if (const auto* irr = detail::lookup(detail::kParticiples, verb)) return std::string(*irr);
  if (ends_with(verb, "e")) return std::string(verb) + "d";
  if (verb.size() > 1 && ends_with(verb, "y") && !is_vowel(verb[verb.size() - 2]))
    return std::string(verb.substr(0, verb.size() - 1)) + "ied";
  if (doubles_final_consonant(verb)) return std::string(verb) + verb.back() + "ed";
  return std::string(verb) + "ed";
}

// Progressive form: "sleep" -> "sleeping", "sit" -> "sitting", "lie" -> "lying".
inline std::string gerund(std::string_view verb) {
  if (ends_with(verb, "ie")) return std::string(verb.substr(0, verb.size() - 2)) + "ying";
  if (verb.size() > 2 && ends_with(verb, "e") && !ends_with(verb, "ee") && !ends_with(verb, "ye") &&
      !ends_with(verb, "oe"))
    return std::string(verb.substr(0, verb.size() - 1)) + "ing";
  if (doubles_final_consonant(verb)) return std::string(verb) + verb.back() + "ing";
  return std::string(verb) + "ing";
}

// FNV-1a, 64 bit. Used for fixture digests; the value is part of the on-disk
// format and must not change.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

}  // namespace ananet::text
