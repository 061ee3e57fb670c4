#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ananet/error.hpp"
#include "ananet/text.hpp"

namespace ananet {

namespace shape {

// "window clean": an object and the predicate that holds of it.
struct ObjectState {
  std::string object;
  std::string predicate;
  bool operator==(const ObjectState&) const = default;
};

// "cup on table"
struct Spatial {
  std::string subject;
  std::string preposition;
  std::string object;
  bool operator==(const Spatial&) const = default;
};

// "cup in hand"
struct Possession {
  std::string object;
  bool operator==(const Possession&) const = default;
};

// "towel near body" (near == true) or "towel far from body".
struct Proximity {
  std::string object;
  bool near = true;
  bool operator==(const Proximity&) const = default;
};

struct Opaque {
  std::string raw;
  bool operator==(const Opaque&) const = default;
};

}  // namespace shape

using StatusShape = std::variant<shape::ObjectState, shape::Spatial, shape::Possession, shape::Proximity, shape::Opaque>;

namespace detail {

// Multi-word prepositions are listed before their prefixes.
inline constexpr auto kSpatialPrepositions = std::to_array<std::string_view>({"in front of", "on top of", "next to", "inside", "outside", "under", "underneath", "above",
    "below",                         "behind",    "beside",  "near",   "into",    "onto",  "over",       "on",
    "in",                            "at",        "by"});

struct PrepositionHit {
  std::size_t begin;  // first word of the preposition
  std::size_t end;    // one past its last word
};

// First spatial preposition with at least one word on either side.
inline std::optional<PrepositionHit> find_preposition(const std::vector<std::string>& words) {
  for (std::size_t i = 1; i + 1 < words.size(); ++i) {
    for (std::string_view prep : kSpatialPrepositions) {
      const auto parts = text::split_words(prep);
      if (i + parts.size() >= words.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < parts.size() && match; ++k) match = words[i + k] == parts[k];
      if (match) return PrepositionHit{i, i + parts.size()};
    }
  }
  return std::nullopt;
}

inline std::string slice(const std::vector<std::string>& w, std::size_t b, std::size_t e) {
  return text::join(std::vector<std::string>(w.begin() + static_cast<std::ptrdiff_t>(b),
                                             w.begin() + static_cast<std::ptrdiff_t>(e)));
}

inline bool ends_with_words(const std::vector<std::string>& w, std::initializer_list<std::string_view> tail) {
  if (w.size() <= tail.size()) return false;
  std::size_t i = w.size() - tail.size();
  for (auto t : tail)
    if (w[i++] != t) return false;
  return true;
}

inline StatusShape classify(const std::vector<std::string>& w) {
  if (ends_with_words(w, {"in", "hand"})) return shape::Possession{slice(w, 0, w.size() - 2)};
  if (ends_with_words(w, {"near", "body"})) return shape::Proximity{slice(w, 0, w.size() - 2), true};
  if (ends_with_words(w, {"far", "from", "body"})) return shape::Proximity{slice(w, 0, w.size() - 3), false};
  if (auto hit = find_preposition(w))
    return shape::Spatial{slice(w, 0, hit->begin), slice(w, hit->begin, hit->end), slice(w, hit->end, w.size())};
  if (w.size() >= 3 && text::is_particle(w.back()))
    return shape::ObjectState{slice(w, 0, w.size() - 2), slice(w, w.size() - 2, w.size())};
  if (w.size() >= 2) return shape::ObjectState{slice(w, 0, w.size() - 1), w.back()};
  return shape::Opaque{text::join(w)};
}

// Indices of the head nouns (last word of each object phrase) for a shape
// computed over `w`.
inline std::vector<std::size_t> head_nouns(const std::vector<std::string>& w) {
  std::vector<std::size_t> heads;
  if (ends_with_words(w, {"in", "hand"}) || ends_with_words(w, {"near", "body"})) {
    heads.push_back(w.size() - 3);
  } else if (ends_with_words(w, {"far", "from", "body"})) {
    heads.push_back(w.size() - 4);
  } else if (auto hit = find_preposition(w)) {
    heads.push_back(hit->begin - 1);
    heads.push_back(w.size() - 1);
  } else if (w.size() >= 3 && text::is_particle(w.back())) {
    heads.push_back(w.size() - 3);
  } else if (w.size() >= 2) {
    heads.push_back(w.size() - 2);
  }
  return heads;
}

inline std::vector<std::string> canonical_status_words(std::string_view raw) {
  auto words = text::strip_articles(text::canonical_words(raw));
  for (int pass = 0; pass < 4; ++pass) {
    auto next = words;
    for (std::size_t h : head_nouns(next)) next[h] = text::singularize(next[h]);
    if (next == words) break;
    words = std::move(next);
  }
  return words;
}

}  // namespace detail

// A ground proposition about the world. Always holds canonical text:
// lowercase, single-spaced, no articles, head nouns singular.
class Status {
public:
  // Canonicalizes `raw`; throws EmptyStatus if nothing remains.
  static Status normalize(std::string_view raw) {
    auto words = detail::canonical_status_words(raw);
    if (words.empty()) throw EmptyStatus();
    Status s;
    s.text_ = text::join(words);
    s.shape_ = detail::classify(words);
    return s;
  }

  const std::string& text() const noexcept { return text_; }
  const StatusShape& shape() const noexcept { return shape_; }

  // The object the status is about, used to group merge candidates.
  std::optional<std::string> referenced_object() const {
    return std::visit(
        [](const auto& s) -> std::optional<std::string> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, shape::Spatial>)
            return s.subject;
          else if constexpr (std::is_same_v<T, shape::Opaque>)
            return std::nullopt;
          else
            return s.object;
        },
        shape_);
  }

  friend bool operator==(const Status& a, const Status& b) noexcept { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const Status& a, const Status& b) noexcept {
    return a.text_.compare(b.text_) <=> 0;
  }

private:
  Status() = default;
  std::string text_;
  StatusShape shape_;
};

inline Status normalize_status(std::string_view raw) { return Status::normalize(raw); }

using StatusSet = std::set<Status>;

inline StatusSet make_status_set(std::initializer_list<std::string_view> raws) {
  StatusSet out;
  for (auto r : raws) out.insert(Status::normalize(r));
  return out;
}

inline std::string shape_name(const StatusShape& s) {
  static constexpr std::array names{"object-state", "spatial", "possession", "proximity", "opaque"};
  return names[s.index()];
}

}  // namespace ananet
