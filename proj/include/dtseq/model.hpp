#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtseq/timeutil.hpp"

namespace dtseq {

/// A trace source. The four named platforms are recognized case-insensitively;
/// anything else is kept verbatim as Other.
class Platform {
 public:
  enum class Kind { Facebook, Instagram, TikTok, YouTube, Other };

  Platform() : kind_(Kind::Other) {}
  explicit Platform(Kind kind);

  static Platform parse(std::string_view name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  friend bool operator==(const Platform& a, const Platform& b) { return a.name_ == b.name_; }
  friend auto operator<=>(const Platform& a, const Platform& b) { return a.name_ <=> b.name_; }

 private:
  Kind kind_;
  std::string name_;
};

struct Event {
  std::string user_id;
  Instant timestamp;
  Platform platform;
  std::string activity;
  std::optional<std::string> content;

  friend bool operator==(const Event&, const Event&) = default;
};

/// One user's events in chronological order. Ties keep their input order.
class UserSequence {
 public:
  UserSequence() = default;
  /// Sorts `events` stably by timestamp. Throws InvalidInput when an event
  /// belongs to another user or has an empty platform+activity.
  UserSequence(std::string user_id, std::vector<Event> events);

  const std::string& user_id() const { return user_id_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  friend bool operator==(const UserSequence&, const UserSequence&) = default;

 private:
  std::string user_id_;
  std::vector<Event> events_;
};

/// Groups events by user (sorted by user id) and sorts each group in time.
std::vector<UserSequence> group_by_user(std::vector<Event> events);

enum class LexiconMode { Platform, PlatformActivity, SyntheticWord };

/// The part of an event a lexicon distinguishes. Fields finer than the mode
/// are left empty.
struct Descriptor {
  Platform platform;
  std::string activity;
  std::optional<std::string> content;

  static Descriptor of(const Event& e, LexiconMode mode);

  /// "Instagram", "Instagram_likes" or "Instagram_likes_<content>".
  std::string label() const;

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
  friend auto operator<=>(const Descriptor& a, const Descriptor& b) {
    if (auto c = a.platform <=> b.platform; c != 0) return c;
    if (auto c = a.activity <=> b.activity; c != 0) return c;
    return a.content <=> b.content;
  }
};

using Symbol = std::int32_t;
using SymbolSequence = std::vector<Symbol>;

/// Dense, first-seen numbering of descriptors.
class Lexicon {
 public:
  explicit Lexicon(LexiconMode mode = LexiconMode::PlatformActivity) : mode_(mode) {}

  /// Builds one shared lexicon over all events of all sequences, in order.
  static Lexicon from_sequences(std::span<const UserSequence> seqs, LexiconMode mode);

  LexiconMode mode() const { return mode_; }
  std::size_t size() const { return reverse_.size(); }

  /// Returns the symbol of `d`, assigning the next free one if unseen.
  Symbol intern(const Descriptor& d);
  Symbol intern(const Event& e) { return intern(Descriptor::of(e, mode_)); }

  std::optional<Symbol> find(const Descriptor& d) const;
  std::optional<Symbol> find_label(std::string_view label) const;

  /// Throws InvalidInput if any event is not in the lexicon.
  SymbolSequence encode(const UserSequence& seq) const;

  const Descriptor& decode(Symbol s) const;
  const std::string& label(Symbol s) const { return labels_.at(static_cast<std::size_t>(s)); }
  std::span<const std::string> labels() const { return labels_; }

 private:
  LexiconMode mode_;
  std::map<Descriptor, Symbol> forward_;
  std::map<std::string, Symbol, std::less<>> by_label_;
  std::vector<Descriptor> reverse_;
  std::vector<std::string> labels_;
};

struct Encoded {
  SymbolSequence symbols;
  Lexicon lexicon;
};

/// Encodes one sequence with a fresh lexicon. Throws EmptyInput if empty.
Encoded encode(const UserSequence& seq, LexiconMode mode);

/// Collapsed run of events with the same descriptor.
struct Session {
  std::string user_id;
  Descriptor descriptor;
  Instant start;
  Instant end;
  std::int64_t count = 1;

  friend bool operator==(const Session&, const Session&) = default;
};

struct TimeWindow {
  enum class Kind { WholePeriod, Daily };
  Kind kind = Kind::Daily;
};

}  // namespace dtseq
