#include "dtseq/model.hpp"

#include <algorithm>
#include <cctype>

#include "dtseq/error.hpp"

namespace dtseq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SingularModel: return "SingularModel";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::NotInVocabulary: return "NotInVocabulary";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
  }
  return "Unknown";
}

namespace {

const char* canonical_name(Platform::Kind kind) {
  switch (kind) {
    case Platform::Kind::Facebook: return "Facebook";
    case Platform::Kind::Instagram: return "Instagram";
    case Platform::Kind::TikTok: return "TikTok";
    case Platform::Kind::YouTube: return "YouTube";
    case Platform::Kind::Other: break;
  }
  return "Other";
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Platform::Platform(Kind kind) : kind_(kind), name_(canonical_name(kind)) {}

Platform Platform::parse(std::string_view name) {
  const std::string l = lower(name);
  if (l == "facebook" || l == "fb") return Platform(Kind::Facebook);
  if (l == "instagram" || l == "ig") return Platform(Kind::Instagram);
  if (l == "tiktok" || l == "tt") return Platform(Kind::TikTok);
  if (l == "youtube" || l == "yt") return Platform(Kind::YouTube);
  Platform p;
  p.kind_ = Kind::Other;
  p.name_ = std::string(name);
  return p;
}

UserSequence::UserSequence(std::string user_id, std::vector<Event> events)
    : user_id_(std::move(user_id)), events_(std::move(events)) {
  for (const auto& e : events_) {
    if (e.user_id != user_id_)
      throw Error(ErrorKind::InvalidInput, "event of user '" + e.user_id +
                                               "' in sequence of user '" + user_id_ + "'");
    if (e.platform.name().empty() && e.activity.empty())
      throw Error(ErrorKind::InvalidInput, "event with empty platform and activity");
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

std::vector<UserSequence> group_by_user(std::vector<Event> events) {
  std::map<std::string, std::vector<Event>> by_user;
  for (auto& e : events) by_user[e.user_id].push_back(std::move(e));
  std::vector<UserSequence> out;
  out.reserve(by_user.size());
  for (auto& [user, evs] : by_user) out.emplace_back(user, std::move(evs));
  return out;
}

Descriptor Descriptor::of(const Event& e, LexiconMode mode) {
  Descriptor d;
  d.platform = e.platform;
  if (mode != LexiconMode::Platform) d.activity = e.activity;
  if (mode == LexiconMode::SyntheticWord) d.content = e.content;
  return d;
}

std::string Descriptor::label() const {
  std::string out = platform.name();
  if (!activity.empty()) out += "_" + activity;
  if (content) out += "_" + *content;
  return out;
}

Lexicon Lexicon::from_sequences(std::span<const UserSequence> seqs, LexiconMode mode) {
  Lexicon lex(mode);
  for (const auto& s : seqs)
    for (const auto& e : s.events()) lex.intern(e);
  return lex;
}

Symbol Lexicon::intern(const Descriptor& d) {
  if (auto it = forward_.find(d); it != forward_.end()) return it->second;
  const auto sym = static_cast<Symbol>(reverse_.size());
  forward_.emplace(d, sym);
  reverse_.push_back(d);
  labels_.push_back(d.label());
  by_label_.emplace(labels_.back(), sym);
  return sym;
}

std::optional<Symbol> Lexicon::find(const Descriptor& d) const {
  if (auto it = forward_.find(d); it != forward_.end()) return it->second;
  return std::nullopt;
}

std::optional<Symbol> Lexicon::find_label(std::string_view label) const {
  if (auto it = by_label_.find(label); it != by_label_.end()) return it->second;
  return std::nullopt;
}

SymbolSequence Lexicon::encode(const UserSequence& seq) const {
  SymbolSequence out;
  out.reserve(seq.size());
  for (const auto& e : seq.events()) {
    auto s = find(Descriptor::of(e, mode_));
    if (!s) throw Error(ErrorKind::InvalidInput, "event not in lexicon: " + Descriptor::of(e, mode_).label());
    out.push_back(*s);
  }
  return out;
}

const Descriptor& Lexicon::decode(Symbol s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= reverse_.size())
    throw Error(ErrorKind::InvalidInput, "symbol out of range: " + std::to_string(s));
  return reverse_[static_cast<std::size_t>(s)];
}

Encoded encode(const UserSequence& seq, LexiconMode mode) {
  if (seq.empty()) throw Error(ErrorKind::EmptyInput, "cannot encode an empty sequence");
  Encoded out{{}, Lexicon(mode)};
  out.symbols.reserve(seq.size());
  for (const auto& e : seq.events()) out.symbols.push_back(out.lexicon.intern(e));
  return out;
}

}  // namespace dtseq
