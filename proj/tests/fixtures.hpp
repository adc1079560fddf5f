#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtseq/model.hpp"
#include "dtseq/timeutil.hpp"

namespace fx {

inline dtseq::Instant at(const char* iso) { return *dtseq::parse_instant(iso); }

inline dtseq::Event ev(const std::string& user, const char* iso, const char* platform, const char* activity,
                       std::optional<std::string> content = std::nullopt) {
  return {user, at(iso), dtseq::Platform::parse(platform), activity, std::move(content)};
}

inline dtseq::Event ev_s(const std::string& user, std::int64_t epoch, const char* platform, const char* activity) {
  return {user, dtseq::from_epoch(epoch), dtseq::Platform::parse(platform), activity, std::nullopt};
}

inline dtseq::Session sess(const std::string& user, const char* platform, const char* activity, std::int64_t start,
                           std::int64_t end, std::int64_t count = 1) {
  dtseq::Descriptor d{dtseq::Platform::parse(platform), activity, std::nullopt};
  return {user, d, dtseq::from_epoch(start), dtseq::from_epoch(end), count};
}

}  // namespace fx
