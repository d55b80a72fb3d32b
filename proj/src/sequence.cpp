#include "relev/sequence.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "relev/errors.hpp"

namespace relev {

DistributionSequence::DistributionSequence(std::vector<LifetimeDistribution> entries,
                                           Extension extension)
    : entries_(std::move(entries)), extension_(extension) {
  if (entries_.empty()) throw DomainError("distribution sequence needs at least one entry");
}

DistributionSequence DistributionSequence::iid(const LifetimeDistribution& d) {
  return DistributionSequence({d}, Extension::RepeatLast);
}

DistributionSequence DistributionSequence::yule(const LifetimeDistribution& base, double offset) {
  if (!(offset > -1.0)) throw DomainError("yule multiplier offset must exceed -1");
  DistributionSequence seq({base}, Extension::RepeatLast);
  seq.yule_offset_ = offset;
  return seq;
}

LifetimeDistribution DistributionSequence::nth(std::size_t k) const {
  if (k == 0) throw DomainError("sequence indices start at 1");
  const std::size_t n = entries_.size();
  std::size_t idx = 0;
  switch (extension_) {
    case Extension::RepeatLast:
      idx = std::min(k, n) - 1;
      break;
    case Extension::Cycle:
      idx = (k - 1) % n;
      break;
    case Extension::Finite:
      if (k > n) {
        throw TruncationError("finite sequence of " + std::to_string(n) +
                              " entries has no entry " + std::to_string(k));
      }
      idx = k - 1;
      break;
  }
  if (yule_offset_) return entries_[idx].scaled_hazard(static_cast<double>(k) + *yule_offset_);
  return entries_[idx];
}

std::string DistributionSequence::describe() const {
  std::string out = "[";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ", ";
    out += entries_[i].describe();
  }
  out += "]";
  switch (extension_) {
    case Extension::RepeatLast: out += " repeat_last"; break;
    case Extension::Cycle: out += " cycle"; break;
    case Extension::Finite: out += " finite"; break;
  }
  if (yule_offset_) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " yule(offset=%g)", *yule_offset_);
    out += buf;
  }
  return out;
}

namespace {

Extension parse_extension(const nlohmann::json& value) {
  if (!value.is_string()) throw ConfigError("\"extend\" must be a string");
  const auto s = value.get<std::string>();
  if (s == "repeat_last") return Extension::RepeatLast;
  if (s == "cycle") return Extension::Cycle;
  if (s == "finite") return Extension::Finite;
  throw ConfigError("unknown extend rule '" + s + "' (expected repeat_last, cycle or finite)");
}

}  // namespace

DistributionSequence parse_sequence_json(std::string_view json, NumericOptions options) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("sequence JSON: ") + e.what());
  }

  std::vector<LifetimeDistribution> entries;
  Extension extension = Extension::RepeatLast;
  auto add_entry = [&](const nlohmann::json& item) {
    if (item.is_string()) {
      entries.push_back(parse_distribution(item.get<std::string>(), options));
    } else if (item.is_object() && item.size() == 1 && item.contains("extend")) {
      extension = parse_extension(item["extend"]);
    } else {
      throw ConfigError("sequence element " + item.dump() +
                        " is neither a distribution string nor {\"extend\": ...}");
    }
  };

  if (doc.is_array()) {
    for (const auto& item : doc) add_entry(item);
  } else if (doc.is_object() && doc.contains("entries")) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() != "entries" && it.key() != "extend") {
        throw ConfigError("unknown sequence key '" + it.key() + "' (expected entries, extend)");
      }
    }
    if (!doc["entries"].is_array()) throw ConfigError("\"entries\" must be an array");
    for (const auto& item : doc["entries"]) add_entry(item);
    if (doc.contains("extend")) extension = parse_extension(doc["extend"]);
  } else {
    throw ConfigError("sequence JSON must be an array of distribution strings");
  }
  if (entries.empty()) throw ConfigError("sequence JSON lists no distributions");
  return DistributionSequence(std::move(entries), extension);
}

}  // namespace relev
