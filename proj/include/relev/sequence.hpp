#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relev/distribution.hpp"

namespace relev {

enum class Extension { RepeatLast, Cycle, Finite };

/// The laws {F_n; n >= 1} driving an EPB or replacement process. Indices are
/// 1-based to match arrival numbering.
class DistributionSequence {
 public:
  DistributionSequence(std::vector<LifetimeDistribution> entries,
                       Extension extension = Extension::RepeatLast);

  static DistributionSequence iid(const LifetimeDistribution& d);
  /// Generalized Yule entries: F_k has hazard (k + offset) r(t), r the hazard
  /// of `base`.
  static DistributionSequence yule(const LifetimeDistribution& base, double offset = 1.0);

  /// F_k for k >= 1. Throws TruncationError past the end of a Finite sequence.
  LifetimeDistribution nth(std::size_t k) const;

  const std::vector<LifetimeDistribution>& entries() const { return entries_; }
  Extension extension() const { return extension_; }
  std::optional<double> yule_offset() const { return yule_offset_; }
  /// Number of explicitly listed entries.
  std::size_t size() const { return entries_.size(); }
  bool is_finite() const { return extension_ == Extension::Finite; }

  std::string describe() const;

 private:
  std::vector<LifetimeDistribution> entries_;
  Extension extension_;
  std::optional<double> yule_offset_;
};

/// JSON sequence config: an array of mini-grammar strings, optionally with one
/// `{"extend": "repeat_last" | "cycle" | "finite"}` element. The object form
/// `{"entries": [...], "extend": ...}` is accepted as well.
DistributionSequence parse_sequence_json(std::string_view json, NumericOptions options = {});

}  // namespace relev
