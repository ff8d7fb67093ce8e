#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ncm {

enum class Relation { AtMost, AtLeast, Above, Below };

struct PropResult {
  std::string module;
  std::string name;
  double value = 0.0;
  Relation relation = Relation::AtMost;
  double threshold = 0.0;
  std::size_t samples = 0;
  bool pass = false;
  /// Set when the case aborted with an exception.
  std::string note;
};

/// One sampled check. A case may report several related results.
struct PropCase {
  std::string module;
  std::string name;
  std::function<std::vector<PropResult>(std::uint64_t seed, std::uint64_t stream)> run;
};

/// Every sampled invariant of the library, in a fixed order.
const std::vector<PropCase>& property_catalog();

/// Runs the catalog (or the cases whose "module/name" contains `filter`). Each case draws
/// from its own stream of `seed`, so results do not depend on thread scheduling.
std::vector<PropResult> run_properties(std::uint64_t seed, const std::string& filter = "");

/// One line per property: module, name, samples, value, relation, threshold, PASS/FAIL.
std::string format_report(const std::vector<PropResult>& results);

}  // namespace ncm
