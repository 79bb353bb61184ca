#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csflab/io.hpp"

namespace csflab {

enum class Relation { Near, AtMost, AtLeast, Below, Above, Holds };
std::string_view to_string(Relation r);

// One measured quantity of a criterion. For Near the pass rule is
// |measured - expected| <= tolerance; the one-sided relations compare
// measured with expected; Holds records a boolean (measured 1 or 0).
struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Holds;
  bool pass = false;
  bool operator==(const VerifyCheck&) const = default;
};

struct VerifyOutcome {
  int id = 0;
  std::string title;
  std::vector<VerifyCheck> checks;
  std::string error;  // module error that aborted the criterion, if any
  bool pass = false;
  bool operator==(const VerifyOutcome&) const = default;
};

struct VerifyReport {
  std::vector<VerifyOutcome> outcomes;
  bool pass = false;
  int exit_code = 1;  // 0 iff every criterion passed
  bool operator==(const VerifyReport&) const = default;
};

struct VerifyOptions {
  std::vector<int> ids;  // empty = all of 1..14
  std::uint64_t seed = 20240607;
  // Called once per finished criterion with its wall time (not part of the report,
  // which stays byte-identical across runs).
  std::function<void(const VerifyOutcome&, double seconds)> on_done;
};

constexpr int kCriterionCount = 14;
std::string criterion_title(int id);

// Throws Error(OutOfDomain) on an id outside 1..14.
VerifyOutcome run_criterion(int id, std::uint64_t seed);
// Independent criteria run through parallel_for.
VerifyReport run_verify(const VerifyOptions& options);

// "all" or a comma-separated id list such as "1,4,11".
std::vector<int> parse_suite(const std::string& suite);

json to_json(const VerifyReport& report);
VerifyReport verify_report_from_json(const json& j);

}  // namespace csflab
