#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cil::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< seconds; 0 when unbounded
};

// Property and oracle checks over the sampler, learner and stream modules.
// Instance counts and tolerances are fixed; the seed only changes which
// random instances are drawn.
CheckResult check_filter_off_equivalence(std::uint64_t seed);
CheckResult check_two_approximation(std::uint64_t seed);
CheckResult check_outlier_exclusion(std::uint64_t seed);
CheckResult check_oracle_round_trip(std::uint64_t seed);
CheckResult check_gradients(std::uint64_t seed);
CheckResult check_kd_lower_bound(std::uint64_t seed);
CheckResult check_first_task_rule(std::uint64_t seed);
CheckResult check_stream_composition(std::uint64_t seed);
CheckResult check_monotone_coverage(std::uint64_t seed);

/// Every check above, in order.
std::vector<CheckResult> run_property_suite(std::uint64_t seed);

/// "PASS name (1.23 s) detail" / "FAIL ..."
std::string format(const CheckResult& r);

}  // namespace cil::checks
