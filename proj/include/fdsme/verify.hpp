#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdsme/statistics.hpp"

namespace fdsme {

/// Built-in verification suites. Sizes are chosen to finish in seconds to
/// a few minutes on one core; every suite returns one CheckResult per claim.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed = 1,
                                   unsigned threads = 1);

// Observed order log2(e_k / e_{k+1}) between consecutive refinements.
std::vector<double> observed_orders(const std::vector<double>& errors);

std::vector<CheckResult> suite_identities();
std::vector<CheckResult> suite_conservation(std::uint64_t seed);
std::vector<CheckResult> suite_stationary(std::uint64_t seed, unsigned threads);
std::vector<CheckResult> suite_sbm(std::uint64_t seed, unsigned threads, std::size_t m = 2000);
std::vector<CheckResult> suite_bound();
std::vector<CheckResult> suite_transforms();

}  // namespace fdsme
