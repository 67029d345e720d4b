#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obroute/io.hpp"

namespace obroute {

struct CheckResult {
  std::string name;
  bool pass = true;
  Json measured = Json::object();
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool pass() const;
};

// Suites: "lemmas" (everything), "splittable", "sampler", "packets",
// "unsplittable". trials <= 0 keeps each check's default sample size.
// Throws InputError for an unknown suite.
VerifyReport run_suite(const std::string& suite, std::uint64_t seed, int trials = 0);

std::vector<std::string> suite_names();

Json verify_to_json(const VerifyReport& r);

}  // namespace obroute
