// Copyright 2026 The rstm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, each with its runtime limit.

#include <rstm/verify.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace {

struct Criterion {
  int id;
  double seconds_limit;
  std::function<rstm::Claim()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path scratch =
      std::filesystem::temp_directory_path() / ("rstm_acceptance_" + std::to_string(::getpid()));
  const std::vector<Criterion> criteria{
      {1, 1.0, [] { return rstm::check_coefficient_sandwich(); }},
      {2, 1.0, [] { return rstm::check_coefficient_consistency(); }},
      {3, 5.0, [] { return rstm::check_gamma_and_feasibility(); }},
      {4, 30.0, [] { return rstm::check_unbiasedness(); }},
      {5, 60.0, [] { return rstm::check_bias_bounds(); }},
      {6, 10.0, [] { return rstm::check_prox_regularity(); }},
      {7, 60.0, [] { return rstm::check_prox_optimality(); }},
      {8, 120.0, [] { return rstm::check_controlled_rate(); }},
      {9, 120.0, [] { return rstm::check_uncontrolled_rate(); }},
      {10, 60.0, [] { return rstm::check_acceleration(); }},
      {11, 60.0, [] { return rstm::check_derivative_free_tracking(); }},
      {12, 10.0, [&] { return rstm::check_determinism(scratch); }},
  };
  // optional filter: criterion ids on the command line
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::stoi(argv[a]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    rstm::Claim claim;
    try {
      claim = c.check();
    } catch (const std::exception& e) {
      claim.name = "exception";
      claim.detail = e.what();
    }
    const bool in_time = claim.seconds < c.seconds_limit;
    const bool pass = claim.pass && in_time;
    failed += !pass;
    std::printf("[%s] criterion %2d %s: measured %.6g bound %.6g, %.2fs (limit %.0fs)%s | %s\n", pass ? "PASS" : "FAIL",
                c.id, claim.name.c_str(), claim.measured, claim.bound, claim.seconds, c.seconds_limit,
                in_time ? "" : " TOO SLOW", claim.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
