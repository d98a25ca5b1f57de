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

// rstm: run experiments, verification suites, sweeps and reports.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or config error,
// 3 runtime error.

#include <rstm/verify.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> v;
  for (const auto& item : rstm::detail::split_csv(list)) {
    if (item.empty()) continue;
    try {
      v.push_back(rstm::detail::parse_double(item));
    } catch (const std::exception&) {
      throw rstm::ConfigError("--values: '" + item + "' is not a number");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized similar triangles method: experiments and verification"};
  app.require_subcommand(1);

  rstm::RunOptions opts;
  opts.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out_dir;
  app.add_option("--seed-offset", opts.seed_offset, "Added to every seed in the config");
  app.add_option("--workers", opts.workers, "Worker threads for seeds")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Output directory (overrides the config's output)");

  std::string config;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Config file")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(rstm::suite_names()));

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter of a config");
  sweep->add_option("config", config, "Config file")->required();
  sweep->add_option("--param", param, "Parameter to sweep")->required()->check(CLI::IsMember(rstm::sweep_parameters()));
  sweep->add_option("--values", values, "Comma-separated values")->required();

  std::vector<std::string> files;
  auto* report = app.add_subcommand("report", "Merge summary files into long-format CSV on stdout");
  report->add_option("files", files, "Summary CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;

  try {
    if (*run) {
      const auto cfg = rstm::load_config(config);
      const auto res = rstm::run_experiment(cfg, opts);
      std::cerr << "wrote " << res.traces.size() << " traces and summary.csv to " << res.out_dir.string() << '\n';
      return kOk;
    }
    if (*verify) {
      bool ok = true;
      for (const auto& c : rstm::run_suite(suite)) {
        std::cout << rstm::format_claim(c) << '\n' << std::flush;
        ok = ok && c.pass;
      }
      return ok ? kOk : kVerifyFailed;
    }
    if (*sweep) {
      const auto cfg = rstm::load_config(config);
      const auto rows = rstm::run_sweep(cfg, param, parse_values(values), opts);
      std::cerr << "swept " << param << " over " << rows.size() << " values\n";
      return kOk;
    }
    if (*report) {
      std::vector<std::filesystem::path> paths(files.begin(), files.end());
      std::cout << rstm::report(paths);
      return kOk;
    }
  } catch (const rstm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
