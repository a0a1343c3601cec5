// Copyright 2026 The nlhomog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through nlhomog.h.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nlhomog/nlhomog.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
};

int exit_code(nlh_status s) {
  if (s == NLH_OK) return 0;
  if (s == NLH_HYPOTHESIS_FAILED) return 2;
  return 1;
}

int run(const std::string& command, const Options& opt) {
  std::ifstream in(opt.config, std::ios::binary);
  if (!in) {
    std::cerr << "nlhomog: cannot read config " << opt.config << "\n";
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();

  nlh_set_threads(opt.threads);
  char* summary = nullptr;
  const nlh_status s = nlh_run(command.c_str(), text.str().c_str(),
                               opt.out.empty() ? nullptr : opt.out.c_str(), opt.seed, &summary);
  if (summary) {
    std::cout << summary << "\n";
    nlh_string_free(summary);
  }
  if (s != NLH_OK && s != NLH_HYPOTHESIS_FAILED)
    std::cerr << "nlhomog " << command << ": " << nlh_last_error() << "\n";
  else if (s == NLH_HYPOTHESIS_FAILED)
    std::cerr << "nlhomog " << command << ": hypothesis check failed\n";
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal homogenization lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nlh_version()));

  Options opt;
  std::string chosen;
  const char* commands[][2] = {
      {"check-kernel", "Verify the jump-kernel hypotheses"},
      {"effective", "Effective coefficient and angular density k"},
      {"solve", "Solve the resolvent problem for one eps or the limit"},
      {"converge", "eps sweep against the homogenized solution"},
      {"diagnose", "Region split, cube check, translation and exterior diagnostics"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opt.seed, "Seed for random test vectors");
    sub->callback([&chosen, name = std::string(c[0])] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return run(chosen, opt);
}
