// Copyright 2026 The nmcollide Authors
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

// nmcollide run|sweep|certify <config> [--output-dir DIR]

#include <CLI11.hpp>

#include <iostream>

#include "nmcollide/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian collision model simulator"};
  app.set_version_flag("--version", nmc::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string output_dir;
  for (const char* name : {"run", "sweep", "certify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config, "JSON configuration file")->required();
    sub->add_option("--output-dir", output_dir, "overrides output_path from the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nmc::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> dir;
  if (!output_dir.empty()) dir = output_dir;

  const nmc::RunResult result = nmc::execute_command(command, config, dir);
  if (result.error) {
    std::cerr << result.error->dump() << "\n";
  } else {
    for (const auto& path : result.outputs) std::cout << path.string() << "\n";
  }
  return result.exit_code;
}
