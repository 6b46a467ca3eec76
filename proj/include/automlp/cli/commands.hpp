#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "automlp/cli/run_config.hpp"

namespace automlp::cli {

inline const std::vector<std::string> kCommands = {"ingest", "synth", "search", "train",
                                                   "eval",   "sweep", "ablate", "bench"};

// Runs one command against a resolved configuration. Each command writes its
// resolved configuration as "<command>_config.txt" in the output directory
// before doing anything else. Summary records go to `out`.
void run_command(const std::string& command, const RunConfig& rc, std::ostream& out);

// Full command line handling: parses `args` (without the program name),
// dispatches, and maps errors onto exit codes with a message on `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace automlp::cli
