#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bglue/cli/config.hpp"

namespace bglue::cli {

/// Stable process exit codes.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

/// Seam checks, flatness fits and the homomorphism check named by the config.
/// Writes verify_report.json; kExitPass iff every verdict passes.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

/// Orbits of the configured word from every seed: orbits.csv, orbits.svg and
/// orbit_summary.json. Prints omega estimates (single piece), the seam-straddle
/// defect (glued scenes) and density summaries (doubly periodic charts).
int cmd_orbit(const RunConfig& cfg, std::ostream& out);

/// Word lengths of Z^m: distortion.csv and distortion.json.
int cmd_distortion(const RunConfig& cfg, std::ostream& out);

/// The built scene and effective config as scene.json.
int cmd_scene_dump(const RunConfig& cfg, std::ostream& out);

/// Full command line: subcommand dispatch, flag handling, exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bglue::cli
