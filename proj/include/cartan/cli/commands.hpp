#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include <nlohmann/json.hpp>

#include "cartan/cli/scenario.hpp"

namespace cartan::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kVerificationFailure = 2, kRuntimeError = 3 };

struct RunOptions {
    std::filesystem::path out = "out";
    int resolutionScale = 1;
    /// Reserved; every computation is deterministic.
    std::optional<std::uint64_t> seed;
};

/// Torsion, curvature, coframe perturbation and connection as .cfld and .csv,
/// radial profiles for edge and wedge defects, and fields.json.
void cmdFields(const Scenario& s, const RunOptions& opt);

/// Burgers and Frank charges around every core; written to charges.json.
nlohmann::json cmdCharges(const Scenario& s, const RunOptions& opt);

/// Residual and charge checks at the scenario resolution and at doubled
/// transverse resolution; written to verify.json. report["pass"] is the verdict.
nlohmann::json cmdVerify(const Scenario& s, const RunOptions& opt);

/// Runs the dynamics block: trajectory.csv, events.jsonl, ledger.csv,
/// magnus_scan.csv, network_final.json and the trajectory.json sidecar.
nlohmann::json cmdSimulate(const Scenario& s, const RunOptions& opt);

/// Warnings for grids too coarse for the cores or the quadrature.
std::vector<std::string> resolutionWarnings(const Scenario& s);

/// Full command line front end; returns the process exit code.
int runCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cartan::cli
