#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cartan/defects/canonical.hpp"
#include "cartan/dynamics/dynamics.hpp"
#include "cartan/theory/field_theory.hpp"

namespace cartan::cli {

/// Malformed scenario; the message starts with the JSON path of the offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Force of fixed magnitude pointing at a z-parallel axis; replaces the
/// uniform external force when present.
struct Attractor {
    std::array<double, 2> axis{0.0, 0.0};
    double magnitude = 0.0;

    dynamics::Vec3 at(const dynamics::Vec3& p) const;
};

struct DynamicsBlock {
    dynamics::DynamicsParams params;
    std::optional<Attractor> attractor;
    std::vector<dynamics::DislocationLine> lines;
    dynamics::DisclinationField disclinations;
    bool reconnection = true;
    /// Contact distance; 2ε by default.
    double threshold = 0.1;
};

struct Scenario {
    std::string name;
    defects::DefectConfiguration config;
    theory::Couplings couplings;
    std::optional<DynamicsBlock> dynamics;
    /// Disk radius for charge extraction; chosen per defect when absent.
    std::optional<double> chargeRadius;
    std::vector<std::string> outputs;

    /// Charge disk radius for defect i: the explicit value, or the largest
    /// radius up to 1 clear of the x/y faces and of half the distance to
    /// other cores.
    double chargeRadiusFor(std::size_t i) const;
    /// Smallest core radius among defects and disclinations (0.05 if none).
    double minCoreRadius() const;
};

/// Parses and validates a scenario. Unknown keys and bad values throw
/// ConfigError. The resolution scale multiplies every grid resolution.
Scenario parseScenario(const nlohmann::json& doc, int resolutionScale = 1);
Scenario loadScenario(const std::string& path, int resolutionScale = 1);

/// Normalized scenario document; parsing it again gives the same scenario.
nlohmann::json toJson(const Scenario& s);

}  // namespace cartan::cli
