#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cartan/dynamics/dynamics.hpp"
#include "cartan/forms/form_field.hpp"
#include "cartan/forms/integration.hpp"

namespace cartan::network {

using dynamics::DislocationLine;
using dynamics::Vec3;
using forms::Coframe;
using forms::FormField;

/// Endpoint id for edges leaving the domain.
inline const std::string kBoundary = "Boundary";

struct Junction {
    std::string id;
    Vec3 position{};
    /// Side of the enclosing cube; defaults to 10 core radii.
    std::optional<double> volumeSide;
};

/// Oriented edge from -> to; its Burgers vector counts as incoming at `to`.
struct DislocationEdge {
    std::string from;
    std::string to;
    Vec3 burgers{};
};

struct DisclinationEdge {
    std::string from;
    std::string to;
    Vec3 frank{};
};

struct DefectNetwork {
    std::vector<Junction> junctions;
    std::vector<DislocationEdge> dislocationEdges;
    std::vector<DisclinationEdge> disclinationEdges;
    double coreRadius = 0.05;
};

nlohmann::json toJson(const DefectNetwork& n);

/// Open lines run Boundary -> Boundary; a closed line is a self-loop on a
/// junction at its first node. Disclinations are straight and span the domain.
DefectNetwork networkFromLines(const std::vector<DislocationLine>& lines,
                               const dynamics::DisclinationField& disclinations, double coreRadius);

/// Δb^a = -∫_V R^a_b∧e^b. Frame components beyond the third are dropped.
Vec3 curvatureScreenedFlux(const FormField& R, const Coframe& e, const forms::Volume& volume);

struct ReconnectionEvent {
    int step = 0;
    std::vector<std::string> lineIds;
    std::vector<Vec3> incoming;
    /// Empty on annihilation.
    std::vector<Vec3> outgoing;
    Vec3 deltaB{};
    Vec3 contact{};
    std::string enclosedVolume;
    bool annihilation = false;
};

nlohmann::json toJson(const ReconnectionEvent& ev);

inline constexpr double kAnnihilationTolerance = 1e-12;

/// b_f = b1 + b2 + Δb.
Vec3 reconnect(const Vec3& b1, const Vec3& b2, const Vec3& deltaB);
ReconnectionEvent reconnectEvent(const Vec3& b1, const Vec3& b2, const Vec3& deltaB, std::string volume = "",
                                 int step = 0);

struct Violation {
    enum class Kind { Balance, Structural };
    Kind kind = Kind::Balance;
    std::string junction;
    Vec3 imbalance{};
    double magnitude = 0.0;
    std::string message;
};

inline constexpr double kJunctionTolerance = 1e-6;

/// Per junction: Σ b_in - Σ b_out - ∫_V R∧e over its cube. Imbalances above
/// 1e-6 and dangling disclination endpoints are reported.
std::vector<Violation> checkJunctionBalance(const DefectNetwork& n, const FormField& R, const Coframe& e);
/// Same with no curvature anywhere.
std::vector<Violation> checkJunctionBalance(const DefectNetwork& n);
/// Disclination edges ending at an unknown junction or at a junction with no
/// other disclination edge.
std::vector<Violation> structuralViolations(const DefectNetwork& n);

/// Running tally Σ_lines b - boundary splits + Σ_events(-Δb); constant in time.
struct ChargeLedger {
    Vec3 initial{};
    Vec3 screened{};
    /// b counted again for every extra piece a clipped line splits into.
    Vec3 boundary{};

    static ChargeLedger start(const std::vector<DislocationLine>& lines);
    void record(const ReconnectionEvent& ev);
    void recordClip(const Vec3& burgers, int pieces);
    Vec3 total(const std::vector<DislocationLine>& lines) const;
    double drift(const std::vector<DislocationLine>& lines) const;
};

nlohmann::json toJson(const ChargeLedger& ledger, const std::vector<DislocationLine>& lines);

struct ScreeningFields {
    const FormField* R = nullptr;
    const Coframe* e = nullptr;
};

/// Merges any two nodes of different lines closer than threshold, in
/// (line id, node index) order, until no pair is left. Δb comes from the cube
/// of side 2·threshold at the contact, trimmed to the grid; zero without fields.
std::vector<ReconnectionEvent> detectAndReconnect(std::vector<DislocationLine>& lines, double threshold,
                                                  const ScreeningFields& fields = {}, int step = 0);

nlohmann::json snapshot(const std::vector<DislocationLine>& lines, const DefectNetwork& network,
                        const ChargeLedger& ledger, int step);

}  // namespace cartan::network
