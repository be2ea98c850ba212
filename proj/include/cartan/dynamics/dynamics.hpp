#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cartan/dynamics/vec3.hpp"
#include "cartan/forms/form_field.hpp"

namespace cartan::dynamics {

enum class ForceLaw {
    CrossProduct,          ///< F = Γ (Θ×b)×v
    DerivationConsistent,  ///< F = Γ Θ_∥ b_∥ (t̂×v)
};

std::string toString(ForceLaw law);

/// Polyline dislocation with a single Burgers vector.
struct DislocationLine {
    std::string id;
    std::vector<Vec3> nodes;
    Vec3 burgers{};
    bool closed = false;
    double mobility = 1.0;

    void validate() const;
    /// Normalized central difference of the neighbours; one-sided at open ends.
    Vec3 tangent(std::size_t i) const;
};

/// Straight disclination line parallel to z.
struct Disclination {
    std::array<double, 2> axis{0.0, 0.0};
    Vec3 frank{0.0, 0.0, 0.0};
    double coreRadius = 0.05;
};

struct DisclinationField {
    std::vector<Disclination> lines;

    void validate() const;
    /// Σ_k Θ_k·g_ε(r_k)·πε², i.e. Θ_k·exp(-r²/2ε²)/2: the Frank vector felt at p.
    Vec3 localTheta(const Vec3& p) const;
};

/// Force per unit length acting on a line: a uniform vector, or a field if set.
struct ExternalForce {
    Vec3 uniform{};
    std::function<Vec3(const Vec3&)> field;

    Vec3 at(const Vec3& p) const { return field ? field(p) : uniform; }
};

struct DynamicsParams {
    double Gamma = 1.0;
    ForceLaw law = ForceLaw::CrossProduct;
    ExternalForce externalForce;
    double timeStep = 1e-3;
    int steps = 100;
    /// Box the nodes must stay in; nodes leaving it are clipped.
    std::array<std::pair<double, double>, 3> domain{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};

    void validate() const;
};

/// Axis w with F_magnus = Γ w × v.
Vec3 magnusAxis(const Vec3& theta, const Vec3& b, const Vec3& tangent, ForceLaw law);

Vec3 magnusForce(const Vec3& theta, const Vec3& b, const Vec3& v, double Gamma, ForceLaw law,
                 const Vec3& tangent = {0.0, 0.0, 1.0});

/// Solves v = M(F_ext + Γ w×v) in closed form: with s = MΓw and u = M F_ext,
/// v = (u + s×u + (s·u)s)/(1 + |s|²).
Vec3 solveVelocity(const Vec3& fExt, const Vec3& axis, double Gamma, double mobility);

struct NodeDiagnostic {
    int step = 0;
    std::string lineId;
    int node = 0;
    Vec3 position{};
    Vec3 velocity{};
    Vec3 fExt{};
    Vec3 fMagnus{};
    double transversality = 0.0;
};

struct ClipEvent {
    int step = 0;
    std::string lineId;
    int nodesRemoved = 0;
    std::vector<std::string> survivors;
};

struct StepReport {
    std::vector<NodeDiagnostic> nodes;
    std::vector<ClipEvent> clips;
};

/// |F·v|/(‖F‖‖v‖ + tiny).
double transversality(const Vec3& f, const Vec3& v);

/// One explicit Euler step after the per-node velocity solve. Velocities are
/// evaluated at the old positions of every node before any node moves.
StepReport stepLines(std::vector<DislocationLine>& lines, const DisclinationField& disclinations,
                     const DynamicsParams& params, int step);

struct TransportResidual {
    forms::FormField rate;  ///< Δ(*T)/Δt, a frame-vector 1-form
    double peakRate = 0.0;
    double estimate = 0.0;  ///< b v_⊥ / (πε²)
    double relativeDiscrepancy = 0.0;
};

/// Rigidly translates the straight line's core by v·dt and differences the
/// grid torsion of the two snapshots. The line must be parallel to z.
TransportResidual transportResidual(const DislocationLine& line, const forms::GridSpec& grid, const Vec3& velocity,
                                    double coreRadius, double dt = 1e-3);

void writeTrajectoryHeader(std::ostream& os);
void writeTrajectoryRows(std::ostream& os, const std::vector<NodeDiagnostic>& rows);

}  // namespace cartan::dynamics
