#pragma once

#include <array>
#include <string>
#include <vector>

#include "cartan/forms/form_field.hpp"
#include "cartan/forms/integration.hpp"

namespace cartan::defects {

using forms::Coframe;
using forms::ConnectionField;
using forms::FormEvaluator;
using forms::FormField;
using forms::GridSpec;
using forms::Point;
using Vec3 = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class DefectKind { Screw, Edge, Wedge };

/// How the singular 1/r² of dθ is smoothed inside the core.
///
/// Gaussian:   dθ_ε = (1 - exp(-r²/2ε²)) dθ, so d(dθ_ε) = 2π g_ε dx∧dy with
///             g_ε = exp(-r²/2ε²)/(2πε²) of unit mass.
/// Lorentzian: dθ_ε = (-y dx + x dy)/(r² + ε²).
enum class CoreProfile { Gaussian, Lorentzian };

/// Edge coframe variant.
///
/// Holonomy: e^a = dx^a + (b^a/2π) dθ_ε, Burgers vector in the xy-plane.
/// Verbatim: e¹ = dx + (b/2π)(y/r²) dθ, e² = dy - (b/2π)(x/r²) dθ with both
///           factors regularized; only defined for b along ±x̂.
enum class EdgeCoframe { Holonomy, Verbatim };

std::string toString(DefectKind k);
std::string toString(CoreProfile p);
std::string toString(EdgeCoframe f);

/// One straight defect line parallel to z through (axisPoint, z).
struct DefectSpec {
    DefectKind kind = DefectKind::Screw;
    std::array<double, 2> axisPoint{0.0, 0.0};
    /// Burgers magnitude for dislocations, Frank angle Θ for wedges (flux 2πΘ).
    double charge = 1.0;
    /// Unit in-plane direction of an edge Burgers vector.
    std::array<double, 2> burgersDirection{1.0, 0.0};
    double coreRadius = 0.05;
    CoreProfile profile = CoreProfile::Gaussian;
    EdgeCoframe edgeForm = EdgeCoframe::Holonomy;

    /// Burgers vector b^a (zero for wedges).
    Vec3 burgers() const;
    /// Frank axial vector (0, 0, Θ) for wedges, zero otherwise.
    Vec3 frank() const;
    void validate() const;
};

struct DefectConfiguration {
    std::vector<DefectSpec> defects;
    GridSpec grid;
    /// Uniform background distortion S: e^a gains S^a_μ dx^μ for μ < 3.
    Matrix3 distortion{};

    /// Throws ValueError for malformed specs and DomainError for cores closer
    /// than five core radii to an x or y boundary.
    void validate() const;
    /// Same defects on a grid with an extra axis of the given extent.
    DefectConfiguration embedded4D(std::pair<double, double> extent = {-0.5, 0.5}, int resolution = 4) const;
};

/// Unit-mass core density g_ε at squared distance r2.
double coreDensity(double r2, double eps);
/// Factor f with dθ_ε = f(r²)·(-y dx + x dy).
double angularFactor(double r2, double eps, CoreProfile profile);

/// dθ_ε around a core, as a scalar 1-form in the given dimension.
FormEvaluator dThetaEvaluator(int dim, std::array<double, 2> core, double eps, CoreProfile profile);
/// Exact d(dθ_ε): 2π g_ε dx∧dy (Gaussian) or 2ε²/(r²+ε²)² dx∧dy (Lorentzian).
FormEvaluator ddThetaEvaluator(int dim, std::array<double, 2> core, double eps, CoreProfile profile);

FormEvaluator coframeEvaluator(const DefectConfiguration& config);
FormEvaluator connectionEvaluator(const DefectConfiguration& config);
/// Closed-form T = de + ω∧e of the configuration, pointwise.
FormEvaluator torsionEvaluator(const DefectConfiguration& config);
/// Closed-form R = dω + ω∧ω of the configuration, pointwise.
FormEvaluator curvatureEvaluator(const DefectConfiguration& config);

/// Identity coframe plus background distortion plus every dislocation's
/// perturbation. Wedges contribute nothing.
Coframe buildCoframe(const DefectConfiguration& config);
/// Sum of wedge connections ω¹₂ = Θ dθ_ε; zero without wedges.
ConnectionField buildConnection(const DefectConfiguration& config);
/// e - identity, the part written out as the coframe perturbation.
FormField coframePerturbation(const Coframe& e);

/// T = De.
FormField torsion(const Coframe& e, const ConnectionField& omega);
/// R = dω + ω∧ω.
FormField curvature(const ConnectionField& omega);

/// Per-frame-component surface integral of a vector-valued 2-form.
std::vector<double> burgersVector(const FormField& T, const forms::Surface& surface);
std::vector<double> burgersVector(const FormEvaluator& T, const forms::Surface& surface);

struct FrankCharge {
    /// Ω^a_b, full antisymmetric matrix.
    std::vector<std::vector<double>> matrix;
    /// (Ω²₃, Ω³₁, Ω¹₂).
    Vec3 axial{};
};

FrankCharge frankVector(const FormField& R, const forms::Surface& surface);
FrankCharge frankVector(const FormEvaluator& R, const forms::Surface& surface);

}  // namespace cartan::defects
