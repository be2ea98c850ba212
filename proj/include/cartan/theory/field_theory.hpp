#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cartan/defects/canonical.hpp"
#include "cartan/forms/form_field.hpp"
#include "cartan/forms/integration.hpp"

namespace cartan::theory {

using forms::Coframe;
using forms::ConnectionField;
using forms::FormField;
using forms::GridSpec;
using forms::Point;

struct Couplings {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double kappaU1 = 1.0;
    double lambdaU1 = 1.0;

    /// Γ = γ/α, the curvature coupling of the coframe equation.
    double Gamma() const { return gamma / alpha; }
    /// κ = γ/(2β), the torsion coupling of the connection equation.
    double kappaEL() const { return gamma / (2.0 * beta); }
    void validate() const;
};

nlohmann::json toJson(const Couplings& c);

/// Cells used for residual norms: at least `margin` from every x and y face,
/// outside every excluded tube around a line parallel to z.
struct InteriorRegion {
    double margin = 0.0;
    struct Tube {
        std::array<double, 2> axis;
        double radius;
    };
    std::vector<Tube> excluded;

    bool contains(const GridSpec& grid, const Point& p) const;
    /// Margin of two coarse cells and a tube of coreFactor·ε around each core.
    static InteriorRegion around(const defects::DefectConfiguration& config, double margin, double coreFactor = 5.0);
};

struct Residual {
    std::string term;
    FormField field;
    double l2Norm = 0.0;
    double maxNorm = 0.0;
    bool interiorOnly = false;
    /// The term cannot be formed at this dimension and is zero by degree counting.
    bool structurallyZero = false;
};

/// Norms over the region (all cells when absent); l2 is weighted by cell volume.
Residual makeResidual(std::string term, FormField field, const std::optional<InteriorRegion>& region);

struct ActionDensity {
    FormField torsionTerm;    ///< α T^a∧*T_a
    FormField curvatureTerm;  ///< β R^a_b∧*R^b_a
    FormField mixedTerm;      ///< γ e^a∧R_ab∧e^b, zero when dim != 4
    FormField total;
    double torsionAction = 0.0;
    double curvatureAction = 0.0;
    double mixedAction = 0.0;
    double action = 0.0;
    bool mixedStructurallyZero = false;
};

ActionDensity actionDensity(const Coframe& e, const ConnectionField& omega, const Couplings& c);

/// D(*T_a) + Γ R_ab∧e^b. Needs dim 4.
Residual elCoframeResidual(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                           const std::optional<InteriorRegion>& region = std::nullopt);
/// D(*R_ab) + κ(e^a∧*T_b - e^b∧*T_a). Needs dim 4.
Residual elConnectionResidual(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                              const std::optional<InteriorRegion>& region = std::nullopt);

struct BianchiResiduals {
    Residual curvature;  ///< DR
    Residual torsion;    ///< DT - R∧e
};

BianchiResiduals bianchiResiduals(const Coframe& e, const ConnectionField& omega,
                                  const std::optional<InteriorRegion>& region = std::nullopt);

struct U1Sources {
    FormField J1;  ///< κ T^a∧e_a, a 3-form
    FormField J2;  ///< λ e^a∧R_ab∧e^b, a 4-form; zero in dim 3
    Residual dJ1;
    Residual dJ2;
    bool J2StructurallyZero = false;
};

U1Sources u1Sources(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                    const std::optional<InteriorRegion>& region = std::nullopt);

/// ∫_V J1: net U(1) charge sourced inside the volume.
double u1FluxBalance(const FormField& J1, const forms::Volume& volume);

/// Outcome of a two-resolution study.
struct Convergence {
    std::string term;
    double coarse = 0.0;
    double fine = 0.0;
    double ratio = 0.0;
    /// "exact" (both norms at rounding level), "second-order", or "failed".
    std::string verdict;
    bool pass = false;
};

inline constexpr double kExactTolerance = 1e-10;

Convergence convergence(std::string term, double coarse, double fine, double lo, double hi);

/// Smooth coframe and connection with every component varying along x and y;
/// residuals of the discrete Leibniz rule on it are genuinely O(h²).
std::pair<Coframe, ConnectionField> smoothProbe(const GridSpec& grid, double amplitude = 0.1);

/// 4D coframe e³ = (1+h)dz + h²dw, other legs trivial, h smooth in x and y.
/// T^a∧e_a = (h² dh - (1+h) d(h²))∧dz∧dw is closed in the continuum while
/// its discrete exterior derivative is an O(h²) nonzero residual.
Coframe closedSourceProbe(const GridSpec& grid, double amplitude = 0.3);

nlohmann::json toJson(const Residual& r, const GridSpec& grid, double coreRadius, const Couplings& c);
nlohmann::json toJson(const Convergence& c);

}  // namespace cartan::theory
