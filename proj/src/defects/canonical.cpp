#include "cartan/defects/canonical.hpp"

#include <cmath>
#include <numbers>

#include "cartan/forms/operators.hpp"

namespace cartan::defects {

using forms::ValueType;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoreMargin = 5.0;

// Offset from a core and its squared distance.
struct Local {
    double x, y, r2;
};

Local local(const Point& p, const std::array<double, 2>& core) {
    const double x = p[0] - core[0];
    const double y = p[1] - core[1];
    return {x, y, x * x + y * y};
}

// Adds s·dθ_ε into the dx, dy slots of a 1-form coefficient array.
void addDTheta(std::span<double> out, const Local& l, double eps, CoreProfile profile, double s) {
    const double f = s * angularFactor(l.r2, eps, profile);
    out[0] += -l.y * f;
    out[1] += l.x * f;
}

// d(dθ_ε) = ddTheta(r²) dx∧dy
double ddTheta(double r2, double eps, CoreProfile profile) {
    if (profile == CoreProfile::Gaussian) return kTwoPi * coreDensity(r2, eps);
    const double q = r2 + eps * eps;
    return 2.0 * eps * eps / (q * q);
}

// d f / d(r²) of the angular factor
double angularSlope(double r2, double eps, CoreProfile profile) {
    const double s2 = eps * eps;
    if (profile == CoreProfile::Lorentzian) {
        const double q = r2 + s2;
        return -1.0 / (q * q);
    }
    const double u = r2 / (2.0 * s2);
    const double scale = 1.0 / (4.0 * s2 * s2);
    if (u < 1e-2) return scale * (-0.5 + u * (1.0 / 3.0 + u * (-1.0 / 8.0 + u * (1.0 / 30.0 - u / 144.0))));
    const double e = std::exp(-u);
    return (e * u + std::expm1(-u)) / (r2 * r2);
}

// Coefficient A^a_b of basis component c in an antisymmetric-matrix array.
double matrixCoeff(std::span<const double> m, int a, int b, int comps, int c) {
    if (a == b) return 0.0;
    return a > b ? m[forms::antisymSlot(a, b) * comps + c] : -m[forms::antisymSlot(b, a) * comps + c];
}


}  // namespace

std::string toString(DefectKind k) {
    switch (k) {
        case DefectKind::Screw: return "screw";
        case DefectKind::Edge: return "edge";
        case DefectKind::Wedge: return "wedge";
    }
    return "?";
}

std::string toString(CoreProfile p) { return p == CoreProfile::Gaussian ? "gaussian" : "lorentzian"; }

std::string toString(EdgeCoframe f) { return f == EdgeCoframe::Holonomy ? "holonomy" : "verbatim"; }

Vec3 DefectSpec::burgers() const {
    switch (kind) {
        case DefectKind::Screw: return {0.0, 0.0, charge};
        case DefectKind::Edge: return {charge * burgersDirection[0], charge * burgersDirection[1], 0.0};
        case DefectKind::Wedge: return {0.0, 0.0, 0.0};
    }
    return {};
}

Vec3 DefectSpec::frank() const { return kind == DefectKind::Wedge ? Vec3{0.0, 0.0, charge} : Vec3{}; }

void DefectSpec::validate() const {
    if (!(coreRadius > 0.0) || !std::isfinite(coreRadius)) throw ValueError("core radius must be positive");
    if (!std::isfinite(charge)) throw ValueError("defect charge must be finite");
    if (!std::isfinite(axisPoint[0]) || !std::isfinite(axisPoint[1])) throw ValueError("axis point must be finite");
    if (kind == DefectKind::Edge) {
        const double n = std::hypot(burgersDirection[0], burgersDirection[1]);
        if (std::abs(n - 1.0) > 1e-12) throw ValueError("edge Burgers direction must be a unit vector");
        if (edgeForm == EdgeCoframe::Verbatim && std::abs(burgersDirection[1]) > 1e-12) {
            throw ValueError("verbatim edge coframe needs the Burgers vector along x");
        }
    }
}

void DefectConfiguration::validate() const {
    if (grid.dim() < 3) throw ValueError("defect configurations need a grid of dimension 3 or 4");
    for (const auto& d : distortion) {
        for (double v : d) {
            if (!std::isfinite(v)) throw ValueError("background distortion must be finite");
        }
    }
    for (std::size_t i = 0; i < defects.size(); ++i) {
        const auto& d = defects[i];
        d.validate();
        const double margin = kCoreMargin * d.coreRadius;
        for (int a = 0; a < 2; ++a) {
            if (d.axisPoint[a] - grid.lower(a) < margin || grid.upper(a) - d.axisPoint[a] < margin) {
                throw DomainError("defect " + std::to_string(i) + " core lies within 5 core radii of the grid boundary");
            }
        }
    }
}

DefectConfiguration DefectConfiguration::embedded4D(std::pair<double, double> extent, int resolution) const {
    if (grid.dim() != 3) throw ValueError("only 3D configurations can be embedded in 4D");
    auto ext = grid.extents();
    auto res = grid.resolutions();
    ext.push_back(extent);
    res.push_back(resolution);
    return {defects, GridSpec(4, ext, res), distortion};
}

double coreDensity(double r2, double eps) {
    const double s2 = eps * eps;
    return std::exp(-r2 / (2.0 * s2)) / (kTwoPi * s2);
}

double angularFactor(double r2, double eps, CoreProfile profile) {
    const double s2 = eps * eps;
    if (profile == CoreProfile::Lorentzian) return 1.0 / (r2 + s2);
    const double u = r2 / (2.0 * s2);
    // (1 - e^{-u})/r², with its r -> 0 limit 1/(2ε²)
    if (u < 1e-300) return 1.0 / (2.0 * s2);
    return -std::expm1(-u) / r2;
}

FormEvaluator dThetaEvaluator(int dim, std::array<double, 2> core, double eps, CoreProfile profile) {
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 1;
    ev.eval = [core, eps, profile](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        addDTheta(out, local(p, core), eps, profile, 1.0);
    };
    return ev;
}

FormEvaluator ddThetaEvaluator(int dim, std::array<double, 2> core, double eps, CoreProfile profile) {
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 2;
    ev.eval = [core, eps, profile](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        const Local l = local(p, core);
        out[0] = ddTheta(l.r2, eps, profile);
    };
    return ev;
}

FormEvaluator coframeEvaluator(const DefectConfiguration& config) {
    config.validate();
    const int dim = config.grid.dim();
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 1;
    ev.valueType = ValueType::vector(dim);
    ev.domain = config.grid;
    ev.eval = [config, dim](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        // out[a * dim + mu] = e^a_mu
        for (int a = 0; a < dim; ++a) out[a * dim + a] = 1.0;
        for (int a = 0; a < 3; ++a) {
            for (int mu = 0; mu < 3; ++mu) out[a * dim + mu] += config.distortion[a][mu];
        }
        for (const auto& d : config.defects) {
            if (d.kind == DefectKind::Wedge) continue;
            const Local l = local(p, d.axisPoint);
            if (d.kind == DefectKind::Edge && d.edgeForm == EdgeCoframe::Verbatim) {
                const double s = d.charge * d.burgersDirection[0] / kTwoPi;
                const double inv = angularFactor(l.r2, d.coreRadius, d.profile);
                addDTheta(out.subspan(0, dim), l, d.coreRadius, d.profile, s * l.y * inv);
                addDTheta(out.subspan(dim, dim), l, d.coreRadius, d.profile, -s * l.x * inv);
                continue;
            }
            const Vec3 b = d.burgers();
            for (int a = 0; a < 3; ++a) {
                if (b[a] != 0.0) addDTheta(out.subspan(a * dim, dim), l, d.coreRadius, d.profile, b[a] / kTwoPi);
            }
        }
    };
    return ev;
}

FormEvaluator connectionEvaluator(const DefectConfiguration& config) {
    config.validate();
    const int dim = config.grid.dim();
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 1;
    ev.valueType = ValueType::antisym(dim);
    ev.domain = config.grid;
    ev.eval = [config](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& d : config.defects) {
            if (d.kind != DefectKind::Wedge) continue;
            // slot (1,0) holds ω²₁ = -Θ dθ_ε
            addDTheta(out, local(p, d.axisPoint), d.coreRadius, d.profile, -d.charge);
        }
    };
    return ev;
}


FormEvaluator torsionEvaluator(const DefectConfiguration& config) {
    const auto e = coframeEvaluator(config);
    const auto w = connectionEvaluator(config);
    const int dim = config.grid.dim();
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 2;
    ev.valueType = ValueType::vector(dim);
    ev.domain = config.grid;
    const int comps2 = forms::binomial(dim, 2);
    const int slots = dim * (dim - 1) / 2;
    ev.eval = [config, e, w, dim, comps2, slots](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& d : config.defects) {
            if (d.kind == DefectKind::Wedge) continue;
            const Local l = local(p, d.axisPoint);
            if (d.kind == DefectKind::Edge && d.edgeForm == EdgeCoframe::Verbatim) {
                const double s = d.charge * d.burgersDirection[0] / kTwoPi;
                const double f = angularFactor(l.r2, d.coreRadius, d.profile);
                const double fp = angularSlope(l.r2, d.coreRadius, d.profile);
                const double core = 3.0 * f * f + 4.0 * l.r2 * f * fp;
                out[0] += s * l.y * core;
                out[comps2] -= s * l.x * core;
                continue;
            }
            const Vec3 b = d.burgers();
            const double dd = ddTheta(l.r2, d.coreRadius, d.profile) / kTwoPi;
            for (int a = 0; a < 3; ++a) out[a * comps2] += b[a] * dd;
        }
        // ω^a_b ∧ e^b
        std::vector<double> ec(static_cast<std::size_t>(dim) * dim), wc(static_cast<std::size_t>(slots) * dim);
        e.eval(p, ec);
        w.eval(p, wc);
        const auto& basis = forms::basisOf(dim, 2);
        for (int a = 0; a < dim; ++a) {
            for (int b = 0; b < dim; ++b) {
                for (int c = 0; c < comps2; ++c) {
                    const int mu = basis[c][0], nu = basis[c][1];
                    out[a * comps2 + c] += matrixCoeff(wc, a, b, dim, mu) * ec[b * dim + nu] -
                                           matrixCoeff(wc, a, b, dim, nu) * ec[b * dim + mu];
                }
            }
        }
    };
    return ev;
}

FormEvaluator curvatureEvaluator(const DefectConfiguration& config) {
    const auto w = connectionEvaluator(config);
    const int dim = config.grid.dim();
    FormEvaluator ev;
    ev.dim = dim;
    ev.degree = 2;
    ev.valueType = ValueType::antisym(dim);
    ev.domain = config.grid;
    const int comps2 = forms::binomial(dim, 2);
    const int slots = dim * (dim - 1) / 2;
    ev.eval = [config, w, dim, comps2, slots](const Point& p, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& d : config.defects) {
            if (d.kind != DefectKind::Wedge) continue;
            const Local l = local(p, d.axisPoint);
            out[0] -= d.charge * ddTheta(l.r2, d.coreRadius, d.profile);
        }
        // ω^a_c ∧ ω^c_b
        std::vector<double> wc(static_cast<std::size_t>(slots) * dim);
        w.eval(p, wc);
        const auto& basis = forms::basisOf(dim, 2);
        for (int a = 0; a < dim; ++a) {
            for (int b = 0; b < a; ++b) {
                for (int c = 0; c < comps2; ++c) {
                    const int mu = basis[c][0], nu = basis[c][1];
                    double sum = 0.0;
                    for (int k = 0; k < dim; ++k) {
                        sum += matrixCoeff(wc, a, k, dim, mu) * matrixCoeff(wc, k, b, dim, nu) -
                               matrixCoeff(wc, a, k, dim, nu) * matrixCoeff(wc, k, b, dim, mu);
                    }
                    out[forms::antisymSlot(a, b) * comps2 + c] += sum;
                }
            }
        }
    };
    return ev;
}

Coframe buildCoframe(const DefectConfiguration& config) {
    const auto ev = coframeEvaluator(config);
    return Coframe(FormField::sample(config.grid, 1, ev.valueType, ev.eval));
}

ConnectionField buildConnection(const DefectConfiguration& config) {
    const auto ev = connectionEvaluator(config);
    return ConnectionField(FormField::sample(config.grid, 1, ev.valueType, ev.eval));
}

FormField coframePerturbation(const Coframe& e) { return e.form() - Coframe::identity(e.grid()).form(); }

FormField torsion(const Coframe& e, const ConnectionField& omega) {
    if (e.grid() != omega.grid()) throw GridMismatchError("torsion: coframe and connection on different grids");
    return forms::covariantDerivative(e.form(), omega);
}

FormField curvature(const ConnectionField& omega) {
    const FormField& w = omega.form();
    // [ω,ω] = 2 ω∧ω for a 1-form
    return forms::exteriorDerivative(w) + 0.5 * forms::wedge(w, w, forms::FramePairing::Commutator);
}

namespace {

void requireVectorTwoForm(int degree, ValueType vt) {
    if (degree != 2 || vt.kind != forms::ValueKind::FrameVector) {
        throw DegreeError("Burgers extraction needs a frame-vector valued 2-form");
    }
}

void requireMatrixTwoForm(int degree, ValueType vt) {
    if (degree != 2 || vt.kind != forms::ValueKind::FrameMatrixAntisym) {
        throw DegreeError("Frank extraction needs an antisymmetric-matrix valued 2-form");
    }
}

FrankCharge assembleFrank(const std::vector<double>& slots, int n) {
    FrankCharge f;
    f.matrix.assign(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < a; ++b) {
            f.matrix[a][b] = slots[forms::antisymSlot(a, b)];
            f.matrix[b][a] = -f.matrix[a][b];
        }
    }
    if (n >= 3) f.axial = {f.matrix[1][2], f.matrix[2][0], f.matrix[0][1]};
    return f;
}

}  // namespace

std::vector<double> burgersVector(const FormField& T, const forms::Surface& surface) {
    requireVectorTwoForm(T.degree(), T.valueType());
    return forms::integrateOverSurface(T, surface);
}

std::vector<double> burgersVector(const FormEvaluator& T, const forms::Surface& surface) {
    requireVectorTwoForm(T.degree, T.valueType);
    return forms::integrateOverSurface(T, surface);
}

FrankCharge frankVector(const FormField& R, const forms::Surface& surface) {
    requireMatrixTwoForm(R.degree(), R.valueType());
    return assembleFrank(forms::integrateOverSurface(R, surface), R.valueType().frameDim);
}

FrankCharge frankVector(const FormEvaluator& R, const forms::Surface& surface) {
    requireMatrixTwoForm(R.degree, R.valueType);
    return assembleFrank(forms::integrateOverSurface(R, surface), R.valueType.frameDim);
}

}  // namespace cartan::defects
