#include "cartan/theory/field_theory.hpp"

#include <cmath>
#include <numbers>

#include "cartan/forms/operators.hpp"

namespace cartan::theory {

using forms::FramePairing;
using forms::ValueType;

void Couplings::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)) throw ValueError("alpha, beta and gamma must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(kappaU1) ||
        !std::isfinite(lambdaU1)) {
        throw ValueError("couplings must be finite");
    }
}

nlohmann::json toJson(const Couplings& c) {
    return {{"alpha", c.alpha},       {"beta", c.beta},         {"gamma", c.gamma}, {"kappaU1", c.kappaU1},
            {"lambdaU1", c.lambdaU1}, {"Gamma", c.Gamma()}, {"kappaEL", c.kappaEL()}};
}

bool InteriorRegion::contains(const GridSpec& grid, const Point& p) const {
    for (int a = 0; a < 2; ++a) {
        if (p[a] - grid.lower(a) < margin || grid.upper(a) - p[a] < margin) return false;
    }
    for (const auto& t : excluded) {
        if (std::hypot(p[0] - t.axis[0], p[1] - t.axis[1]) < t.radius) return false;
    }
    return true;
}

InteriorRegion InteriorRegion::around(const defects::DefectConfiguration& config, double margin, double coreFactor) {
    InteriorRegion r;
    r.margin = margin;
    for (const auto& d : config.defects) r.excluded.push_back({d.axisPoint, coreFactor * d.coreRadius});
    return r;
}

Residual makeResidual(std::string term, FormField field, const std::optional<InteriorRegion>& region) {
    const GridSpec& g = field.grid();
    const std::size_t n = field.pointCount();
    const int blocks = field.slotCount() * field.componentCount();
    const auto data = field.data();
    double sum = 0.0, peak = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (region && !region->contains(g, g.point(p))) continue;
        for (int b = 0; b < blocks; ++b) {
            const double v = data[static_cast<std::size_t>(b) * n + p];
            sum += v * v;
            peak = std::max(peak, std::abs(v));
        }
    }
    const double l2 = std::sqrt(sum * g.cellVolume());
    Residual r{std::move(term), std::move(field)};
    r.l2Norm = l2;
    r.maxNorm = peak;
    r.interiorOnly = region.has_value();
    return r;
}

namespace {

void requireSameGrid(const Coframe& e, const ConnectionField& omega) {
    if (e.grid() != omega.grid()) throw GridMismatchError("coframe and connection live on different grids");
}

void requireDim4(const GridSpec& g, const char* what) {
    if (g.dim() != 4) {
        throw DegreeError(std::string(what) + " needs dimension 4 (its terms are 3-forms only there); got dimension " +
                          std::to_string(g.dim()));
    }
}

FormField torsionOf(const Coframe& e, const ConnectionField& omega) {
    return forms::covariantDerivative(e.form(), omega);
}

FormField curvatureOf(const ConnectionField& omega) {
    return forms::exteriorDerivative(omega.form()) +
           0.5 * forms::wedge(omega.form(), omega.form(), FramePairing::Commutator);
}

// e^a ∧ R_ab ∧ e^b, a scalar 4-form
FormField mixedForm(const Coframe& e, const FormField& R) {
    const FormField Re = forms::wedge(R, e.form(), FramePairing::MatrixVector);
    return forms::wedge(e.form(), Re, FramePairing::ContractVector);
}

}  // namespace

ActionDensity actionDensity(const Coframe& e, const ConnectionField& omega, const Couplings& c) {
    requireSameGrid(e, omega);
    const GridSpec& g = e.grid();
    const FormField T = torsionOf(e, omega);
    const FormField R = curvatureOf(omega);
    FormField tt = c.alpha * forms::wedge(T, forms::hodgeStar(T), FramePairing::ContractVector);
    FormField rr = c.beta * forms::wedge(R, forms::hodgeStar(R), FramePairing::Trace);
    const bool mixedZero = g.dim() != 4;
    FormField mixed = mixedZero ? FormField(g, g.dim(), ValueType::scalar()) : c.gamma * mixedForm(e, R);
    FormField total = tt + rr + mixed;
    ActionDensity a{tt, rr, mixed, total};
    a.torsionAction = forms::integrateTopForm(tt)[0];
    a.curvatureAction = forms::integrateTopForm(rr)[0];
    a.mixedAction = forms::integrateTopForm(mixed)[0];
    a.action = forms::integrateTopForm(total)[0];
    a.mixedStructurallyZero = mixedZero;
    return a;
}

Residual elCoframeResidual(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                           const std::optional<InteriorRegion>& region) {
    requireSameGrid(e, omega);
    requireDim4(e.grid(), "coframe field equation");
    const FormField T = torsionOf(e, omega);
    const FormField R = curvatureOf(omega);
    FormField res = forms::covariantDerivative(forms::hodgeStar(T), omega) +
                    c.Gamma() * forms::wedge(R, e.form(), FramePairing::MatrixVector);
    return makeResidual("el_coframe", std::move(res), region);
}

Residual elConnectionResidual(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                              const std::optional<InteriorRegion>& region) {
    requireSameGrid(e, omega);
    requireDim4(e.grid(), "connection field equation");
    const FormField T = torsionOf(e, omega);
    const FormField R = curvatureOf(omega);
    FormField res = forms::covariantDerivative(forms::hodgeStar(R), omega) +
                    c.kappaEL() * forms::wedge(e.form(), forms::hodgeStar(T), FramePairing::AntisymOuter);
    return makeResidual("el_connection", std::move(res), region);
}

BianchiResiduals bianchiResiduals(const Coframe& e, const ConnectionField& omega,
                                  const std::optional<InteriorRegion>& region) {
    requireSameGrid(e, omega);
    const FormField T = torsionOf(e, omega);
    const FormField R = curvatureOf(omega);
    FormField dr = forms::covariantDerivative(R, omega);
    FormField dt = forms::covariantDerivative(T, omega) - forms::wedge(R, e.form(), FramePairing::MatrixVector);
    return {makeResidual("bianchi_DR", std::move(dr), region),
            makeResidual("bianchi_DT_minus_Re", std::move(dt), region)};
}

U1Sources u1Sources(const Coframe& e, const ConnectionField& omega, const Couplings& c,
                    const std::optional<InteriorRegion>& region) {
    requireSameGrid(e, omega);
    const GridSpec& g = e.grid();
    if (g.dim() < 3) throw DegreeError("U(1) sources need dimension 3 or more");
    const FormField T = torsionOf(e, omega);
    FormField J1 = c.kappaU1 * forms::wedge(T, e.form(), FramePairing::ContractVector);
    const bool j2Zero = g.dim() < 4;
    FormField J2 = j2Zero ? FormField(g, g.dim(), ValueType::scalar()) : c.lambdaU1 * mixedForm(e, curvatureOf(omega));

    // d of a top-degree form is not formed; it vanishes by degree counting
    auto closedness = [&](const char* name, const FormField& J) {
        if (J.degree() >= g.dim()) {
            Residual r = makeResidual(name, FormField(g, g.dim(), ValueType::scalar()), region);
            r.structurallyZero = true;
            return r;
        }
        return makeResidual(name, forms::exteriorDerivative(J), region);
    };
    Residual dJ1 = closedness("dJ1", J1);
    Residual dJ2 = closedness("dJ2", J2);
    U1Sources s{std::move(J1), std::move(J2), std::move(dJ1), std::move(dJ2)};
    s.J2StructurallyZero = j2Zero;
    return s;
}

double u1FluxBalance(const FormField& J1, const forms::Volume& volume) {
    if (J1.valueType().kind != forms::ValueKind::Scalar) throw PairingError("U(1) source must be scalar valued");
    return forms::integrateOverVolume(J1, volume)[0];
}

Convergence convergence(std::string term, double coarse, double fine, double lo, double hi) {
    Convergence c;
    c.term = std::move(term);
    c.coarse = coarse;
    c.fine = fine;
    c.ratio = fine > 0.0 ? coarse / fine : (coarse > 0.0 ? INFINITY : 1.0);
    if (coarse <= kExactTolerance && fine <= kExactTolerance) {
        c.verdict = "exact";
        c.pass = true;
    } else if (c.ratio >= lo && c.ratio <= hi) {
        c.verdict = "second-order";
        c.pass = true;
    } else {
        c.verdict = "failed";
    }
    return c;
}

std::pair<Coframe, ConnectionField> smoothProbe(const GridSpec& grid, double amplitude) {
    const int n = grid.dim();
    const double lx = grid.length(0), ly = grid.length(1);
    // distinct low-order modes per (slot, component) so no block is degenerate
    auto mode = [&](const Point& p, int k) {
        const double kx = 2.0 * std::numbers::pi * (1 + k % 2) / lx;
        const double ky = 2.0 * std::numbers::pi * (1 + (k / 2) % 2) / ly;
        return std::sin(kx * p[0] + 0.3 * k) * std::cos(ky * p[1] - 0.2 * k);
    };
    FormField e = FormField::sample(grid, 1, ValueType::vector(n), [&](const Point& p, std::span<double> out) {
        for (int a = 0; a < n; ++a) {
            for (int mu = 0; mu < n; ++mu) out[a * n + mu] = (a == mu ? 1.0 : 0.0) + amplitude * mode(p, a * n + mu);
        }
    });
    const int slots = n * (n - 1) / 2;
    FormField w = FormField::sample(grid, 1, ValueType::antisym(n), [&](const Point& p, std::span<double> out) {
        for (int s = 0; s < slots; ++s) {
            for (int mu = 0; mu < n; ++mu) out[s * n + mu] = amplitude * mode(p, 7 + s * n + mu);
        }
    });
    return {Coframe(std::move(e)), ConnectionField(std::move(w))};
}

Coframe closedSourceProbe(const GridSpec& grid, double amplitude) {
    if (grid.dim() != 4) throw ValueError("closed-source probe lives in dimension 4");
    const double kx = 2.0 * std::numbers::pi / grid.length(0);
    const double ky = 2.0 * std::numbers::pi / grid.length(1);
    FormField e = Coframe::identity(grid).form();
    const std::size_t n = grid.pointCount();
    auto ez = e.component(2, 2);
    auto ew = e.component(2, 3);
    for (std::size_t p = 0; p < n; ++p) {
        const Point x = grid.point(p);
        const double h = amplitude * std::sin(kx * x[0] + 0.4) * std::cos(ky * x[1] - 0.3);
        ez[p] = 1.0 + h;
        ew[p] = h * h;
    }
    return Coframe(std::move(e));
}

nlohmann::json toJson(const Residual& r, const GridSpec& grid, double coreRadius, const Couplings& c) {
    return {{"term", r.term},
            {"l2Norm", r.l2Norm},
            {"maxNorm", r.maxNorm},
            {"interiorOnly", r.interiorOnly},
            {"structurallyZero", r.structurallyZero},
            {"resolution", grid.resolutions()},
            {"coreRadius", coreRadius},
            {"couplings", toJson(c)}};
}

nlohmann::json toJson(const Convergence& c) {
    return {{"term", c.term},         {"coarse", c.coarse},   {"fine", c.fine},
            {"ratio", std::isfinite(c.ratio) ? nlohmann::json(c.ratio) : nlohmann::json("inf")},
            {"verdict", c.verdict},   {"pass", c.pass}};
}

}  // namespace cartan::theory
