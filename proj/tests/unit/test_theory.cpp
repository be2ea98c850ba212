#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cartan/forms/operators.hpp"
#include "cartan/theory/field_theory.hpp"

using namespace cartan;
using namespace cartan::theory;
using cartan::defects::DefectConfiguration;
using cartan::defects::DefectKind;
using cartan::defects::DefectSpec;
using cartan::defects::curvature;
using cartan::forms::Volume;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec transverse(int n, double half = 1.5) {
    return GridSpec(3, {{-half, half}, {-half, half}, {-0.5, 0.5}}, {n, n, 4});
}

DefectSpec spec(DefectKind kind, double charge, std::array<double, 2> at = {0, 0}, double eps = 0.05) {
    DefectSpec d;
    d.kind = kind;
    d.charge = charge;
    d.axisPoint = at;
    d.coreRadius = eps;
    return d;
}

struct Fields {
    DefectConfiguration cfg;
    Coframe e;
    ConnectionField w;
};

Fields build(const DefectConfiguration& cfg) { return {cfg, buildCoframe(cfg), buildConnection(cfg)}; }

}  // namespace

TEST_CASE("couplings") {
    Couplings c{2.0, 4.0, 3.0, 0.5, 0.25};
    CHECK(c.Gamma() == 1.5);
    CHECK(c.kappaEL() == 3.0 / 8.0);
    CHECK_NOTHROW(c.validate());
    c.beta = 0.0;
    CHECK_THROWS_AS(c.validate(), ValueError);
}

TEST_CASE("defect-free configurations give exactly zero diagnostics") {
    const Couplings c{1.3, 0.7, 2.1, 0.9, 1.1};
    for (int dim : {3, 4}) {
        DefectConfiguration cfg{{}, transverse(16), {}};
        if (dim == 4) cfg = cfg.embedded4D();
        const auto f = build(cfg);
        const auto a = actionDensity(f.e, f.w, c);
        CHECK(a.torsionTerm.maxAbs() == 0.0);
        CHECK(a.curvatureTerm.maxAbs() == 0.0);
        CHECK(a.mixedTerm.maxAbs() == 0.0);
        CHECK(a.action == 0.0);
        CHECK(a.mixedStructurallyZero == (dim == 3));
        const auto b = bianchiResiduals(f.e, f.w);
        CHECK(b.curvature.maxNorm == 0.0);
        CHECK(b.torsion.maxNorm == 0.0);
        const auto u = u1Sources(f.e, f.w, c);
        CHECK(u.J1.maxAbs() == 0.0);
        CHECK(u.J2.maxAbs() == 0.0);
        if (dim == 4) {
            CHECK(elCoframeResidual(f.e, f.w, c).maxNorm == 0.0);
            CHECK(elConnectionResidual(f.e, f.w, c).maxNorm == 0.0);
        } else {
            CHECK_THROWS_AS(elCoframeResidual(f.e, f.w, c), DegreeError);
            CHECK_THROWS_AS(elConnectionResidual(f.e, f.w, c), DegreeError);
        }
    }
}

TEST_CASE("screw torsion self-energy") {
    // ∫ (b g_ε)² dA = b²/(4πε²) per unit length of line
    const Couplings c{};
    auto energy = [&](double b, double eps, int n) {
        const auto f = build({{spec(DefectKind::Screw, b, {0, 0}, eps)}, transverse(n), {}});
        return actionDensity(f.e, f.w, c).torsionAction;
    };
    for (double eps : {0.1, 0.05}) {
        const double exact = 1.0 / (4 * kPi * eps * eps);
        CHECK(energy(1.0, eps, 256) == doctest::Approx(exact).epsilon(0.02));
    }
    CHECK(energy(1.0, 0.05, 128) > energy(1.0, 0.1, 128));
    CHECK(energy(2.0, 0.05, 128) == doctest::Approx(4.0 * energy(1.0, 0.05, 128)).epsilon(1e-12));
    const auto f = build({{spec(DefectKind::Screw, 1.0)}, transverse(64), {}});
    const auto a = actionDensity(f.e, f.w, c);
    CHECK(a.curvatureAction == 0.0);
    CHECK(a.mixedStructurallyZero);
}

TEST_CASE("wedge curvature term is negative and quadratic in the Frank angle") {
    const Couplings c{};
    auto curv = [&](double theta) {
        const auto f = build({{spec(DefectKind::Wedge, theta)}, transverse(64), {}});
        return actionDensity(f.e, f.w, c).curvatureAction;
    };
    CHECK(curv(0.1) < 0.0);
    CHECK(curv(0.2) == doctest::Approx(4.0 * curv(0.1)).epsilon(1e-12));
}

TEST_CASE("field equation residuals in 4D") {
    const Couplings c{1.0, 1.0, 2.0};
    const double eps = 0.05;

    SUBCASE("screw: coframe residual is D*T, second order away from the core") {
        auto norm = [&](int n, double gamma) {
            const auto f = build(DefectConfiguration{{spec(DefectKind::Screw, 1.0)}, transverse(n), {}}.embedded4D());
            const auto region = InteriorRegion::around(f.cfg, 2 * 3.0 / 64, 8.0);
            return elCoframeResidual(f.e, f.w, Couplings{1.0, 1.0, gamma}, region).l2Norm;
        };
        const double coarse = norm(64, 2.0), fine = norm(128, 2.0);
        CHECK(coarse > 0.0);
        const auto conv = convergence("el_coframe", coarse, fine, 3.0, 5.0);
        INFO("coarse ", conv.coarse, " fine ", conv.fine, " ratio ", conv.ratio);
        CHECK(conv.verdict == "second-order");
        CHECK(norm(64, 5.0) == coarse);
    }
    SUBCASE("wedge: R∧e vanishes so the coframe residual does not see Γ") {
        const auto f = build(DefectConfiguration{{spec(DefectKind::Wedge, 0.1)}, transverse(64), {}}.embedded4D());
        const auto r1 = elCoframeResidual(f.e, f.w, Couplings{1.0, 1.0, 0.5});
        const auto r2 = elCoframeResidual(f.e, f.w, Couplings{1.0, 1.0, 7.0});
        CHECK(r1.maxNorm > 0.0);
        CHECK((r1.field - r2.field).maxAbs() == 0.0);
        const FormField R = curvature(f.w);
        CHECK(forms::wedge(R, f.e.form(), forms::FramePairing::MatrixVector).maxAbs() == 0.0);
    }
    SUBCASE("wedge: connection residual is D*R plus the long-range torsion term") {
        // T = ω∧e does not vanish for a wedge on the trivial coframe, so the κ term stays
        auto parts = [&](int n) {
            const auto f = build(DefectConfiguration{{spec(DefectKind::Wedge, 0.1)}, transverse(n), {}}.embedded4D());
            const auto region = InteriorRegion::around(f.cfg, 2 * 3.0 / 64, 8.0);
            const auto full = elConnectionResidual(f.e, f.w, c, region);
            const FormField R = curvature(f.w);
            const FormField dsr = forms::covariantDerivative(forms::hodgeStar(R), f.w);
            const FormField T = defects::torsion(f.e, f.w);
            const FormField kt = c.kappaEL() * forms::wedge(f.e.form(), forms::hodgeStar(T), forms::FramePairing::AntisymOuter);
            CHECK((full.field - (dsr + kt)).maxAbs() == 0.0);
            return std::pair{makeResidual("DsR", dsr, region).l2Norm, makeResidual("kT", kt, region).l2Norm};
        };
        const auto [d1, k1] = parts(64);
        const auto [d2, k2] = parts(128);
        CHECK(k1 > 0.0);
        CHECK(k2 == doctest::Approx(k1).epsilon(0.05));
        const auto conv = convergence("D*R", d1, d2, 3.0, 5.0);
        INFO("coarse ", conv.coarse, " fine ", conv.fine, " ratio ", conv.ratio);
        CHECK(conv.verdict == "second-order");
    }
    SUBCASE("screw: connection residual is linear in b") {
        auto norm = [&](double b) {
            const auto f = build(DefectConfiguration{{spec(DefectKind::Screw, b)}, transverse(64), {}}.embedded4D());
            return elConnectionResidual(f.e, f.w, c).l2Norm;
        };
        CHECK(norm(1.0) > 0.0);
        CHECK(norm(2.0) == doctest::Approx(2.0 * norm(1.0)).epsilon(1e-12));
    }
    (void)eps;
}

TEST_CASE("Bianchi identities") {
    const double margin = 2 * 3.0 / 64;
    SUBCASE("screw only") {
        const auto f = build({{spec(DefectKind::Screw, 1.0)}, transverse(64), {}});
        const auto b = bianchiResiduals(f.e, f.w, InteriorRegion::around(f.cfg, margin));
        CHECK(b.curvature.maxNorm == 0.0);
        CHECK(b.torsion.maxNorm <= kExactTolerance);
        CHECK(forms::wedge(curvature(f.w), f.e.form(), forms::FramePairing::MatrixVector).maxAbs() == 0.0);
    }
    SUBCASE("wedge and screw superposition in 3D and 4D") {
        for (int dim : {3, 4}) {
            auto norms = [&](int n) {
                DefectConfiguration cfg{{spec(DefectKind::Wedge, 0.1, {-0.4, 0.1}), spec(DefectKind::Screw, 1.0, {0.4, -0.2})},
                                        transverse(n), {}};
                if (dim == 4) cfg = cfg.embedded4D();
                const auto f = build(cfg);
                const auto b = bianchiResiduals(f.e, f.w, InteriorRegion::around(cfg, margin));
                return std::pair{b.curvature.l2Norm, b.torsion.l2Norm};
            };
            const auto [c1, t1] = norms(64);
            const auto [c2, t2] = norms(128);
            CHECK(convergence("DR", c1, c2, 3.0, 5.0).pass);
            CHECK(convergence("DT", t1, t2, 3.0, 5.0).pass);
        }
    }
    SUBCASE("generic smooth fields converge at second order") {
        for (int dim : {3, 4}) {
            auto norms = [&](int n) {
                GridSpec g = transverse(n);
                if (dim == 4) g = GridSpec(4, {{-1.5, 1.5}, {-1.5, 1.5}, {-0.5, 0.5}, {-0.5, 0.5}}, {n, n, 4, 4});
                const auto [e, w] = smoothProbe(g);
                InteriorRegion region;
                region.margin = margin;
                const auto b = bianchiResiduals(e, w, region);
                return std::pair{b.curvature.l2Norm, b.torsion.l2Norm};
            };
            const auto [c1, t1] = norms(32);
            const auto [c2, t2] = norms(64);
            CHECK(c1 > 1e-6);
            CHECK(t1 > 1e-6);
            const auto dr = convergence("DR", c1, c2, 3.0, 5.0);
            const auto dt = convergence("DT", t1, t2, 3.0, 5.0);
            CHECK(dr.verdict == "second-order");
            CHECK(dt.verdict == "second-order");
        }
    }
}

TEST_CASE("U(1) sources") {
    const Couplings c{1.0, 1.0, 1.0, 0.7, 0.3};
    const auto f = build({{spec(DefectKind::Screw, 1.0)}, transverse(128), {}});
    const auto u = u1Sources(f.e, f.w, c);
    CHECK(u.J1.degree() == 3);
    CHECK(u.J2StructurallyZero);
    CHECK(u.J2.maxAbs() == 0.0);
    CHECK(u.dJ1.structurallyZero);

    const double kbL = 0.7 * 1.0 * 0.5;
    const double tube = u1FluxBalance(u.J1, Volume::tube({0, 0}, 0.5, {-0.3, 0.2}));
    CHECK(tube == doctest::Approx(kbL).epsilon(1e-3));
    const double half = u1FluxBalance(u.J1, Volume::tube({0, 0}, 0.5, {-0.3, -0.05}));
    CHECK(half == doctest::Approx(kbL / 2).epsilon(1e-3));
    const double box = u1FluxBalance(u.J1, Volume::makeBox({-0.5, 0.5}, {-0.5, 0.5}, {-0.3, 0.2}));
    CHECK(box == doctest::Approx(kbL).epsilon(1e-3));

    // additivity over disjoint volumes
    const double left = u1FluxBalance(u.J1, Volume::makeBox({-0.5, 0.013}, {-0.5, 0.5}, {-0.3, 0.2}));
    const double right = u1FluxBalance(u.J1, Volume::makeBox({0.013, 0.5}, {-0.5, 0.5}, {-0.3, 0.2}));
    CHECK(std::abs(left + right - box) <= 1e-9 * std::abs(box));
    CHECK(std::abs(u1FluxBalance(u.J1, Volume::makeBox({0.6, 1.2}, {0.6, 1.2}, {-0.3, 0.2}))) < 1e-4);

    SUBCASE("closedness in 4D") {
        const auto f4 = build(DefectConfiguration{{spec(DefectKind::Screw, 1.0)}, transverse(64), {}}.embedded4D());
        const auto u4 = u1Sources(f4.e, f4.w, c, InteriorRegion::around(f4.cfg, 2 * 3.0 / 64));
        CHECK_FALSE(u4.dJ1.structurallyZero);
        CHECK(u4.dJ1.maxNorm <= kExactTolerance);
        CHECK(u4.dJ2.structurallyZero);
        CHECK(u4.J2.maxAbs() == 0.0);

        auto probe = [&](int n) {
            const GridSpec g(4, {{-1.5, 1.5}, {-1.5, 1.5}, {-0.5, 0.5}, {-0.5, 0.5}}, {n, n, 4, 4});
            InteriorRegion region;
            region.margin = 2 * 3.0 / 32;
            return u1Sources(closedSourceProbe(g), ConnectionField::zero(g), c, region).dJ1.l2Norm;
        };
        const auto conv = convergence("dJ1", probe(32), probe(64), 3.0, 5.0);
        INFO("coarse ", conv.coarse, " fine ", conv.fine, " ratio ", conv.ratio);
        CHECK(conv.verdict == "second-order");
    }
}

TEST_CASE("convergence verdicts and JSON records") {
    CHECK(convergence("x", 0.0, 0.0, 3, 5).verdict == "exact");
    CHECK(convergence("x", 4e-3, 1e-3, 3, 5).verdict == "second-order");
    CHECK(convergence("x", 2e-3, 1e-3, 3, 5).verdict == "failed");
    CHECK_FALSE(convergence("x", 1e-3, 0.0, 3, 5).pass);

    const auto f = build({{spec(DefectKind::Screw, 1.0)}, transverse(16), {}});
    const auto b = bianchiResiduals(f.e, f.w);
    const auto j = toJson(b.torsion, f.cfg.grid, 0.05, Couplings{});
    CHECK(j.at("term") == "bianchi_DT_minus_Re");
    CHECK(j.at("resolution").size() == 3);
    CHECK(j.at("couplings").at("Gamma") == 1.0);
    CHECK(j.contains("l2Norm"));
    CHECK(j.contains("maxNorm"));
}
