#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cartan/dynamics/dynamics.hpp"

using namespace cartan;
using namespace cartan::dynamics;

namespace {

DislocationLine straightScrew(double x, double y, double b = 1.0, int nodes = 3) {
    DislocationLine l;
    l.id = "L";
    for (int i = 0; i < nodes; ++i) l.nodes.push_back({x, y, -0.4 + 0.8 * i / (nodes - 1)});
    l.burgers = {0.0, 0.0, b};
    return l;
}

DisclinationField wedgeAtOrigin(double theta = 0.5, double eps = 0.1) {
    DisclinationField f;
    f.lines.push_back({{0.0, 0.0}, {0.0, 0.0, theta}, eps});
    return f;
}

DynamicsParams drive(double Gamma, ForceLaw law, double dt, int steps) {
    DynamicsParams p;
    p.Gamma = Gamma;
    p.law = law;
    p.externalForce.uniform = {1.0, 0.0, 0.0};
    p.timeStep = dt;
    p.steps = steps;
    return p;
}

Vec3 endpoint(double Gamma, double dt, double T, ForceLaw law = ForceLaw::DerivationConsistent) {
    std::vector<DislocationLine> lines{straightScrew(-0.15, 0.02)};
    const auto field = wedgeAtOrigin();
    const int steps = static_cast<int>(std::lround(T / dt));
    const auto p = drive(Gamma, law, dt, steps);
    for (int s = 0; s < steps; ++s) stepLines(lines, field, p, s);
    return lines.at(0).nodes[1];
}

double residual(const Vec3& v, const Vec3& f, const Vec3& w, double Gamma, double M) {
    return norm(v - M * (f + Gamma * cross(w, v)));
}

}  // namespace

TEST_CASE("magnus force arithmetic") {
    for (double Gamma : {1.0, 0.3, -2.5}) {
        const Vec3 f = magnusForce({0, 0, 0.1}, {1, 0, 0}, {0.5, 0, 0}, Gamma, ForceLaw::CrossProduct);
        CHECK(f[0] == 0.0);
        CHECK(f[1] == 0.0);
        CHECK(f[2] == Gamma * -0.05);
    }
    for (auto law : {ForceLaw::CrossProduct, ForceLaw::DerivationConsistent}) {
        const Vec3 f = magnusForce({0.1, -0.2, 0.3}, {1, 2, 3}, {0, 0, 0}, 1.5, law, {0, 0, 1});
        CHECK(norm(f) == 0.0);
    }
    // screw beside a wedge: the two laws disagree
    const Vec3 theta{0, 0, 0.2}, b{0, 0, 1.0}, v{0.3, 0.4, 0.0};
    CHECK(norm(magnusForce(theta, b, v, 1.0, ForceLaw::CrossProduct)) == 0.0);
    const Vec3 g = magnusForce(theta, b, v, 1.0, ForceLaw::DerivationConsistent, {0, 0, 1});
    CHECK(norm(g) == doctest::Approx(0.2 * 1.0 * 0.5).epsilon(1e-15));
    CHECK(transversality(g, v) < 1e-15);
    CHECK(toString(ForceLaw::CrossProduct) == "CrossProduct");
}

TEST_CASE("velocity solve") {
    SUBCASE("Gamma zero is pure mobility") {
        const Vec3 v = solveVelocity({0.3, -1.0, 2.0}, {1, 2, 3}, 0.0, 2.5);
        CHECK(v == Vec3{0.75, -2.5, 5.0});
    }
    SUBCASE("no drive, no motion") {
        CHECK(norm(solveVelocity({0, 0, 0}, {1, 2, 3}, 4.0, 2.0)) == 0.0);
    }
    SUBCASE("hand-solved block") {
        const double M = 1.3, f = 0.7, c = 0.4, Gamma = 2.2;
        const Vec3 w{0, 0, c};
        const Vec3 v = solveVelocity({f, 0, 0}, w, Gamma, M);
        const double k = M * Gamma * c;
        // v_x = M(f - Γc v_y), v_y = MΓc v_x
        const double pre = M * f / (1.0 + k * k);
        CHECK(v[0] == doctest::Approx(pre).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(pre * k).epsilon(1e-15));
        CHECK(v[2] == 0.0);
        CHECK(residual(v, {f, 0, 0}, w, Gamma, M) < 1e-12);
    }
    SUBCASE("random draws") {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> pos(0.05, 5.0);
        double worst = 0.0, excess = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Vec3 f{u(rng), u(rng), u(rng)}, theta{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
            const double Gamma = 5.0 * u(rng), M = pos(rng);
            for (auto law : {ForceLaw::CrossProduct, ForceLaw::DerivationConsistent}) {
                const Vec3 t = (1.0 / norm(b)) * b;
                const Vec3 w = magnusAxis(theta, b, t, law);
                const Vec3 v = solveVelocity(f, w, Gamma, M);
                worst = std::max(worst, residual(v, f, w, Gamma, M));
                excess = std::max(excess, norm(v) / (M * norm(f)) - 1.0);
                CHECK(transversality(Gamma * cross(w, v), v) < 1e-12);
            }
        }
        CHECK(worst < 1e-12);
        CHECK(excess <= 0.0);
    }
    CHECK_THROWS_AS(solveVelocity({1, 0, 0}, {0, 0, 1}, 1.0, 0.0), ValueError);
}

TEST_CASE("line validation and tangents") {
    DislocationLine l = straightScrew(0, 0);
    CHECK_NOTHROW(l.validate());
    CHECK(l.tangent(0) == Vec3{0, 0, 1});
    CHECK(l.tangent(1) == Vec3{0, 0, 1});

    DislocationLine loop;
    loop.id = "loop";
    loop.closed = true;
    loop.burgers = {1, 0, 0};
    loop.nodes = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
    CHECK_NOTHROW(loop.validate());
    const Vec3 t0 = loop.tangent(0);
    CHECK(t0[0] == doctest::Approx(0.0));
    CHECK(t0[1] == doctest::Approx(1.0));

    DislocationLine bad = l;
    bad.burgers = {0, 0, 0};
    CHECK_THROWS_AS(bad.validate(), ValueError);
    bad = l;
    bad.nodes[1] = bad.nodes[0];
    CHECK_THROWS_AS(bad.validate(), ValueError);
    bad = l;
    bad.nodes.resize(1);
    CHECK_THROWS_AS(bad.validate(), ValueError);
    loop.nodes.resize(2);
    CHECK_THROWS_AS(loop.validate(), ValueError);
    bad = l;
    bad.mobility = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValueError);

    DisclinationField f = wedgeAtOrigin();
    f.lines[0].coreRadius = 0.0;
    CHECK_THROWS_AS(f.validate(), ValueError);
}

TEST_CASE("local Frank vector") {
    const auto f = wedgeAtOrigin(0.5, 0.1);
    CHECK(f.localTheta({0, 0, 3})[2] == doctest::Approx(0.25));
    CHECK(f.localTheta({0.1, 0, 0})[2] == doctest::Approx(0.25 * std::exp(-0.5)));
    CHECK(f.localTheta({1.0, 0, 0})[2] < 1e-20);
}

TEST_CASE("stepping") {
    SUBCASE("zero forces leave positions unchanged") {
        std::vector<DislocationLine> lines{straightScrew(-0.05, 0.0)};
        const auto before = lines[0].nodes;
        auto p = drive(3.0, ForceLaw::DerivationConsistent, 1e-2, 1);
        p.externalForce.uniform = {0, 0, 0};
        stepLines(lines, wedgeAtOrigin(), p, 0);
        CHECK(lines[0].nodes == before);
    }
    SUBCASE("Gamma zero translates rigidly") {
        std::vector<DislocationLine> lines{straightScrew(-0.3, 0.1)};
        lines[0].mobility = 2.0;
        const auto p = drive(0.0, ForceLaw::CrossProduct, 1e-2, 10);
        for (int s = 0; s < 10; ++s) stepLines(lines, wedgeAtOrigin(), p, s);
        for (const auto& x : lines[0].nodes) {
            CHECK(x[0] == doctest::Approx(-0.3 + 10 * 2.0 * 1e-2).epsilon(1e-14));
            CHECK(x[1] == 0.1);
        }
    }
    SUBCASE("coaxial wedge deflects sideways and never does work") {
        for (auto law : {ForceLaw::CrossProduct, ForceLaw::DerivationConsistent}) {
            std::vector<DislocationLine> lines{straightScrew(-0.2, 0.02)};
            const Vec3 start = lines[0].nodes[1];
            // a slight edge component keeps the cross-product law active
            lines[0].burgers = {0.3, 0.0, 1.0};
            const auto p = drive(2.0, law, 2e-3, 200);
            double worst = 0.0, peakForce = 0.0;
            for (int s = 0; s < p.steps; ++s) {
                const auto rep = stepLines(lines, wedgeAtOrigin(), p, s);
                CHECK(rep.nodes.size() == 3);
                for (const auto& d : rep.nodes) {
                    worst = std::max(worst, d.transversality);
                    peakForce = std::max(peakForce, norm(d.fMagnus));
                }
            }
            CHECK(worst < 1e-12);
            CHECK(peakForce > 1e-2);
            const Vec3 moved = lines[0].nodes[1] - start;
            CHECK(std::hypot(moved[1], moved[2]) > 1e-3);
        }
    }
    SUBCASE("nodes leaving the domain are clipped") {
        DislocationLine l;
        l.id = "L";
        l.burgers = {0, 0, 1};
        l.nodes = {{0.0, 0, -0.2}, {0.5, 0, -0.1}, {0.995, 0, 0}, {0.5, 0, 0.1}, {0.0, 0, 0.2}};
        std::vector<DislocationLine> lines{l};
        const auto p = drive(0.0, ForceLaw::CrossProduct, 1e-2, 1);
        const auto rep = stepLines(lines, {}, p, 7);
        REQUIRE(rep.clips.size() == 1);
        CHECK(rep.clips[0].step == 7);
        CHECK(rep.clips[0].nodesRemoved == 1);
        CHECK(rep.clips[0].survivors == std::vector<std::string>{"L", "L#1"});
        REQUIRE(lines.size() == 2);
        CHECK(lines[0].nodes.size() == 2);
        CHECK(lines[1].nodes.size() == 2);
    }
    SUBCASE("oversized time step is rejected") {
        std::vector<DislocationLine> lines{straightScrew(0, 0)};
        const auto p = drive(0.0, ForceLaw::CrossProduct, 1.0, 1);
        CHECK_THROWS_AS(stepLines(lines, {}, p, 0), ValueError);
    }
}

TEST_CASE("Gamma to zero is linear") {
    const double T = 0.3, dt = 1e-3;
    const Vec3 base = endpoint(0.0, dt, T);
    const double Gamma = 0.1;
    const double full = norm(endpoint(Gamma, dt, T) - base);
    const double half = norm(endpoint(Gamma / 2, dt, T) - base);
    REQUIRE(half > 0.0);
    CHECK(full / half >= 1.8);
    CHECK(full / half <= 2.2);
}

TEST_CASE("explicit Euler is first order in dt") {
    const double T = 0.3, Gamma = 2.0;
    const Vec3 a = endpoint(Gamma, 4e-3, T);
    const Vec3 b = endpoint(Gamma, 2e-3, T);
    const Vec3 c = endpoint(Gamma, 1e-3, T);
    const double ratio = norm(a - b) / norm(b - c);
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
}

TEST_CASE("transport rate of a translating screw core") {
    const forms::GridSpec grid(3, {{-1, 1}, {-1, 1}, {-0.5, 0.5}}, {64, 64, 4});
    const double eps = 0.1;
    const auto still = transportResidual(straightScrew(0, 0), grid, {0, 0, 0}, eps);
    CHECK(still.peakRate == 0.0);
    CHECK(still.estimate == 0.0);
    CHECK(still.relativeDiscrepancy == 0.0);

    const auto v1 = transportResidual(straightScrew(0, 0), grid, {0.5, 0, 0.7}, eps);
    const auto v2 = transportResidual(straightScrew(0, 0), grid, {1.0, 0, 0.7}, eps);
    CHECK(v1.peakRate > 0.0);
    CHECK(v2.peakRate / v1.peakRate == doctest::Approx(2.0).epsilon(0.02));
    CHECK(v1.estimate == doctest::Approx(0.5 / (std::numbers::pi * eps * eps)));

    const auto b2 = transportResidual(straightScrew(0, 0, 2.0), grid, {0.5, 0, 0}, eps);
    CHECK(b2.peakRate / v1.peakRate == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::isfinite(v1.relativeDiscrepancy));

    DislocationLine tilted = straightScrew(0, 0);
    tilted.nodes[2][0] = 0.1;
    CHECK_THROWS_AS(transportResidual(tilted, grid, {1, 0, 0}, eps), ValueError);
}

TEST_CASE("trajectory csv") {
    std::vector<DislocationLine> lines{straightScrew(-0.2, 0.0)};
    const auto rep = stepLines(lines, wedgeAtOrigin(), drive(1.0, ForceLaw::CrossProduct, 1e-2, 1), 0);
    std::ostringstream os;
    writeTrajectoryHeader(os);
    writeTrajectoryRows(os, rep.nodes);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "step,line_id,node,x,y,z,vx,vy,vz,fext_x,fext_y,fext_z,fmag_x,fmag_y,fmag_z,transversality");
    int rows = 0;
    while (std::getline(in, row)) {
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 15);
    }
    CHECK(rows == 3);
}
