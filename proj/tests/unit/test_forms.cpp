#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cartan/forms/integration.hpp"
#include "cartan/forms/io.hpp"
#include "cartan/forms/operators.hpp"

using namespace cartan;
using namespace cartan::forms;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec cube3(int n = 8, double lo = -1.0, double hi = 1.0) {
    return GridSpec(3, {{lo, hi}, {lo, hi}, {lo, hi}}, {n, n, n});
}

// Constant scalar 1-form Σ c_μ dx^μ.
FormField constantOneForm(const GridSpec& g, std::vector<double> c) {
    return FormField::sample(g, 1, ValueType::scalar(), [c](const Point&, std::span<double> out) {
        for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
    });
}

FormField randomForm(const GridSpec& g, int degree, ValueType vt, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FormField f(g, degree, vt);
    for (double& v : f.data()) v = u(rng);
    return f;
}

double maxDiff(const FormField& a, const FormField& b) { return (a - b).maxAbs(); }

// Gaussian-regularised angular form (1 - exp(-r²/2ε²)) dθ, written out independently.
PointEvaluator angleForm(double eps) {
    return [eps](const Point& p, std::span<double> out) {
        const double r2 = p[0] * p[0] + p[1] * p[1];
        const double s = r2 > 0 ? (1.0 - std::exp(-r2 / (2 * eps * eps))) / r2 : 1.0 / (2 * eps * eps);
        out[0] = -p[1] * s;
        out[1] = p[0] * s;
    };
}

}  // namespace

TEST_CASE("grid geometry and basis ordering") {
    const GridSpec g = cube3(4);
    CHECK(g.pointCount() == 64);
    CHECK(g.spacing(0) == doctest::Approx(0.5));
    CHECK(g.coordinate(0, 0) == doctest::Approx(-0.75));
    CHECK(g.flatten(g.unflatten(37)) == 37);
    const auto& b2 = basisOf(4, 2);
    REQUIRE(b2.size() == 6);
    CHECK(b2[0] == MultiIndex{0, 1});
    CHECK(b2[1] == MultiIndex{0, 2});
    CHECK(b2[5] == MultiIndex{2, 3});
    CHECK_THROWS_AS(GridSpec(3, {{0, 1}, {0, 1}, {0, 1}}, {4, 3, 4}), ValueError);
    CHECK_THROWS_AS(GridSpec(3, {{0, 1}, {1, 1}, {0, 1}}, {4, 4, 4}), ValueError);
    CHECK_THROWS_AS(GridSpec(5, {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}, {4, 4, 4, 4, 4}), ValueError);
}

TEST_CASE("wedge of basis 1-forms") {
    const GridSpec g = cube3(4);
    const auto dx = constantOneForm(g, {1, 0, 0});
    const auto dy = constantOneForm(g, {0, 1, 0});

    const auto dxdy = wedge(dx, dy);
    CHECK(dxdy.degree() == 2);
    CHECK(dxdy.component(0, 0)[5] == 1.0);  // (x,y)
    CHECK(dxdy.component(0, 1)[5] == 0.0);
    CHECK(dxdy.component(0, 2)[5] == 0.0);

    CHECK(maxDiff(wedge(dy, dx), -1.0 * dxdy) == 0.0);
    CHECK(maxDiff(wedge(dx + dy, dy), dxdy) == 0.0);
    CHECK(wedge(dx, dx).maxAbs() == 0.0);
}

TEST_CASE("wedge errors") {
    const GridSpec g = cube3(4);
    const FormField two(g, 2, ValueType::scalar());
    CHECK_THROWS_AS(wedge(two, two), DegreeError);
    CHECK_THROWS_AS(wedge(two, FormField(cube3(5), 1, ValueType::scalar())), GridMismatchError);
    const FormField v(g, 1, ValueType::vector(3));
    CHECK_THROWS_AS(wedge(v, v), PairingError);
    CHECK_THROWS_AS(wedge(v, v, FramePairing::MatrixVector), PairingError);
    CHECK_THROWS_AS(wedge(v, FormField(g, 1, ValueType::vector(4)), FramePairing::ContractVector), PairingError);
}

TEST_CASE("graded commutativity holds exactly for random fields") {
    std::mt19937 rng(7);
    const GridSpec g = cube3(4);
    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; p + q <= 3; ++q) {
            const auto a = randomForm(g, p, ValueType::scalar(), rng);
            const auto b = randomForm(g, q, ValueType::scalar(), rng);
            const double sign = ((p * q) % 2 == 0) ? 1.0 : -1.0;
            CHECK(maxDiff(wedge(a, b), sign * wedge(b, a)) == 0.0);
            // contract-vector pairing obeys the same rule
            const auto va = randomForm(g, p, ValueType::vector(3), rng);
            const auto vb = randomForm(g, q, ValueType::vector(3), rng);
            CHECK(maxDiff(wedge(va, vb, FramePairing::ContractVector),
                          sign * wedge(vb, va, FramePairing::ContractVector)) < 1e-15);
        }
    }
}

TEST_CASE("matrix pairings reproduce explicit index sums") {
    std::mt19937 rng(11);
    const GridSpec g = cube3(4);
    const auto A = randomForm(g, 1, ValueType::antisym(3), rng);
    const auto B = randomForm(g, 2, ValueType::antisym(3), rng);
    const auto v = randomForm(g, 1, ValueType::vector(3), rng);

    const auto Av = wedge(A, v, FramePairing::MatrixVector);
    for (int a = 0; a < 3; ++a) {
        FormField expect(g, 2, ValueType::scalar());
        for (int b = 0; b < 3; ++b) expect += wedge(A.matrixEntry(a, b), v.vectorComponent(b));
        CHECK(maxDiff(Av.vectorComponent(a), expect) < 1e-14);
    }

    const auto comm = wedge(A, B, FramePairing::Commutator);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField expect(g, 3, ValueType::scalar());
            for (int c = 0; c < 3; ++c) {
                expect += wedge(A.matrixEntry(a, c), B.matrixEntry(c, b));
                expect -= wedge(B.matrixEntry(a, c), A.matrixEntry(c, b));  // (−1)^{1·2} = +1
            }
            CHECK(maxDiff(comm.matrixEntry(a, b), expect) < 1e-14);
        }
    }

    // ω∧ω for a 1-form is antisymmetric and equals half the commutator
    const auto half = 0.5 * wedge(A, A, FramePairing::Commutator);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField expect(g, 2, ValueType::scalar());
            for (int c = 0; c < 3; ++c) expect += wedge(A.matrixEntry(a, c), A.matrixEntry(c, b));
            CHECK(maxDiff(half.matrixEntry(a, b), expect) < 1e-14);
        }
    }

    const auto tr = wedge(A, A, FramePairing::Trace);  // Σ A_ab ∧ A_ba for 1-forms: zero pointwise? no: 1-forms anticommute
    FormField expectTr(g, 2, ValueType::scalar());
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) expectTr += wedge(A.matrixEntry(a, b), A.matrixEntry(b, a));
    CHECK(maxDiff(tr, expectTr) < 1e-14);

    const auto outer = wedge(v, v, FramePairing::AntisymOuter);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            auto expect = wedge(v.vectorComponent(a), v.vectorComponent(b)) -
                          wedge(v.vectorComponent(b), v.vectorComponent(a));
            CHECK(maxDiff(outer.matrixEntry(a, b), expect) < 1e-14);
        }
    }
}

TEST_CASE("exterior derivative of coordinate functions and quadratics") {
    const GridSpec g = cube3(6);
    const auto x = FormField::scalarFunction(g, [](const Point& p) { return p[0]; });
    const auto dx = exteriorDerivative(x);
    for (double v : dx.component(0, 0)) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dx.component(0, 1)[0] == 0.0);

    // exact, boundary included, for per-axis quadratics
    const auto q = FormField::scalarFunction(g, [](const Point& p) { return p[0] * p[0] - 3 * p[1] * p[2] + p[2] * p[2]; });
    const auto dq = exteriorDerivative(q);
    const auto expect = FormField::sample(g, 1, ValueType::scalar(), [](const Point& p, std::span<double> out) {
        out[0] = 2 * p[0];
        out[1] = -3 * p[2];
        out[2] = -3 * p[1] + 2 * p[2];
    });
    CHECK(maxDiff(dq, expect) < 1e-12);

    CHECK_THROWS_AS(exteriorDerivative(FormField(g, 3, ValueType::scalar())), DegreeError);
}

TEST_CASE("d∘d vanishes to rounding for smooth fields") {
    // Axis-wise difference operators commute, so d(d f) is a rounding-level
    // residual at every resolution rather than an O(h²) one.
    for (int n : {16, 32, 64}) {
        const GridSpec g(2, {{0, 2 * kPi}, {0, 2 * kPi}}, {n, n});
        const auto f = FormField::scalarFunction(g, [](const Point& p) { return std::sin(p[0]) * std::cos(p[1]); });
        CHECK(exteriorDerivative(exteriorDerivative(f)).maxAbs() < 1e-10);
    }
    std::mt19937 rng(3);
    const GridSpec g = cube3(6);
    const auto w = randomForm(g, 1, ValueType::antisym(3), rng);
    CHECK(exteriorDerivative(exteriorDerivative(w)).maxAbs() < 1e-10);
}

TEST_CASE("first derivatives converge at second order") {
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const GridSpec g(2, {{0, 2 * kPi}, {0, 2 * kPi}}, {n, n});
        const auto f = FormField::scalarFunction(g, [](const Point& p) { return std::sin(p[0]) * std::cos(p[1]); });
        const auto exact = FormField::sample(g, 1, ValueType::scalar(), [](const Point& p, std::span<double> out) {
            out[0] = std::cos(p[0]) * std::cos(p[1]);
            out[1] = -std::sin(p[0]) * std::sin(p[1]);
        });
        const double err = maxDiff(exteriorDerivative(f), exact);
        if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
        prev = err;
    }
}

TEST_CASE("regularised angular form: d(dθ_ε) carries 2π") {
    const double eps = 0.05;
    const GridSpec g(2, {{-1.5, 1.5}, {-1.5, 1.5}}, {128, 128});
    const auto dtheta = FormField::sample(g, 1, ValueType::scalar(), angleForm(eps));
    const auto ddtheta = exteriorDerivative(dtheta);
    const double flux = integrateOverSurface(ddtheta, Surface::disk(2, {0, 0}, 1.0))[0];
    CHECK(std::abs(flux - 2 * kPi) / (2 * kPi) < 1e-3);

    FormEvaluator exact{2, 1, ValueType::scalar(), angleForm(eps), std::nullopt};
    const double ref = integrateOverLoop(exact, Loop::circle(2, {0, 0}, 6 * eps))[0];
    CHECK(ref == doctest::Approx(2 * kPi).epsilon(1e-7));
    for (double r : {8 * eps, 12 * eps, 20 * eps}) {
        const double val = integrateOverLoop(exact, Loop::circle(2, {0, 0}, r))[0];
        CHECK(std::abs(val - ref) / ref < 1e-6);
    }
}

TEST_CASE("Hodge star duality and involution") {
    const GridSpec g3 = cube3(4);
    const auto dx = constantOneForm(g3, {1, 0, 0});
    const auto star = hodgeStar(dx);
    CHECK(star.degree() == 2);
    CHECK(star.component(0, 2)[0] == 1.0);  // dy∧dz
    CHECK(star.component(0, 0)[0] == 0.0);
    CHECK(maxDiff(hodgeStar(star), dx) == 0.0);
    const auto dy = constantOneForm(g3, {0, 1, 0});
    CHECK(hodgeStar(dy).component(0, 1)[0] == -1.0);  // *dy = -dx∧dz

    const GridSpec g4(4, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {4, 4, 4, 4});
    FormField dxdy(g4, 2, ValueType::scalar());
    std::fill(dxdy.component(0, 0).begin(), dxdy.component(0, 0).end(), 1.0);
    const auto s4 = hodgeStar(dxdy);
    CHECK(s4.component(0, 5)[0] == 1.0);  // dz∧dw

    std::mt19937 rng(5);
    for (const GridSpec& g : {g3, g4}) {
        for (int k = 0; k <= g.dim(); ++k) {
            const auto a = randomForm(g, k, ValueType::vector(3), rng);
            const double sign = ((k * (g.dim() - k)) % 2 == 0) ? 1.0 : -1.0;
            CHECK(maxDiff(hodgeStar(hodgeStar(a)), sign * a) == 0.0);
        }
    }
}

TEST_CASE("interior product") {
    const GridSpec g = cube3(4);
    const auto xhat = VectorField::constant(g, {1, 0, 0});
    const auto dx = constantOneForm(g, {1, 0, 0});
    const auto dy = constantOneForm(g, {0, 1, 0});
    const auto one = interiorProduct(xhat, dx);
    CHECK(one.degree() == 0);
    for (double v : one.component(0, 0)) CHECK(v == 1.0);
    CHECK(maxDiff(interiorProduct(xhat, wedge(dx, dy)), dy) == 0.0);

    // v = (1,2,0): ι_v(dx∧dy) = dy − 2 dx, expanded both ways
    const auto v = VectorField::constant(g, {1, 2, 0});
    const auto lhs = interiorProduct(v, wedge(dx, dy));
    const auto rhs = wedge(interiorProduct(v, dx), dy) - wedge(dx, interiorProduct(v, dy));
    CHECK(maxDiff(lhs, rhs) == 0.0);
    CHECK(maxDiff(lhs, dy - 2.0 * dx) == 0.0);

    CHECK_THROWS_AS(interiorProduct(v, FormField(g, 0, ValueType::scalar())), DegreeError);
}

TEST_CASE("interior product is an antiderivation on random fields") {
    std::mt19937 rng(19);
    const GridSpec g = cube3(4);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto v = VectorField::sample(g, [&](const Point&) { return Point{u(rng), u(rng), u(rng), 0}; });
    for (int p = 1; p <= 2; ++p) {
        for (int q = 1; p + q <= 3; ++q) {
            const auto a = randomForm(g, p, ValueType::scalar(), rng);
            const auto b = randomForm(g, q, ValueType::scalar(), rng);
            const double sign = (p % 2 == 0) ? 1.0 : -1.0;
            const auto lhs = interiorProduct(v, wedge(a, b));
            const auto rhs = wedge(interiorProduct(v, a), b) + sign * wedge(a, interiorProduct(v, b));
            CHECK(maxDiff(lhs, rhs) < 1e-14);
        }
    }
}

TEST_CASE("covariant derivative") {
    std::mt19937 rng(23);
    const GridSpec g = cube3(6);
    const auto e = randomForm(g, 1, ValueType::vector(3), rng);
    CHECK(maxDiff(covariantDerivative(e, ConnectionField::zero(g)), exteriorDerivative(e)) == 0.0);
    CHECK_THROWS_AS(covariantDerivative(FormField(g, 1, ValueType::scalar()), ConnectionField::zero(g)),
                    PairingError);

    // D of a matrix 2-form is d + ω∧A − A∧ω
    const ConnectionField w(randomForm(g, 1, ValueType::antisym(3), rng));
    const auto A = randomForm(g, 2, ValueType::antisym(3), rng);
    const auto DA = covariantDerivative(A, w);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField expect = exteriorDerivative(A.matrixEntry(a, b));
            for (int c = 0; c < 3; ++c) {
                expect += wedge(w.form().matrixEntry(a, c), A.matrixEntry(c, b));
                expect -= wedge(A.matrixEntry(a, c), w.form().matrixEntry(c, b));
            }
            CHECK(maxDiff(DA.matrixEntry(a, b), expect) < 1e-12);
        }
    }
}

TEST_CASE("surface and loop integrals") {
    const GridSpec g = cube3(8, -2, 2);
    FormField zero(g, 2, ValueType::scalar());
    CHECK(integrateOverSurface(zero, Surface::disk(3, {0, 0, 0}, 1.0))[0] == 0.0);

    FormField dxdy(g, 2, ValueType::scalar());
    std::fill(dxdy.component(0, 0).begin(), dxdy.component(0, 0).end(), 1.0);
    const auto square = Surface::rectangle(3, {0, 0, 0.3}, 0, {0, 1}, 1, {0, 1});
    CHECK(std::abs(integrateOverSurface(dxdy, square)[0] - 1.0) < 1e-12);
    // reversed orientation
    CHECK(integrateOverSurface(dxdy, Surface::rectangle(3, {0, 0, 0.3}, 1, {0, 1}, 0, {0, 1}))[0] ==
          doctest::Approx(-1.0));

    const auto dx = constantOneForm(g, {1, 0, 0});
    CHECK(std::abs(integrateOverLoop(dx, Loop::circle(3, {0.2, -0.1, 0}, 0.7))[0]) < 1e-12);
    CHECK(std::abs(integrateOverLoop(dx, Loop::rectangle(3, {0, 0, 0}, 0, {-1, 1}, 1, {-0.5, 0.5}))[0]) < 1e-12);

    CHECK_THROWS_AS(integrateOverSurface(dx, square), DegreeError);
    CHECK_THROWS_AS(integrateOverLoop(dxdy, Loop::circle(3, {0, 0, 0}, 1)), DegreeError);
    CHECK_THROWS_AS(integrateOverSurface(dxdy, Surface::disk(3, {0, 0, 0}, 3.0)), DomainError);
    CHECK_THROWS_AS(integrateOverLoop(dx, Loop::circle(3, {0, 0, 0}, 2.5)), DomainError);
    Loop open = Loop::circle(3, {0, 0, 0}, 1);
    open.map = [](double t) { return Point{t, 0, 0, 0}; };
    CHECK_THROWS_AS(integrateOverLoop(dx, open), ValueError);
    CHECK_THROWS_AS(Surface::disk(3, {0, 0, 0}, 0.0), ValueError);
}

TEST_CASE("volume integrals are additive over disjoint boxes") {
    const GridSpec g = cube3(16, -1, 1);
    const auto rho = FormField::sample(g, 3, ValueType::scalar(), [](const Point& p, std::span<double> out) {
        out[0] = 1.0 + p[0] * p[1] + std::exp(-p[2] * p[2]);
    });
    const double whole = integrateOverVolume(rho, Volume::makeBox({-0.9, 0.8}, {-0.7, 0.65}, {-0.33, 0.91}))[0];
    const double left = integrateOverVolume(rho, Volume::makeBox({-0.9, 0.123}, {-0.7, 0.65}, {-0.33, 0.91}))[0];
    const double right = integrateOverVolume(rho, Volume::makeBox({0.123, 0.8}, {-0.7, 0.65}, {-0.33, 0.91}))[0];
    CHECK(std::abs(left + right - whole) / std::abs(whole) < 1e-12);

    FormField ones(g, 3, ValueType::scalar());
    std::fill(ones.data().begin(), ones.data().end(), 1.0);
    CHECK(integrateOverVolume(ones, Volume::makeBox({-0.5, 0.5}, {-0.5, 0.5}, {0, 0.25}))[0] ==
          doctest::Approx(0.25).epsilon(1e-13));
    CHECK(integrateOverVolume(ones, Volume::tube({0, 0}, 0.5, {-1, 1}))[0] ==
          doctest::Approx(2 * kPi * 0.25).epsilon(2e-2));
    CHECK(integrateTopForm(ones)[0] == doctest::Approx(8.0));
    CHECK_THROWS_AS(integrateOverVolume(ones, Volume::makeBox({-0.5, 1.5}, {-0.5, 0.5}, {0, 0.25})), DomainError);
}

TEST_CASE("field file round trip and CSV header") {
    std::mt19937 rng(29);
    const GridSpec g(4, {{-1, 1}, {0, 2}, {0, 1}, {0, 0.5}}, {5, 4, 4, 6});
    const auto f = randomForm(g, 2, ValueType::antisym(4), rng);
    std::stringstream ss;
    writeField(ss, f);
    const auto back = readField(ss);
    CHECK(back.sameShape(f));
    CHECK(maxDiff(back, f) == 0.0);

    std::stringstream bad("NOTAFIELD");
    CHECK_THROWS_AS(readField(bad), ValueError);

    std::ostringstream csv;
    writeFieldCsv(csv, constantOneForm(cube3(4), {1, 2, 3}));
    const std::string text = csv.str();
    CHECK(text.substr(0, text.find('\n')) == "x,y,z,dx,dy,dz");
}
