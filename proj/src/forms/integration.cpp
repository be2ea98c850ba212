#include "cartan/forms/integration.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace cartan::forms {

FormEvaluator interpolate(const FormField& field) {
    FormEvaluator ev;
    ev.dim = field.dim();
    ev.degree = field.degree();
    ev.valueType = field.valueType();
    ev.domain = field.grid();
    // the evaluator shares the field's coefficients by value; fields are immutable
    auto shared = std::make_shared<const FormField>(field);
    ev.eval = [shared](const Point& x, std::span<double> out) {
        const GridSpec& g = shared->grid();
        const int dim = g.dim();
        std::array<int, kMaxDim> base{};
        std::array<double, kMaxDim> frac{};
        for (int a = 0; a < dim; ++a) {
            const int n = g.resolution(a);
            double t = (x[a] - g.lower(a)) / g.spacing(a) - 0.5;
            t = std::clamp(t, 0.0, static_cast<double>(n - 1));
            int i0 = std::min(static_cast<int>(std::floor(t)), n - 2);
            base[a] = i0;
            frac[a] = t - i0;
        }
        const int blocks = shared->slotCount() * shared->componentCount();
        std::fill(out.begin(), out.begin() + blocks, 0.0);
        const std::size_t n = shared->pointCount();
        const auto data = shared->data();
        for (int corner = 0; corner < (1 << dim); ++corner) {
            double w = 1.0;
            std::size_t flat = 0;
            for (int a = 0; a < dim; ++a) {
                const int bit = (corner >> a) & 1;
                w *= bit ? frac[a] : 1.0 - frac[a];
                flat += static_cast<std::size_t>(base[a] + bit) * g.stride(a);
            }
            if (w == 0.0) continue;
            for (int b = 0; b < blocks; ++b) out[b] += w * data[static_cast<std::size_t>(b) * n + flat];
        }
    };
    return ev;
}

Surface Surface::disk(int dim, const Point& center, double radius, int axisU, int axisV) {
    if (!(radius > 0.0)) throw ValueError("degenerate surface: disk radius must be positive");
    Surface s;
    s.dim = dim;
    s.u0 = 0.0;
    s.u1 = radius;
    s.v0 = 0.0;
    s.v1 = 2.0 * std::numbers::pi;
    s.map = [=](double r, double phi) {
        Point p = center;
        p[axisU] += r * std::cos(phi);
        p[axisV] += r * std::sin(phi);
        return p;
    };
    s.tangents = [=](double r, double phi) {
        Point tr{}, tp{};
        tr[axisU] = std::cos(phi);
        tr[axisV] = std::sin(phi);
        tp[axisU] = -r * std::sin(phi);
        tp[axisV] = r * std::cos(phi);
        return std::pair{tr, tp};
    };
    return s;
}

Surface Surface::rectangle(int dim, const Point& base, int axisU, std::pair<double, double> u, int axisV,
                           std::pair<double, double> v) {
    if (!(u.second > u.first) || !(v.second > v.first)) throw ValueError("degenerate surface: empty rectangle");
    Surface s;
    s.dim = dim;
    s.u0 = u.first;
    s.u1 = u.second;
    s.v0 = v.first;
    s.v1 = v.second;
    s.map = [=](double a, double b) {
        Point p = base;
        p[axisU] = a;
        p[axisV] = b;
        return p;
    };
    s.tangents = [=](double, double) {
        Point tu{}, tv{};
        tu[axisU] = 1.0;
        tv[axisV] = 1.0;
        return std::pair{tu, tv};
    };
    return s;
}

Loop Loop::circle(int dim, const Point& center, double radius, int axisU, int axisV) {
    if (!(radius > 0.0)) throw ValueError("loop radius must be positive");
    Loop l;
    l.dim = dim;
    const double tau = 2.0 * std::numbers::pi;
    l.map = [=](double t) {
        Point p = center;
        p[axisU] += radius * std::cos(tau * t);
        p[axisV] += radius * std::sin(tau * t);
        return p;
    };
    l.tangent = [=](double t) {
        Point d{};
        d[axisU] = -tau * radius * std::sin(tau * t);
        d[axisV] = tau * radius * std::cos(tau * t);
        return d;
    };
    return l;
}

Loop Loop::rectangle(int dim, const Point& base, int axisU, std::pair<double, double> u, int axisV,
                     std::pair<double, double> v) {
    const double wu = u.second - u.first;
    const double wv = v.second - v.first;
    if (!(wu > 0.0) || !(wv > 0.0)) throw ValueError("rectangle loop must have positive sides");
    const double perim = 2.0 * (wu + wv);
    Loop l;
    l.dim = dim;
    // arc-length parametrisation, counter-clockwise from (u0, v0)
    auto locate = [=](double t) {
        double s = std::fmod(t, 1.0) * perim;
        if (s < 0) s += perim;
        Point p = base, d{};
        if (s < wu) {
            p[axisU] = u.first + s;
            p[axisV] = v.first;
            d[axisU] = perim;
        } else if (s < wu + wv) {
            p[axisU] = u.second;
            p[axisV] = v.first + (s - wu);
            d[axisV] = perim;
        } else if (s < 2 * wu + wv) {
            p[axisU] = u.second - (s - wu - wv);
            p[axisV] = v.second;
            d[axisU] = -perim;
        } else {
            p[axisU] = u.first;
            p[axisV] = v.second - (s - 2 * wu - wv);
            d[axisV] = -perim;
        }
        return std::pair{p, d};
    };
    l.map = [=](double t) { return locate(t).first; };
    l.tangent = [=](double t) { return locate(t).second; };
    return l;
}

namespace {

void requireInside(const FormEvaluator& form, const Point& p, const char* what) {
    if (form.domain && !form.domain->contains(p, 1e-12)) {
        throw DomainError(std::string(what) + " exits the grid");
    }
}

}  // namespace

std::vector<double> integrateOverSurface(const FormEvaluator& form, const Surface& surface, int samplesU,
                                         int samplesV) {
    if (form.degree != 2) throw DegreeError("surface integral needs a 2-form, got degree " + std::to_string(form.degree));
    if (surface.dim != form.dim) throw ValueError("surface and form dimensions differ");
    if (samplesU < 1 || samplesV < 1) throw ValueError("surface quadrature needs at least one sample per direction");
    const auto& basis = basisOf(form.dim, 2);
    const int comps = form.componentCount();
    const int slots = form.slotCount();
    std::vector<double> coeff(static_cast<std::size_t>(comps) * slots);
    std::vector<double> total(slots, 0.0);
    const double du = (surface.u1 - surface.u0) / samplesU;
    const double dv = (surface.v1 - surface.v0) / samplesV;
    double area = 0.0;
    for (int i = 0; i < samplesU; ++i) {
        const double u = surface.u0 + (i + 0.5) * du;
        std::vector<double> row(slots, 0.0);
        for (int j = 0; j < samplesV; ++j) {
            const double v = surface.v0 + (j + 0.5) * dv;
            const Point x = surface.map(u, v);
            requireInside(form, x, "surface");
            const auto [tu, tv] = surface.tangents(u, v);
            form.eval(x, coeff);
            double jac2 = 0.0;
            for (int c = 0; c < comps; ++c) {
                const int m = basis[c][0], n = basis[c][1];
                const double pull = tu[m] * tv[n] - tu[n] * tv[m];
                jac2 += pull * pull;
                for (int s = 0; s < slots; ++s) row[s] += coeff[static_cast<std::size_t>(s) * comps + c] * pull;
            }
            area += std::sqrt(jac2);
        }
        for (int s = 0; s < slots; ++s) total[s] += row[s];
    }
    if (!(area > 0.0)) throw ValueError("degenerate surface: zero area");
    for (double& t : total) t *= du * dv;
    return total;
}

std::vector<double> integrateOverSurface(const FormField& form, const Surface& surface, int samplesU, int samplesV) {
    return integrateOverSurface(interpolate(form), surface, samplesU, samplesV);
}

std::vector<double> integrateOverLoop(const FormEvaluator& form, const Loop& loop, int samples) {
    if (form.degree != 1) throw DegreeError("loop integral needs a 1-form, got degree " + std::to_string(form.degree));
    if (loop.dim != form.dim) throw ValueError("loop and form dimensions differ");
    if (samples < 1) throw ValueError("loop quadrature needs at least one sample");
    const Point start = loop.map(0.0);
    const Point end = loop.map(1.0);
    double gap = 0.0, scale = 1.0;
    for (int a = 0; a < form.dim; ++a) {
        gap = std::max(gap, std::abs(end[a] - start[a]));
        scale = std::max(scale, std::abs(start[a]));
    }
    if (gap > 1e-9 * scale) throw ValueError("loop integral over an open curve");
    const int comps = form.componentCount();
    const int slots = form.slotCount();
    std::vector<double> coeff(static_cast<std::size_t>(comps) * slots);
    std::vector<double> total(slots, 0.0);
    const double dt = 1.0 / samples;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) * dt;
        const Point x = loop.map(t);
        requireInside(form, x, "loop");
        const Point d = loop.tangent(t);
        form.eval(x, coeff);
        for (int s = 0; s < slots; ++s) {
            for (int c = 0; c < comps; ++c) total[s] += coeff[static_cast<std::size_t>(s) * comps + c] * d[c];
        }
    }
    for (double& t : total) t *= dt;
    return total;
}

std::vector<double> integrateOverLoop(const FormField& form, const Loop& loop, int samples) {
    return integrateOverLoop(interpolate(form), loop, samples);
}

Volume Volume::makeBox(std::pair<double, double> x, std::pair<double, double> y, std::pair<double, double> z) {
    Volume v;
    v.shape = Shape::Box;
    v.box = {x, y, z};
    for (const auto& [lo, hi] : v.box) {
        if (!(hi > lo)) throw ValueError("volume box must have positive extent on every axis");
    }
    return v;
}

Volume Volume::cube(const Point& center, double side) {
    const double h = 0.5 * side;
    return makeBox({center[0] - h, center[0] + h}, {center[1] - h, center[1] + h}, {center[2] - h, center[2] + h});
}

Volume Volume::tube(std::array<double, 2> axis, double radius, std::pair<double, double> z) {
    if (!(radius > 0.0) || !(z.second > z.first)) throw ValueError("tube needs positive radius and length");
    Volume v;
    v.shape = Shape::Tube;
    v.axis = axis;
    v.radius = radius;
    v.zRange = z;
    return v;
}

std::string Volume::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (shape == Shape::Box) {
        os << "box[" << box[0].first << "," << box[0].second << "]x[" << box[1].first << "," << box[1].second
           << "]x[" << box[2].first << "," << box[2].second << "]";
    } else {
        os << "tube(axis=(" << axis[0] << "," << axis[1] << "),r=" << radius << ",z=[" << zRange.first << ","
           << zRange.second << "])";
    }
    return os.str();
}

namespace {

std::vector<double> overlapWeights(const GridSpec& g, int axis, std::pair<double, double> range) {
    std::vector<double> w(g.resolution(axis), 0.0);
    const double h = g.spacing(axis);
    for (int i = 0; i < g.resolution(axis); ++i) {
        const double lo = g.lower(axis) + i * h;
        const double hi = lo + h;
        const double overlap = std::min(hi, range.second) - std::max(lo, range.first);
        if (overlap > 0.0) w[i] = overlap / h;
    }
    return w;
}

}  // namespace

std::vector<double> integrateOverVolume(const FormField& form, const Volume& volume) {
    const GridSpec& g = form.grid();
    if (g.dim() < 3) throw DegreeError("volume integrals need at least three dimensions");
    if (form.degree() != 3) throw DegreeError("volume integral needs a 3-form, got degree " + std::to_string(form.degree()));
    std::array<std::pair<double, double>, 3> bounds;
    if (volume.shape == Volume::Shape::Box) {
        bounds = volume.box;
    } else {
        bounds = {std::pair{volume.axis[0] - volume.radius, volume.axis[0] + volume.radius},
                  std::pair{volume.axis[1] - volume.radius, volume.axis[1] + volume.radius}, volume.zRange};
    }
    constexpr double slack = 1e-12;
    for (int a = 0; a < 3; ++a) {
        if (bounds[a].first < g.lower(a) - slack || bounds[a].second > g.upper(a) + slack) {
            throw DomainError("volume " + volume.describe() + " exits the grid");
        }
    }
    std::array<std::vector<double>, 3> w;
    for (int a = 0; a < 3; ++a) w[a] = overlapWeights(g, a, bounds[a]);

    // cross-section fraction for tubes
    std::vector<double> xy;
    if (volume.shape == Volume::Shape::Tube) {
        constexpr int sub = 8;
        xy.assign(static_cast<std::size_t>(g.resolution(0)) * g.resolution(1), 0.0);
        for (int i = 0; i < g.resolution(0); ++i) {
            if (w[0][i] == 0.0) continue;
            for (int j = 0; j < g.resolution(1); ++j) {
                if (w[1][j] == 0.0) continue;
                int inside = 0;
                for (int si = 0; si < sub; ++si) {
                    for (int sj = 0; sj < sub; ++sj) {
                        const double x = g.lower(0) + (i + (si + 0.5) / sub) * g.spacing(0) - volume.axis[0];
                        const double y = g.lower(1) + (j + (sj + 0.5) / sub) * g.spacing(1) - volume.axis[1];
                        if (x * x + y * y <= volume.radius * volume.radius) ++inside;
                    }
                }
                xy[static_cast<std::size_t>(i) * g.resolution(1) + j] = static_cast<double>(inside) / (sub * sub);
            }
        }
    }

    const int comp = basisIndex(g.dim(), {0, 1, 2});
    GridIndex fixed{};
    for (int a = 3; a < g.dim(); ++a) fixed[a] = g.resolution(a) / 2;
    const double cell = g.spacing(0) * g.spacing(1) * g.spacing(2);
    std::vector<double> total(form.slotCount(), 0.0);
    for (int s = 0; s < form.slotCount(); ++s) {
        const auto c = form.component(s, comp);
        double sum = 0.0;
        for (int i = 0; i < g.resolution(0); ++i) {
            for (int j = 0; j < g.resolution(1); ++j) {
                double wij = w[0][i] * w[1][j];
                if (volume.shape == Volume::Shape::Tube) wij = xy[static_cast<std::size_t>(i) * g.resolution(1) + j];
                if (wij == 0.0) continue;
                for (int k = 0; k < g.resolution(2); ++k) {
                    if (w[2][k] == 0.0) continue;
                    GridIndex idx = fixed;
                    idx[0] = i;
                    idx[1] = j;
                    idx[2] = k;
                    sum += wij * w[2][k] * c[g.flatten(idx)];
                }
            }
        }
        total[s] = sum * cell;
    }
    return total;
}

std::vector<double> integrateTopForm(const FormField& form) {
    if (form.degree() != form.dim()) throw DegreeError("integrateTopForm needs a top-degree form");
    std::vector<double> total(form.slotCount(), 0.0);
    for (int s = 0; s < form.slotCount(); ++s) {
        double sum = 0.0;
        for (double v : form.component(s, 0)) sum += v;
        total[s] = sum * form.grid().cellVolume();
    }
    return total;
}

}  // namespace cartan::forms
