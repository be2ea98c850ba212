#include "cartan/dynamics/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "cartan/defects/canonical.hpp"
#include "cartan/forms/operators.hpp"

namespace cartan::dynamics {

std::string toString(ForceLaw law) {
    return law == ForceLaw::CrossProduct ? "CrossProduct" : "DerivationConsistent";
}

void DislocationLine::validate() const {
    const std::size_t minNodes = closed ? 3 : 2;
    if (nodes.size() < minNodes) {
        throw ValueError("line '" + id + "' needs at least " + std::to_string(minNodes) + " nodes");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!isFinite(nodes[i])) throw ValueError("line '" + id + "' has a non-finite node");
        if (i > 0 && nodes[i] == nodes[i - 1]) throw ValueError("line '" + id + "' has repeated consecutive nodes");
    }
    if (closed && nodes.front() == nodes.back()) throw ValueError("closed line '" + id + "' repeats its first node");
    if (!isFinite(burgers) || norm(burgers) == 0.0) throw ValueError("line '" + id + "' needs a finite nonzero Burgers vector");
    if (!(mobility > 0.0) || !std::isfinite(mobility)) throw ValueError("line '" + id + "' needs a positive mobility");
}

Vec3 DislocationLine::tangent(std::size_t i) const {
    const std::size_t n = nodes.size();
    if (n < 2 || i >= n) throw ValueError("tangent index out of range on line '" + id + "'");
    std::size_t prev = i, next = i;
    if (closed) {
        prev = (i + n - 1) % n;
        next = (i + 1) % n;
    } else {
        prev = i == 0 ? 0 : i - 1;
        next = i + 1 == n ? i : i + 1;
    }
    const Vec3 d = nodes[next] - nodes[prev];
    const double len = norm(d);
    if (len == 0.0) throw ValueError("degenerate tangent on line '" + id + "'");
    return (1.0 / len) * d;
}

void DisclinationField::validate() const {
    for (const auto& d : lines) {
        if (!isFinite(d.frank) || !std::isfinite(d.axis[0]) || !std::isfinite(d.axis[1])) {
            throw ValueError("disclination with non-finite data");
        }
        if (!(d.coreRadius > 0.0)) throw ValueError("disclination core radius must be positive");
    }
}

Vec3 DisclinationField::localTheta(const Vec3& p) const {
    Vec3 theta{};
    for (const auto& d : lines) {
        const double dx = p[0] - d.axis[0], dy = p[1] - d.axis[1];
        const double w = 0.5 * std::exp(-(dx * dx + dy * dy) / (2.0 * d.coreRadius * d.coreRadius));
        theta = theta + w * d.frank;
    }
    return theta;
}

void DynamicsParams::validate() const {
    if (!std::isfinite(Gamma)) throw ValueError("Gamma must be finite");
    if (!(timeStep > 0.0) || !std::isfinite(timeStep)) throw ValueError("timeStep must be positive");
    if (steps < 0) throw ValueError("steps must be non-negative");
    for (const auto& [lo, hi] : domain) {
        if (!(hi > lo)) throw ValueError("empty dynamics domain");
    }
}

Vec3 magnusAxis(const Vec3& theta, const Vec3& b, const Vec3& tangent, ForceLaw law) {
    if (law == ForceLaw::CrossProduct) return cross(theta, b);
    return (dot(theta, tangent) * dot(b, tangent)) * tangent;
}

Vec3 magnusForce(const Vec3& theta, const Vec3& b, const Vec3& v, double Gamma, ForceLaw law, const Vec3& tangent) {
    return Gamma * cross(magnusAxis(theta, b, tangent, law), v);
}

Vec3 solveVelocity(const Vec3& fExt, const Vec3& axis, double Gamma, double mobility) {
    if (!(mobility > 0.0)) throw ValueError("mobility must be positive");
    const Vec3 s = (mobility * Gamma) * axis;
    const Vec3 u = mobility * fExt;
    const double det = 1.0 + dot(s, s);
    if (!std::isfinite(det)) throw ValueError("velocity system is singular or overflowed");
    const Vec3 v = (1.0 / det) * (u + cross(s, u) + dot(s, u) * s);
    if (!isFinite(v)) throw ValueError("velocity solve produced a non-finite result");
    return v;
}

double transversality(const Vec3& f, const Vec3& v) {
    constexpr double tiny = std::numeric_limits<double>::min();
    return std::abs(dot(f, v)) / (norm(f) * norm(v) + tiny);
}

namespace {

bool inside(const DynamicsParams& p, const Vec3& x) {
    for (int a = 0; a < 3; ++a) {
        if (x[a] < p.domain[a].first || x[a] > p.domain[a].second) return false;
    }
    return true;
}

double minExtent(const DynamicsParams& p) {
    double m = INFINITY;
    for (const auto& [lo, hi] : p.domain) m = std::min(m, hi - lo);
    return m;
}

// Splits a line at exited nodes; pieces shorter than two nodes are dropped.
std::vector<DislocationLine> clip(const DislocationLine& line, const std::vector<bool>& keep) {
    const std::size_t n = line.nodes.size();
    std::vector<std::vector<Vec3>> runs;
    std::size_t start = 0;
    if (line.closed) {
        // rotate so the walk starts just after an exited node
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep[i]) {
                start = (i + 1) % n;
                break;
            }
        }
    }
    std::vector<Vec3> cur;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = (start + k) % n;
        if (keep[i]) {
            cur.push_back(line.nodes[i]);
        } else if (!cur.empty()) {
            runs.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) runs.push_back(std::move(cur));

    std::vector<DislocationLine> out;
    for (auto& r : runs) {
        if (r.size() < 2) continue;
        DislocationLine piece = line;
        piece.closed = false;
        piece.nodes = std::move(r);
        piece.id = out.empty() ? line.id : line.id + "#" + std::to_string(out.size());
        out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace

StepReport stepLines(std::vector<DislocationLine>& lines, const DisclinationField& disclinations,
                     const DynamicsParams& params, int step) {
    params.validate();
    StepReport report;
    const double bound = 0.1 * minExtent(params);
    std::vector<std::vector<Vec3>> velocities(lines.size());

    for (std::size_t l = 0; l < lines.size(); ++l) {
        const DislocationLine& line = lines[l];
        line.validate();
        velocities[l].resize(line.nodes.size());
        for (std::size_t i = 0; i < line.nodes.size(); ++i) {
            const Vec3& x = line.nodes[i];
            const Vec3 t = line.tangent(i);
            const Vec3 fExt = params.externalForce.at(x);
            if (params.timeStep * line.mobility * norm(fExt) > bound) {
                throw ValueError("time step too large: dt*M*|F| exceeds a tenth of the domain extent on line '" +
                                 line.id + "'");
            }
            const Vec3 w = magnusAxis(disclinations.localTheta(x), line.burgers, t, params.law);
            const Vec3 v = solveVelocity(fExt, w, params.Gamma, line.mobility);
            const Vec3 fm = params.Gamma * cross(w, v);
            velocities[l][i] = v;
            NodeDiagnostic d;
            d.step = step;
            d.lineId = line.id;
            d.node = static_cast<int>(i);
            d.position = x;
            d.velocity = v;
            d.fExt = fExt;
            d.fMagnus = fm;
            d.transversality = transversality(fm, v);
            report.nodes.push_back(std::move(d));
        }
    }

    std::vector<DislocationLine> next;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        DislocationLine& line = lines[l];
        std::vector<bool> keep(line.nodes.size());
        int removed = 0;
        for (std::size_t i = 0; i < line.nodes.size(); ++i) {
            line.nodes[i] = line.nodes[i] + params.timeStep * velocities[l][i];
            keep[i] = inside(params, line.nodes[i]);
            removed += keep[i] ? 0 : 1;
        }
        if (removed == 0) {
            next.push_back(std::move(line));
            continue;
        }
        ClipEvent ev;
        ev.step = step;
        ev.lineId = line.id;
        ev.nodesRemoved = removed;
        for (auto& piece : clip(line, keep)) {
            ev.survivors.push_back(piece.id);
            next.push_back(std::move(piece));
        }
        report.clips.push_back(std::move(ev));
    }
    lines = std::move(next);
    return report;
}

TransportResidual transportResidual(const DislocationLine& line, const forms::GridSpec& grid, const Vec3& velocity,
                                    double coreRadius, double dt) {
    line.validate();
    if (grid.dim() != 3) throw ValueError("transport residual is evaluated on a 3D grid");
    if (!(dt > 0.0)) throw ValueError("dt must be positive");
    const Vec3 zhat{0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < line.nodes.size(); ++i) {
        if (std::abs(std::abs(dot(line.tangent(i), zhat)) - 1.0) > 1e-12) {
            throw ValueError("transport residual needs a straight line parallel to z");
        }
    }
    const Vec3 t = line.tangent(0);
    const double bPar = dot(line.burgers, t);
    const Vec3 vPerp = velocity - dot(velocity, t) * t;

    auto starTorsion = [&](double shift) {
        defects::DefectSpec s;
        s.kind = defects::DefectKind::Screw;
        s.axisPoint = {line.nodes[0][0] + shift * vPerp[0], line.nodes[0][1] + shift * vPerp[1]};
        s.charge = bPar;
        s.coreRadius = coreRadius;
        const defects::DefectConfiguration cfg{{s}, grid, {}};
        cfg.validate();
        const auto e = defects::buildCoframe(cfg);
        const auto omega = defects::buildConnection(cfg);
        return forms::hodgeStar(defects::torsion(e, omega));
    };

    TransportResidual r{(1.0 / dt) * (starTorsion(dt) - starTorsion(0.0))};
    // t̂ component: frame leg 3 along dz
    const auto comp = r.rate.component(2, 2);
    double peak = 0.0;
    for (double v : comp) peak = std::max(peak, std::abs(v));
    r.peakRate = peak * std::abs(t[2]);
    r.estimate = std::abs(bPar) * norm(vPerp) / (std::numbers::pi * coreRadius * coreRadius);
    if (r.estimate == 0.0) {
        r.relativeDiscrepancy = r.peakRate == 0.0 ? 0.0 : INFINITY;
    } else {
        r.relativeDiscrepancy = std::abs(r.peakRate - r.estimate) / r.estimate;
    }
    return r;
}

void writeTrajectoryHeader(std::ostream& os) {
    os << "step,line_id,node,x,y,z,vx,vy,vz,fext_x,fext_y,fext_z,fmag_x,fmag_y,fmag_z,transversality\n";
}

void writeTrajectoryRows(std::ostream& os, const std::vector<NodeDiagnostic>& rows) {
    const auto old = os.precision(17);
    for (const auto& d : rows) {
        os << d.step << ',' << d.lineId << ',' << d.node;
        for (const Vec3* v : {&d.position, &d.velocity, &d.fExt, &d.fMagnus}) {
            for (double c : *v) os << ',' << c;
        }
        os << ',' << d.transversality << '\n';
    }
    os.precision(old);
}

}  // namespace cartan::dynamics
