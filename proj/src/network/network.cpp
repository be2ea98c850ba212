#include "cartan/network/network.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "cartan/forms/operators.hpp"

namespace cartan::network {

using dynamics::norm;
using dynamics::operator+;
using dynamics::operator-;
using dynamics::operator*;
using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

forms::Point point(const Vec3& v) { return {v[0], v[1], v[2], 0.0}; }

}  // namespace

json toJson(const DefectNetwork& n) {
    json j{{"coreRadius", n.coreRadius},
           {"junctions", json::array()},
           {"dislocationEdges", json::array()},
           {"disclinationEdges", json::array()}};
    for (const auto& x : n.junctions) {
        json r{{"id", x.id}, {"position", vec(x.position)}};
        if (x.volumeSide) r["volumeSide"] = *x.volumeSide;
        j["junctions"].push_back(std::move(r));
    }
    for (const auto& d : n.dislocationEdges) {
        j["dislocationEdges"].push_back({{"from", d.from}, {"to", d.to}, {"burgers", vec(d.burgers)}});
    }
    for (const auto& d : n.disclinationEdges) {
        j["disclinationEdges"].push_back({{"from", d.from}, {"to", d.to}, {"frank", vec(d.frank)}});
    }
    return j;
}

DefectNetwork networkFromLines(const std::vector<DislocationLine>& lines,
                               const dynamics::DisclinationField& disclinations, double coreRadius) {
    DefectNetwork n;
    n.coreRadius = coreRadius;
    for (const auto& l : lines) {
        if (l.closed) {
            const std::string j = l.id + ":loop";
            n.junctions.push_back({j, l.nodes.front(), std::nullopt});
            n.dislocationEdges.push_back({j, j, l.burgers});
        } else {
            n.dislocationEdges.push_back({kBoundary, kBoundary, l.burgers});
        }
    }
    for (const auto& d : disclinations.lines) n.disclinationEdges.push_back({kBoundary, kBoundary, d.frank});
    return n;
}

Vec3 curvatureScreenedFlux(const FormField& R, const Coframe& e, const forms::Volume& volume) {
    if (R.grid() != e.grid()) throw GridMismatchError("curvature and coframe live on different grids");
    const FormField Re = forms::wedge(R, e.form(), forms::FramePairing::MatrixVector);
    const auto integral = forms::integrateOverVolume(Re, volume);
    Vec3 db{};
    for (std::size_t a = 0; a < 3 && a < integral.size(); ++a) db[a] = -integral[a];
    return db;
}

json toJson(const ReconnectionEvent& ev) {
    json in = json::array(), out = json::array();
    for (const auto& b : ev.incoming) in.push_back(vec(b));
    for (const auto& b : ev.outgoing) out.push_back(vec(b));
    return {{"step", ev.step},
            {"type", ev.annihilation ? "annihilation" : "merge"},
            {"lines", ev.lineIds},
            {"incoming", in},
            {"outgoing", out},
            {"deltaB", vec(ev.deltaB)},
            {"contact", vec(ev.contact)},
            {"volume", ev.enclosedVolume}};
}

Vec3 reconnect(const Vec3& b1, const Vec3& b2, const Vec3& deltaB) { return (b1 + b2) + deltaB; }

ReconnectionEvent reconnectEvent(const Vec3& b1, const Vec3& b2, const Vec3& deltaB, std::string volume, int step) {
    ReconnectionEvent ev;
    ev.step = step;
    ev.incoming = {b1, b2};
    ev.deltaB = deltaB;
    ev.enclosedVolume = std::move(volume);
    const Vec3 bf = reconnect(b1, b2, deltaB);
    ev.annihilation = norm(bf) <= kAnnihilationTolerance;
    if (!ev.annihilation) ev.outgoing = {bf};
    return ev;
}

std::vector<Violation> structuralViolations(const DefectNetwork& n) {
    std::map<std::string, int> degree;
    for (const auto& j : n.junctions) degree[j.id] = 0;
    std::vector<Violation> out;
    for (const auto& d : n.disclinationEdges) {
        for (const std::string* end : {&d.from, &d.to}) {
            if (*end == kBoundary) continue;
            auto it = degree.find(*end);
            if (it == degree.end()) {
                out.push_back({Violation::Kind::Structural, *end, {}, 0.0,
                               "disclination edge ends at unknown junction '" + *end + "'"});
                continue;
            }
            ++it->second;
        }
    }
    for (const auto& [id, k] : degree) {
        if (k == 1) {
            out.push_back({Violation::Kind::Structural, id, {}, 0.0,
                           "disclination line has a free endpoint at junction '" + id + "'"});
        }
    }
    return out;
}

namespace {

std::vector<Violation> balance(const DefectNetwork& n, const FormField* R, const Coframe* e) {
    std::vector<Violation> out = structuralViolations(n);
    for (const auto& j : n.junctions) {
        Vec3 sum{};
        for (const auto& d : n.dislocationEdges) {
            if (d.to == j.id) sum = sum + d.burgers;
            if (d.from == j.id) sum = sum - d.burgers;
        }
        // imbalance = Σin - Σout - ∫R∧e = Σin - Σout + Δb
        if (R && e) {
            const double side = j.volumeSide.value_or(10.0 * n.coreRadius);
            sum = sum + curvatureScreenedFlux(*R, *e, forms::Volume::cube(point(j.position), side));
        }
        const double mag = norm(sum);
        if (mag > kJunctionTolerance) {
            out.push_back({Violation::Kind::Balance, j.id, sum, mag, "Burgers flux does not balance at '" + j.id + "'"});
        }
    }
    return out;
}

}  // namespace

std::vector<Violation> checkJunctionBalance(const DefectNetwork& n, const FormField& R, const Coframe& e) {
    return balance(n, &R, &e);
}

std::vector<Violation> checkJunctionBalance(const DefectNetwork& n) { return balance(n, nullptr, nullptr); }

ChargeLedger ChargeLedger::start(const std::vector<DislocationLine>& lines) {
    ChargeLedger l;
    for (const auto& x : lines) l.initial = l.initial + x.burgers;
    return l;
}

void ChargeLedger::record(const ReconnectionEvent& ev) { screened = screened - ev.deltaB; }

void ChargeLedger::recordClip(const Vec3& burgers, int pieces) {
    boundary = boundary + static_cast<double>(pieces - 1) * burgers;
}

Vec3 ChargeLedger::total(const std::vector<DislocationLine>& lines) const {
    Vec3 sum{};
    for (const auto& x : lines) sum = sum + x.burgers;
    return (sum - boundary) + screened;
}

double ChargeLedger::drift(const std::vector<DislocationLine>& lines) const { return norm(total(lines) - initial); }

json toJson(const ChargeLedger& ledger, const std::vector<DislocationLine>& lines) {
    Vec3 sum{};
    for (const auto& x : lines) sum = sum + x.burgers;
    return {{"lineTotal", vec(sum)},      {"screened", vec(ledger.screened)}, {"boundary", vec(ledger.boundary)},
            {"initial", vec(ledger.initial)}, {"total", vec(ledger.total(lines))}, {"drift", ledger.drift(lines)}};
}

namespace {

// Drops consecutive duplicates, then one (1/4, 1/2, 1/4) pass on interior nodes.
std::vector<Vec3> tidy(std::vector<Vec3> nodes) {
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.size() < 3) return nodes;
    std::vector<Vec3> out = nodes;
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        out[i] = 0.25 * nodes[i - 1] + 0.5 * nodes[i] + 0.25 * nodes[i + 1];
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// first[0..i) + contact + second(j..]
std::vector<Vec3> splice(const std::vector<Vec3>& first, std::size_t i, const Vec3& contact,
                         const std::vector<Vec3>& second, std::size_t j) {
    std::vector<Vec3> out(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(contact);
    out.insert(out.end(), second.begin() + static_cast<std::ptrdiff_t>(j) + 1, second.end());
    return out;
}

forms::Volume trimmedCube(const Vec3& c, double side, const forms::GridSpec& g) {
    std::array<std::pair<double, double>, 3> r;
    for (int a = 0; a < 3; ++a) {
        r[a] = {std::max(c[a] - 0.5 * side, g.lower(a)), std::min(c[a] + 0.5 * side, g.upper(a))};
        if (r[a].second < r[a].first) r[a].second = r[a].first;
    }
    return forms::Volume::makeBox(r[0], r[1], r[2]);
}

}  // namespace

std::vector<ReconnectionEvent> detectAndReconnect(std::vector<DislocationLine>& lines, double threshold,
                                                  const ScreeningFields& fields, int step) {
    if (!(threshold > 0.0)) throw ValueError("reconnection threshold must be positive");
    std::vector<ReconnectionEvent> events;
    for (;;) {
        std::stable_sort(lines.begin(), lines.end(),
                         [](const DislocationLine& a, const DislocationLine& b) { return a.id < b.id; });
        bool found = false;
        std::size_t li = 0, lj = 0, ni = 0, nj = 0;
        for (std::size_t a = 0; a < lines.size() && !found; ++a) {
            for (std::size_t i = 0; i < lines[a].nodes.size() && !found; ++i) {
                for (std::size_t b = a + 1; b < lines.size() && !found; ++b) {
                    for (std::size_t j = 0; j < lines[b].nodes.size(); ++j) {
                        if (norm(lines[a].nodes[i] - lines[b].nodes[j]) <= threshold) {
                            std::tie(li, ni, lj, nj) = std::tuple{a, i, b, j};
                            found = true;
                            break;
                        }
                    }
                }
            }
        }
        if (!found) break;

        const DislocationLine& l1 = lines[li];
        const DislocationLine& l2 = lines[lj];
        const Vec3 contact = 0.5 * (l1.nodes[ni] + l2.nodes[nj]);
        Vec3 db{};
        std::string volume = "none";
        if (fields.R && fields.e) {
            const forms::Volume v = trimmedCube(contact, 2.0 * threshold, fields.R->grid());
            volume = v.describe();
            db = curvatureScreenedFlux(*fields.R, *fields.e, v);
        }
        ReconnectionEvent ev = reconnectEvent(l1.burgers, l2.burgers, db, volume, step);
        ev.lineIds = {l1.id, l2.id};
        ev.contact = contact;

        std::vector<DislocationLine> next;
        if (!ev.annihilation) {
            auto a = splice(l1.nodes, ni, contact, l2.nodes, nj);
            auto b = splice(l2.nodes, nj, contact, l1.nodes, ni);
            DislocationLine merged;
            merged.id = l1.id + "+" + l2.id;
            merged.burgers = ev.outgoing.front();
            merged.mobility = l1.mobility;
            merged.nodes = tidy(a.size() >= b.size() ? std::move(a) : std::move(b));
            if (merged.nodes.size() >= 2) next.push_back(std::move(merged));
        }
        for (std::size_t k = 0; k < lines.size(); ++k) {
            if (k != li && k != lj) next.push_back(std::move(lines[k]));
        }
        lines = std::move(next);
        events.push_back(std::move(ev));
    }
    return events;
}

json snapshot(const std::vector<DislocationLine>& lines, const DefectNetwork& network, const ChargeLedger& ledger,
              int step) {
    json ls = json::array();
    for (const auto& l : lines) {
        json nodes = json::array();
        for (const auto& x : l.nodes) nodes.push_back(vec(x));
        ls.push_back({{"id", l.id},
                      {"burgers", vec(l.burgers)},
                      {"closed", l.closed},
                      {"mobility", l.mobility},
                      {"nodes", std::move(nodes)}});
    }
    return {{"step", step}, {"lines", ls}, {"network", toJson(network)}, {"charges", toJson(ledger, lines)}};
}

}  // namespace cartan::network
