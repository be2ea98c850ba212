#include "cartan/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cartan/forms/io.hpp"
#include "cartan/forms/operators.hpp"
#include "cartan/network/network.hpp"

namespace cartan::cli {

using nlohmann::json;
using dynamics::Vec3;
using dynamics::operator+;
using dynamics::operator-;
using dynamics::operator*;
using forms::FormField;
using forms::GridSpec;
using forms::Point;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kChargeTolerance = 1e-3;

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

bool wants(const Scenario& s, const std::string& product) {
    return s.outputs.empty() || std::find(s.outputs.begin(), s.outputs.end(), product) != s.outputs.end();
}

std::ofstream openOut(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    return os;
}

void writeJson(const fs::path& p, const json& j) {
    auto os = openOut(p);
    os << j.dump(2) << '\n';
}

void prepare(const Scenario& s, const RunOptions& opt) {
    fs::create_directories(opt.out);
    writeJson(opt.out / "scenario.json", toJson(s));
}

Point centre(const GridSpec& g, std::array<double, 2> axis) {
    Point p{axis[0], axis[1], 0.0, 0.0};
    for (int a = 2; a < g.dim(); ++a) p[a] = 0.5 * (g.lower(a) + g.upper(a));
    return p;
}

bool coaxial(const defects::DefectSpec& a, const defects::DefectSpec& b) {
    return std::hypot(a.axisPoint[0] - b.axisPoint[0], a.axisPoint[1] - b.axisPoint[1]) <= 1e-12;
}

Vec3 first3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

struct Fields {
    forms::Coframe e;
    forms::ConnectionField omega;
    FormField T;
    FormField R;
};

Fields buildFields(const defects::DefectConfiguration& cfg) {
    auto e = defects::buildCoframe(cfg);
    auto w = defects::buildConnection(cfg);
    FormField T = defects::torsion(e, w);
    FormField R = defects::curvature(w);
    return {std::move(e), std::move(w), std::move(T), std::move(R)};
}

// Expected disk charges around defect i, summing coaxial cores.
std::pair<Vec3, Vec3> expectedCharges(const Scenario& s, std::size_t i) {
    Vec3 b{}, frank{};
    for (const auto& d : s.config.defects) {
        if (!coaxial(d, s.config.defects[i])) continue;
        b = operator+(b, d.burgers());
        frank = operator+(frank, kTwoPi * d.frank());
    }
    return {b, frank};
}

json chargeRecords(const Scenario& s, const Fields& f) {
    const GridSpec& g = s.config.grid;
    json out = json::array();
    for (std::size_t i = 0; i < s.config.defects.size(); ++i) {
        const auto& d = s.config.defects[i];
        const double r = s.chargeRadiusFor(i);
        const Point c = centre(g, d.axisPoint);
        const auto disk = forms::Surface::disk(g.dim(), c, r);
        const Vec3 b = first3(defects::burgersVector(f.T, disk));
        const auto frank = defects::frankVector(f.R, disk);
        json loops = json::array();
        for (double rr : {r / 3.0, 2.0 * r / 3.0, r}) {
            const auto h = forms::integrateOverLoop(f.e.form(), forms::Loop::circle(g.dim(), c, rr));
            loops.push_back({{"radius", rr}, {"holonomy", vec(first3(h))}});
        }
        const auto [eb, ef] = expectedCharges(s, i);
        out.push_back({{"index", i},
                       {"kind", defects::toString(d.kind)},
                       {"axis", d.axisPoint},
                       {"coreRadius", d.coreRadius},
                       {"diskRadius", r},
                       {"burgers", vec(b)},
                       {"expectedBurgers", vec(eb)},
                       {"frank", vec(frank.axial)},
                       {"expectedFrank", vec(ef)},
                       {"loops", loops}});
    }
    return out;
}

double distance(const Vec3& a, const Vec3& b) { return dynamics::norm(operator-(a, b)); }

Vec3 fromJson(const json& j) { return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}; }

// Coframe and connection profiles along a ray from each edge or wedge core, from the closed forms.
void writeProfiles(const Scenario& s, const fs::path& dir) {
    const auto& g = s.config.grid;
    const auto eEval = defects::coframeEvaluator(s.config);
    const auto wEval = defects::connectionEvaluator(s.config);
    const int n = g.dim();
    auto edge = openOut(dir / "edge_profile.csv");
    edge << "defect,r,x,y,e1_x,e1_y,e2_x,e2_y,magnitude,r_times_magnitude\n";
    auto wedge = openOut(dir / "wedge_profile.csv");
    wedge << "defect,r,x,y,omega12_x,omega12_y,circulation\n";
    for (std::size_t i = 0; i < s.config.defects.size(); ++i) {
        const auto& d = s.config.defects[i];
        if (d.kind == defects::DefectKind::Screw) continue;
        // ray normal to the edge Burgers direction; along +x for wedges
        const std::array<double, 2> dir = d.kind == defects::DefectKind::Edge
                                              ? std::array<double, 2>{-d.burgersDirection[1], d.burgersDirection[0]}
                                              : std::array<double, 2>{1.0, 0.0};
        double reach = INFINITY;
        for (int a = 0; a < 2; ++a) {
            if (dir[a] > 1e-12) reach = std::min(reach, (g.upper(a) - d.axisPoint[a]) / dir[a]);
            if (dir[a] < -1e-12) reach = std::min(reach, (g.lower(a) - d.axisPoint[a]) / dir[a]);
        }
        reach *= 0.95;
        const int samples = 64;
        for (int k = 0; k < samples; ++k) {
            const double r = d.coreRadius * 2.0 + (reach - 2.0 * d.coreRadius) * k / (samples - 1);
            Point p = centre(g, d.axisPoint);
            p[0] += r * dir[0];
            p[1] += r * dir[1];
            if (d.kind == defects::DefectKind::Edge) {
                std::vector<double> e(static_cast<std::size_t>(n * n));
                eEval.eval(p, e);
                const double e1x = e[0] - 1.0, e1y = e[1], e2x = e[n], e2y = e[n + 1] - 1.0;
                const double mag = std::sqrt(e1x * e1x + e1y * e1y + e2x * e2x + e2y * e2y);
                edge << i << ',' << r << ',' << p[0] << ',' << p[1] << ',' << e1x << ',' << e1y << ',' << e2x << ','
                     << e2y << ',' << mag << ',' << r * mag << '\n';
            } else {
                std::vector<double> w(static_cast<std::size_t>(n * (n - 1) / 2 * n));
                wEval.eval(p, w);
                // slot 0 holds ω²₁ = -ω¹₂
                const double wx = -w[0], wy = -w[1];
                const double circ = (-(p[1] - d.axisPoint[1]) * wx + (p[0] - d.axisPoint[0]) * wy);
                wedge << i << ',' << r << ',' << p[0] << ',' << p[1] << ',' << wx << ',' << wy << ',' << circ << '\n';
            }
        }
    }
}

}  // namespace

std::vector<std::string> resolutionWarnings(const Scenario& s) {
    std::vector<std::string> w;
    const auto& g = s.config.grid;
    const double eps = s.minCoreRadius();
    for (int a = 0; a < 2; ++a) {
        if (g.resolution(a) < 16) {
            w.push_back("quadrature under-resolved: axis " + std::to_string(a) + " has only " +
                        std::to_string(g.resolution(a)) + " cells");
        }
        if (!s.config.defects.empty() && g.spacing(a) > 0.5 * eps) {
            std::ostringstream os;
            os << "core under-resolved: spacing " << g.spacing(a) << " on axis " << a << " exceeds half the core radius "
               << eps;
            w.push_back(os.str());
        }
    }
    return w;
}

void cmdFields(const Scenario& s, const RunOptions& opt) {
    prepare(s, opt);
    const Fields f = buildFields(s.config);
    const FormField pert = defects::coframePerturbation(f.e);
    if (wants(s, "fields")) {
        const std::pair<const char*, const FormField*> items[] = {
            {"torsion", &f.T}, {"curvature", &f.R}, {"coframe_perturbation", &pert}, {"connection", &f.omega.form()}};
        for (const auto& [name, field] : items) {
            forms::writeField(opt.out / (std::string(name) + ".cfld"), *field);
            auto os = openOut(opt.out / (std::string(name) + ".csv"));
            forms::writeFieldCsv(os, *field);
        }
        writeProfiles(s, opt.out);
    }

    // where each frame component of T and R peaks
    json peaks = json::array();
    const GridSpec& g = s.config.grid;
    auto peakOf = [&](const char* name, const FormField& F) {
        for (int slot = 0; slot < F.slotCount(); ++slot) {
            double best = 0.0;
            std::size_t at = 0;
            for (int c = 0; c < F.componentCount(); ++c) {
                const auto comp = F.component(slot, c);
                for (std::size_t p = 0; p < comp.size(); ++p) {
                    if (std::abs(comp[p]) > best) {
                        best = std::abs(comp[p]);
                        at = p;
                    }
                }
            }
            if (best == 0.0) continue;
            const Point x = g.point(at);
            peaks.push_back({{"field", name}, {"slot", slot}, {"max", best}, {"at", {x[0], x[1]}}});
        }
    };
    peakOf("torsion", f.T);
    peakOf("curvature", f.R);
    json summary{{"scenario", s.name}, {"resolution", g.resolutions()}, {"peaks", peaks}};
    if (wants(s, "charges")) summary["charges"] = chargeRecords(s, f);
    writeJson(opt.out / "fields.json", summary);
}

json cmdCharges(const Scenario& s, const RunOptions& opt) {
    prepare(s, opt);
    const Fields f = buildFields(s.config);
    json report{{"scenario", s.name},
                {"resolution", s.config.grid.resolutions()},
                {"warnings", resolutionWarnings(s)},
                {"defects", chargeRecords(s, f)}};
    writeJson(opt.out / "charges.json", report);
    return report;
}

json cmdVerify(const Scenario& s, const RunOptions& opt) {
    prepare(s, opt);
    using theory::InteriorRegion;
    const auto& cfg = s.config;
    const GridSpec coarse = cfg.grid;
    const GridSpec fine = coarse.refined(2, {0, 1});
    const double margin = 2.0 * std::max(coarse.spacing(0), coarse.spacing(1));
    json checks = json::array();
    json convergence = json::array();
    json diagnostics = json::object();
    bool pass = true;
    auto addCheck = [&](json c) {
        pass = pass && c["pass"].get<bool>();
        checks.push_back(std::move(c));
    };
    auto addStudy = [&](const theory::Convergence& c) {
        pass = pass && c.pass;
        convergence.push_back(theory::toJson(c));
    };

    // charges at the scenario resolution
    const Fields f = buildFields(cfg);
    const json charges = chargeRecords(s, f);
    for (const auto& c : charges) {
        const Vec3 b = fromJson(c["burgers"]), eb = fromJson(c["expectedBurgers"]);
        const Vec3 fr = fromJson(c["frank"]), ef = fromJson(c["expectedFrank"]);
        const double tolB = kChargeTolerance * std::max(1.0, dynamics::norm(eb));
        const double tolF = kChargeTolerance * std::max(1.0, dynamics::norm(ef));
        addCheck({{"name", "charge[" + std::to_string(c["index"].get<int>()) + "]"},
                  {"burgersError", distance(b, eb)},
                  {"frankError", distance(fr, ef)},
                  {"tolerance", {tolB, tolF}},
                  {"pass", distance(b, eb) <= tolB && distance(fr, ef) <= tolF}});
    }

    // Bianchi identities, canonical fields and a generic probe
    {
        auto region = [&](const defects::DefectConfiguration& c) { return InteriorRegion::around(c, margin, 5.0); };
        const auto bc = theory::bianchiResiduals(f.e, f.omega, region(cfg));
        defects::DefectConfiguration fcfg{cfg.defects, fine, cfg.distortion};
        const Fields ff = buildFields(fcfg);
        const auto bf = theory::bianchiResiduals(ff.e, ff.omega, region(fcfg));
        addStudy(theory::convergence("bianchi_DR", bc.curvature.l2Norm, bf.curvature.l2Norm, 3.0, 5.0));
        addStudy(theory::convergence("bianchi_DT_minus_Re", bc.torsion.l2Norm, bf.torsion.l2Norm, 3.0, 5.0));
        const auto [pe, pw] = theory::smoothProbe(coarse);
        const auto [qe, qw] = theory::smoothProbe(fine);
        const InteriorRegion plain{margin, {}};
        const auto pc = theory::bianchiResiduals(pe, pw, plain);
        const auto pf = theory::bianchiResiduals(qe, qw, plain);
        addStudy(theory::convergence("bianchi_DR_probe", pc.curvature.l2Norm, pf.curvature.l2Norm, 3.0, 5.0));
        addStudy(theory::convergence("bianchi_DT_minus_Re_probe", pc.torsion.l2Norm, pf.torsion.l2Norm, 3.0, 5.0));
    }

    // U(1) sources
    {
        const auto u = theory::u1Sources(f.e, f.omega, s.couplings);
        diagnostics["J2StructurallyZero"] = u.J2StructurallyZero;
        diagnostics["dJ1StructurallyZero"] = u.dJ1.structurallyZero;
        const bool flat = std::all_of(cfg.distortion.begin(), cfg.distortion.end(), [](const auto& row) {
            return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
        });
        const double z0 = coarse.lower(2) + 0.25 * coarse.length(2), z1 = coarse.upper(2) - 0.25 * coarse.length(2);
        for (std::size_t i = 0; i < cfg.defects.size(); ++i) {
            const auto& d = cfg.defects[i];
            if (d.kind != defects::DefectKind::Screw || !flat) continue;
            double screws = 0.0;
            for (const auto& o : cfg.defects) {
                if (o.kind == defects::DefectKind::Screw && coaxial(o, d)) screws += o.charge;
            }
            const double r = s.chargeRadiusFor(i);
            const double got = theory::u1FluxBalance(u.J1, forms::Volume::tube(d.axisPoint, r, {z0, z1}));
            const double want = s.couplings.kappaU1 * screws * (z1 - z0);
            const double tol = kChargeTolerance * std::max(1.0, std::abs(want));
            addCheck({{"name", "u1_flux[" + std::to_string(i) + "]"},
                      {"value", got},
                      {"expected", want},
                      {"tolerance", tol},
                      {"pass", std::abs(got - want) <= tol}});
        }
        if (coarse.dim() == 3) {
            addCheck({{"name", "J2_zero_in_3d"}, {"pass", u.J2StructurallyZero && u.J2.maxAbs() == 0.0}});
        }
    }

    // 4D: field equations, dJ1, mixed action term
    {
        const defects::DefectConfiguration c4 = cfg.grid.dim() == 4 ? cfg : cfg.embedded4D();
        const GridSpec g4f = c4.grid;
        std::vector<int> half = g4f.resolutions();
        for (int a = 0; a < 2; ++a) half[a] = std::max(4, half[a] / 2);
        const GridSpec g4c(4, g4f.extents(), half);
        const double m4 = 2.0 * std::max(g4c.spacing(0), g4c.spacing(1));
        json el = json::array();
        double dj[2] = {0, 0}, probe[2] = {0, 0};
        int k = 0;
        for (const GridSpec& g : {g4c, g4f}) {
            const defects::DefectConfiguration cc{c4.defects, g, c4.distortion};
            const auto region = InteriorRegion::around(cc, m4, 8.0);
            const auto e = defects::buildCoframe(cc);
            const auto w = defects::buildConnection(cc);
            const auto rc = theory::elCoframeResidual(e, w, s.couplings, region);
            const auto rw = theory::elConnectionResidual(e, w, s.couplings, region);
            const auto u = theory::u1Sources(e, w, s.couplings, region);
            dj[k] = u.dJ1.l2Norm;
            const auto pe = theory::closedSourceProbe(g);
            probe[k] = theory::u1Sources(pe, forms::ConnectionField::zero(g), s.couplings, InteriorRegion{m4, {}})
                           .dJ1.l2Norm;
            const auto action = theory::actionDensity(e, w, s.couplings);
            el.push_back({{"resolution", g.resolutions()},
                          {"el_coframe", rc.l2Norm},
                          {"el_connection", rw.l2Norm},
                          {"torsionAction", action.torsionAction},
                          {"curvatureAction", action.curvatureAction},
                          {"mixedAction", action.mixedAction}});
            ++k;
        }
        diagnostics["fieldEquations4D"] = el;
        addStudy(theory::convergence("dJ1_4d", dj[0], dj[1], 3.0, 5.0));
        addStudy(theory::convergence("dJ1_probe_4d", probe[0], probe[1], 3.0, 5.0));
    }

    {
        const auto a = theory::actionDensity(f.e, f.omega, s.couplings);
        diagnostics["action"] = {{"torsion", a.torsionAction},
                                 {"curvature", a.curvatureAction},
                                 {"mixed", a.mixedAction},
                                 {"total", a.action},
                                 {"mixedStructurallyZero", a.mixedStructurallyZero}};
    }

    json report{{"scenario", s.name},
                {"resolution", {{"coarse", coarse.resolutions()}, {"fine", fine.resolutions()}}},
                {"couplings", theory::toJson(s.couplings)},
                {"warnings", resolutionWarnings(s)},
                {"charges", charges},
                {"checks", checks},
                {"convergence", convergence},
                {"diagnostics", diagnostics},
                {"pass", pass}};
    writeJson(opt.out / "verify.json", report);
    return report;
}

json cmdSimulate(const Scenario& s, const RunOptions& opt) {
    if (!s.dynamics) throw ConfigError("$.dynamics", "simulate needs a dynamics block");
    prepare(s, opt);
    const DynamicsBlock& dyn = *s.dynamics;
    const auto& p = dyn.params;
    std::vector<dynamics::DislocationLine> lines = dyn.lines;

    const forms::Coframe e = defects::buildCoframe(s.config);
    const FormField R = defects::curvature(defects::buildConnection(s.config));
    const network::ScreeningFields screening{&R, &e};

    const bool traj = wants(s, "trajectories"), evts = wants(s, "events");
    std::ofstream trajectory, events;
    if (traj) {
        trajectory = openOut(opt.out / "trajectory.csv");
        dynamics::writeTrajectoryHeader(trajectory);
    }
    if (evts) events = openOut(opt.out / "events.jsonl");
    auto ledgerOut = openOut(opt.out / "ledger.csv");
    ledgerOut << "step,lines,total_x,total_y,total_z,drift\n";

    auto ledger = network::ChargeLedger::start(lines);
    double worstTransversality = 0.0;
    int eventCount = 0, clipCount = 0, stepsRun = 0;
    for (int step = 0; step < p.steps && !lines.empty(); ++step) {
        std::map<std::string, Vec3> burgers;
        for (const auto& l : lines) burgers[l.id] = l.burgers;
        const auto rep = dynamics::stepLines(lines, dyn.disclinations, p, step);
        for (const auto& d : rep.nodes) worstTransversality = std::max(worstTransversality, d.transversality);
        if (traj) dynamics::writeTrajectoryRows(trajectory, rep.nodes);
        for (const auto& c : rep.clips) {
            ledger.recordClip(burgers.at(c.lineId), static_cast<int>(c.survivors.size()));
            ++clipCount;
            if (evts) {
                events << json{{"step", c.step},
                               {"type", "clip"},
                               {"line", c.lineId},
                               {"nodesRemoved", c.nodesRemoved},
                               {"survivors", c.survivors}}
                              .dump()
                       << '\n';
            }
        }
        if (dyn.reconnection) {
            for (const auto& ev : network::detectAndReconnect(lines, dyn.threshold, screening, step)) {
                ledger.record(ev);
                ++eventCount;
                if (evts) events << network::toJson(ev).dump() << '\n';
            }
        }
        const Vec3 t = ledger.total(lines);
        ledgerOut << step << ',' << lines.size() << ',' << t[0] << ',' << t[1] << ',' << t[2] << ','
                  << ledger.drift(lines) << '\n';
        stepsRun = step + 1;
    }

    // |F·v| over velocity directions normal to each initial line
    {
        auto scan = openOut(opt.out / "magnus_scan.csv");
        scan << "line_id,law,k,phi,vx,vy,vz,fx,fy,fz,abs_f_dot_v,transversality\n";
        Vec3 theta{};
        for (const auto& d : dyn.disclinations.lines) theta = operator+(theta, 0.5 * d.frank);
        for (const auto& l : dyn.lines) {
            const Vec3 t = l.tangent(0);
            const Vec3 seed = std::abs(t[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            Vec3 u1 = dynamics::cross(t, seed);
            u1 = (1.0 / dynamics::norm(u1)) * u1;
            const Vec3 u2 = dynamics::cross(t, u1);
            for (auto law : {dynamics::ForceLaw::CrossProduct, dynamics::ForceLaw::DerivationConsistent}) {
                for (int k = 0; k < 64; ++k) {
                    const double phi = kTwoPi * k / 64.0;
                    const Vec3 v = operator+(std::cos(phi) * u1, std::sin(phi) * u2);
                    const Vec3 F = dynamics::magnusForce(theta, l.burgers, v, p.Gamma, law, t);
                    scan << l.id << ',' << dynamics::toString(law) << ',' << k << ',' << phi << ',' << v[0] << ','
                         << v[1] << ',' << v[2] << ',' << F[0] << ',' << F[1] << ',' << F[2] << ','
                         << std::abs(dynamics::dot(F, v)) << ',' << dynamics::transversality(F, v) << '\n';
                }
            }
        }
    }

    double eps = s.minCoreRadius();
    const auto net = network::networkFromLines(lines, dyn.disclinations, eps);
    json structural = json::array();
    for (const auto& v : network::structuralViolations(net)) structural.push_back(v.message);
    json snap = network::snapshot(lines, net, ledger, stepsRun);
    snap["structuralViolations"] = structural;
    writeJson(opt.out / "network_final.json", snap);

    json summary{{"stepsRun", stepsRun},
                 {"linesRemaining", lines.size()},
                 {"reconnectionEvents", eventCount},
                 {"clipEvents", clipCount},
                 {"maxTransversality", worstTransversality},
                 {"ledgerDrift", ledger.drift(lines)}};

    // sidecar: the only file carrying wall-clock metadata
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream stamp;
    stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    json sidecar{{"scenario", toJson(s)},
                 {"resolutionScale", opt.resolutionScale},
                 {"seed", opt.seed ? json(*opt.seed) : json(nullptr)},
                 {"generatedAt", stamp.str()},
                 {"summary", summary}};
    writeJson(opt.out / "trajectory.json", sidecar);
    return summary;
}

int runCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cartan-geometry defect engine: fields, charges, verification and dynamics"};
    app.require_subcommand(1);
    RunOptions opt;
    std::string outDir = "out";
    std::uint64_t seed = 0;
    app.add_option("--out", outDir, "Output directory")->capture_default_str();
    app.add_option("--resolution-scale", opt.resolutionScale, "Multiply every grid resolution")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* seedOpt = app.add_option("--seed", seed, "Reserved; all computation is deterministic");

    std::string path;
    const char* names[] = {"fields", "verify", "simulate", "charges"};
    const char* help[] = {"Write torsion, curvature, coframe and connection fields",
                          "Run residual and charge checks at two resolutions",
                          "Run the dynamics block of the scenario", "Extract Burgers and Frank charges"};
    for (int i = 0; i < 4; ++i) app.add_subcommand(names[i], help[i])->add_option("scenario", path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }
    opt.out = outDir;
    if (seedOpt->count() > 0) opt.seed = seed;

    try {
        const Scenario s = loadScenario(path, opt.resolutionScale);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "fields") {
            cmdFields(s, opt);
            out << "fields written to " << opt.out.string() << '\n';
        } else if (cmd == "charges") {
            const json r = cmdCharges(s, opt);
            out << r["defects"].dump(2) << '\n';
        } else if (cmd == "verify") {
            const json r = cmdVerify(s, opt);
            for (const auto& w : r["warnings"]) out << "warning: " << w.get<std::string>() << '\n';
            for (const auto& c : r["checks"]) {
                out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
            }
            for (const auto& c : r["convergence"]) {
                out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["term"].get<std::string>() << " ("
                    << c["verdict"].get<std::string>() << ")\n";
            }
            if (!r["pass"].get<bool>()) return kVerificationFailure;
        } else {
            const json r = cmdSimulate(s, opt);
            out << r.dump(2) << '\n';
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace cartan::cli
