#include "cartan/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace cartan::cli {

using nlohmann::json;
using dynamics::Vec3;

namespace {

void allowKeys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) throw ConfigError(path + "." + k, "unknown key");
    }
}

const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required key");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

const json& array(const json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    if (size && j.size() != *size) throw ConfigError(path, "expected " + std::to_string(*size) + " entries");
    return j;
}

template <std::size_t N>
std::array<double, N> numbers(const json& j, const std::string& path) {
    array(j, path, N);
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i], path + "[" + std::to_string(i) + "]");
    return out;
}

std::pair<double, double> range(const json& j, const std::string& path) {
    const auto r = numbers<2>(j, path);
    if (!(r[1] > r[0])) throw ConfigError(path, "expected [min, max] with max > min");
    return {r[0], r[1]};
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

template <class T>
T choose(const json& j, const std::string& path, std::initializer_list<std::pair<const char*, T>> options) {
    const std::string s = string(j, path);
    std::string names;
    for (const auto& [name, value] : options) {
        if (s == name) return value;
        names += (names.empty() ? "" : ", ") + std::string(name);
    }
    throw ConfigError(path, "unknown value '" + s + "' (expected one of " + names + ")");
}

forms::GridSpec parseGrid(const json& j, const std::string& path, int scale) {
    allowKeys(j, path, {"dim", "extents", "resolution"});
    const json& ext = array(require(j, path, "extents"), path + ".extents");
    const json& res = array(require(j, path, "resolution"), path + ".resolution");
    const int dim = j.contains("dim") ? integer(j["dim"], path + ".dim") : static_cast<int>(ext.size());
    if (dim < 3 || dim > 4) throw ConfigError(path + ".dim", "defect scenarios need dimension 3 or 4");
    if (ext.size() != static_cast<std::size_t>(dim)) throw ConfigError(path + ".extents", "one [min, max] per axis");
    if (res.size() != static_cast<std::size_t>(dim)) throw ConfigError(path + ".resolution", "one count per axis");
    std::vector<std::pair<double, double>> extents;
    std::vector<int> resolution;
    for (int a = 0; a < dim; ++a) {
        extents.push_back(range(ext[a], at(path + ".extents", a)));
        const int n = integer(res[a], at(path + ".resolution", a));
        if (n < 1) throw ConfigError(at(path + ".resolution", a), "resolution must be positive");
        resolution.push_back(n * scale);
    }
    return forms::GridSpec(dim, extents, resolution);
}

defects::DefectSpec parseDefect(const json& j, const std::string& path) {
    allowKeys(j, path, {"kind", "axis", "charge", "coreRadius", "profile", "burgersDirection", "edgeForm"});
    defects::DefectSpec d;
    d.kind = choose<defects::DefectKind>(require(j, path, "kind"), path + ".kind",
                                         {{"screw", defects::DefectKind::Screw},
                                          {"edge", defects::DefectKind::Edge},
                                          {"wedge", defects::DefectKind::Wedge}});
    if (j.contains("axis")) d.axisPoint = numbers<2>(j["axis"], path + ".axis");
    if (j.contains("charge")) d.charge = number(j["charge"], path + ".charge");
    if (j.contains("coreRadius")) d.coreRadius = number(j["coreRadius"], path + ".coreRadius");
    if (j.contains("profile")) {
        d.profile = choose<defects::CoreProfile>(
            j["profile"], path + ".profile",
            {{"gaussian", defects::CoreProfile::Gaussian}, {"lorentzian", defects::CoreProfile::Lorentzian}});
    }
    if (j.contains("burgersDirection")) d.burgersDirection = numbers<2>(j["burgersDirection"], path + ".burgersDirection");
    if (j.contains("edgeForm")) {
        d.edgeForm = choose<defects::EdgeCoframe>(
            j["edgeForm"], path + ".edgeForm",
            {{"holonomy", defects::EdgeCoframe::Holonomy}, {"verbatim", defects::EdgeCoframe::Verbatim}});
    }
    try {
        d.validate();
    } catch (const ValueError& e) {
        throw ConfigError(path, e.what());
    }
    return d;
}

theory::Couplings parseCouplings(const json& j, const std::string& path) {
    allowKeys(j, path, {"alpha", "beta", "gamma", "kappaU1", "lambdaU1"});
    theory::Couplings c;
    if (j.contains("alpha")) c.alpha = number(j["alpha"], path + ".alpha");
    if (j.contains("beta")) c.beta = number(j["beta"], path + ".beta");
    if (j.contains("gamma")) c.gamma = number(j["gamma"], path + ".gamma");
    if (j.contains("kappaU1")) c.kappaU1 = number(j["kappaU1"], path + ".kappaU1");
    if (j.contains("lambdaU1")) c.lambdaU1 = number(j["lambdaU1"], path + ".lambdaU1");
    try {
        c.validate();
    } catch (const ValueError& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

dynamics::DislocationLine parseLine(const json& j, const std::string& path) {
    allowKeys(j, path, {"id", "nodes", "burgers", "closed", "mobility"});
    dynamics::DislocationLine l;
    l.id = string(require(j, path, "id"), path + ".id");
    const json& nodes = array(require(j, path, "nodes"), path + ".nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) l.nodes.push_back(numbers<3>(nodes[i], at(path + ".nodes", i)));
    l.burgers = numbers<3>(require(j, path, "burgers"), path + ".burgers");
    if (j.contains("closed")) l.closed = boolean(j["closed"], path + ".closed");
    if (j.contains("mobility")) l.mobility = number(j["mobility"], path + ".mobility");
    try {
        l.validate();
    } catch (const ValueError& e) {
        throw ConfigError(path, e.what());
    }
    return l;
}

DynamicsBlock parseDynamics(const json& j, const std::string& path, const Scenario& s) {
    allowKeys(j, path,
              {"Gamma", "forceLaw", "externalForce", "timeStep", "steps", "domain", "reconnection", "lines",
               "disclinations"});
    DynamicsBlock b;
    auto& p = b.params;
    p.Gamma = j.contains("Gamma") ? number(j["Gamma"], path + ".Gamma") : s.couplings.Gamma();
    if (j.contains("forceLaw")) {
        p.law = choose<dynamics::ForceLaw>(j["forceLaw"], path + ".forceLaw",
                                           {{"CrossProduct", dynamics::ForceLaw::CrossProduct},
                                            {"DerivationConsistent", dynamics::ForceLaw::DerivationConsistent}});
    }
    if (j.contains("externalForce")) {
        const json& f = j["externalForce"];
        const std::string q = path + ".externalForce";
        if (f.is_object()) {
            allowKeys(f, q, {"towardsAxis", "magnitude"});
            Attractor a;
            a.axis = numbers<2>(require(f, q, "towardsAxis"), q + ".towardsAxis");
            a.magnitude = number(require(f, q, "magnitude"), q + ".magnitude");
            b.attractor = a;
            p.externalForce.field = [a](const Vec3& x) { return a.at(x); };
        } else {
            p.externalForce.uniform = numbers<3>(f, q);
        }
    }
    p.timeStep = number(require(j, path, "timeStep"), path + ".timeStep");
    if (!(p.timeStep > 0.0)) throw ConfigError(path + ".timeStep", "must be positive");
    p.steps = integer(require(j, path, "steps"), path + ".steps");
    if (p.steps < 0) throw ConfigError(path + ".steps", "must be non-negative");
    const auto& g = s.config.grid;
    for (int a = 0; a < 3; ++a) p.domain[a] = {g.lower(a), g.upper(a)};
    if (j.contains("domain")) {
        const json& d = array(j["domain"], path + ".domain", 3);
        for (int a = 0; a < 3; ++a) p.domain[a] = range(d[a], at(path + ".domain", a));
    }

    if (j.contains("disclinations")) {
        const json& d = array(j["disclinations"], path + ".disclinations");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::string q = at(path + ".disclinations", i);
            allowKeys(d[i], q, {"axis", "frank", "coreRadius"});
            dynamics::Disclination x;
            x.axis = numbers<2>(require(d[i], q, "axis"), q + ".axis");
            x.frank = numbers<3>(require(d[i], q, "frank"), q + ".frank");
            if (d[i].contains("coreRadius")) x.coreRadius = number(d[i]["coreRadius"], q + ".coreRadius");
            if (!(x.coreRadius > 0.0)) throw ConfigError(q + ".coreRadius", "must be positive");
            b.disclinations.lines.push_back(x);
        }
    } else {
        for (const auto& d : s.config.defects) {
            if (d.kind == defects::DefectKind::Wedge) b.disclinations.lines.push_back({d.axisPoint, d.frank(), d.coreRadius});
        }
    }

    const json& lines = array(require(j, path, "lines"), path + ".lines");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto l = parseLine(lines[i], at(path + ".lines", i));
        if (!ids.insert(l.id).second) throw ConfigError(at(path + ".lines", i) + ".id", "duplicate line id '" + l.id + "'");
        const double bound = 0.1 * std::min({p.domain[0].second - p.domain[0].first, p.domain[1].second - p.domain[1].first,
                                             p.domain[2].second - p.domain[2].first});
        const double force = b.attractor ? std::abs(b.attractor->magnitude) : dynamics::norm(p.externalForce.uniform);
        if (p.timeStep * l.mobility * force > bound) {
            throw ConfigError(path + ".timeStep", "dt*M*|F| exceeds a tenth of the domain extent");
        }
        b.lines.push_back(std::move(l));
    }

    double eps = s.minCoreRadius();
    for (const auto& d : b.disclinations.lines) eps = std::min(eps, d.coreRadius);
    b.threshold = 2.0 * eps;
    if (j.contains("reconnection")) {
        const std::string q = path + ".reconnection";
        allowKeys(j["reconnection"], q, {"enabled", "threshold"});
        if (j["reconnection"].contains("enabled")) b.reconnection = boolean(j["reconnection"]["enabled"], q + ".enabled");
        if (j["reconnection"].contains("threshold")) {
            b.threshold = number(j["reconnection"]["threshold"], q + ".threshold");
            if (!(b.threshold > 0.0)) throw ConfigError(q + ".threshold", "must be positive");
        }
    }
    return b;
}

const std::set<std::string> kOutputs{"fields", "charges", "residuals", "trajectories", "events"};

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

Vec3 Attractor::at(const Vec3& p) const {
    const double dx = axis[0] - p[0], dy = axis[1] - p[1];
    const double r = std::hypot(dx, dy);
    if (r <= 1e-12) return {0.0, 0.0, 0.0};
    return {magnitude * dx / r, magnitude * dy / r, 0.0};
}

double Scenario::minCoreRadius() const {
    double eps = INFINITY;
    for (const auto& d : config.defects) eps = std::min(eps, d.coreRadius);
    return std::isfinite(eps) ? eps : 0.05;
}

double Scenario::chargeRadiusFor(std::size_t i) const {
    if (chargeRadius) return *chargeRadius;
    const auto& d = config.defects.at(i);
    const auto& g = config.grid;
    double r = 1.0;
    for (int a = 0; a < 2; ++a) {
        r = std::min(r, 0.9 * (d.axisPoint[a] - g.lower(a)));
        r = std::min(r, 0.9 * (g.upper(a) - d.axisPoint[a]));
    }
    for (const auto& o : config.defects) {
        const double dist = std::hypot(o.axisPoint[0] - d.axisPoint[0], o.axisPoint[1] - d.axisPoint[1]);
        if (dist > 1e-12) r = std::min(r, 0.45 * dist);
    }
    return r;
}

Scenario parseScenario(const json& doc, int resolutionScale) {
    if (resolutionScale < 1) throw ConfigError("--resolution-scale", "must be a positive integer");
    const std::string root = "$";
    allowKeys(doc, root, {"name", "grid", "defects", "background", "couplings", "charges", "dynamics", "outputs"});
    Scenario s{.name = string(require(doc, root, "name"), "$.name"),
               .config = {{}, parseGrid(require(doc, root, "grid"), "$.grid", resolutionScale), {}},
               .couplings = {},
               .dynamics = std::nullopt,
               .chargeRadius = std::nullopt,
               .outputs = {}};
    if (doc.contains("defects")) {
        const json& d = array(doc["defects"], "$.defects");
        for (std::size_t i = 0; i < d.size(); ++i) s.config.defects.push_back(parseDefect(d[i], at("$.defects", i)));
    }
    if (doc.contains("background")) {
        allowKeys(doc["background"], "$.background", {"distortion"});
        if (doc["background"].contains("distortion")) {
            const std::string q = "$.background.distortion";
            const json& m = array(doc["background"]["distortion"], q, 3);
            for (int a = 0; a < 3; ++a) s.config.distortion[a] = numbers<3>(m[a], at(q, a));
        }
    }
    try {
        s.config.validate();
    } catch (const DomainError& e) {
        throw ConfigError("$.defects", e.what());
    } catch (const ValueError& e) {
        throw ConfigError("$", e.what());
    }
    if (doc.contains("couplings")) s.couplings = parseCouplings(doc["couplings"], "$.couplings");
    if (doc.contains("charges")) {
        allowKeys(doc["charges"], "$.charges", {"radius"});
        if (doc["charges"].contains("radius")) {
            s.chargeRadius = number(doc["charges"]["radius"], "$.charges.radius");
            if (!(*s.chargeRadius > 0.0)) throw ConfigError("$.charges.radius", "must be positive");
        }
    }
    if (doc.contains("dynamics")) s.dynamics = parseDynamics(doc["dynamics"], "$.dynamics", s);
    if (doc.contains("outputs")) {
        const json& o = array(doc["outputs"], "$.outputs");
        for (std::size_t i = 0; i < o.size(); ++i) {
            const std::string v = string(o[i], at("$.outputs", i));
            if (!kOutputs.count(v)) throw ConfigError(at("$.outputs", i), "unknown output '" + v + "'");
            s.outputs.push_back(v);
        }
    }
    return s;
}

Scenario loadScenario(const std::string& path, int resolutionScale) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open scenario file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    return parseScenario(doc, resolutionScale);
}

json toJson(const Scenario& s) {
    const auto& g = s.config.grid;
    json j;
    j["name"] = s.name;
    j["grid"] = {{"dim", g.dim()}, {"extents", g.extents()}, {"resolution", g.resolutions()}};
    j["defects"] = json::array();
    for (const auto& d : s.config.defects) {
        json x{{"kind", defects::toString(d.kind)},
               {"axis", d.axisPoint},
               {"charge", d.charge},
               {"coreRadius", d.coreRadius},
               {"profile", defects::toString(d.profile)}};
        if (d.kind == defects::DefectKind::Edge) {
            x["burgersDirection"] = d.burgersDirection;
            x["edgeForm"] = defects::toString(d.edgeForm);
        }
        j["defects"].push_back(std::move(x));
    }
    j["background"] = {{"distortion", s.config.distortion}};
    const auto& c = s.couplings;
    j["couplings"] = {
        {"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}, {"kappaU1", c.kappaU1}, {"lambdaU1", c.lambdaU1}};
    if (s.chargeRadius) j["charges"] = {{"radius", *s.chargeRadius}};
    if (s.dynamics) {
        const auto& b = *s.dynamics;
        const auto& p = b.params;
        json d{{"Gamma", p.Gamma},
               {"forceLaw", dynamics::toString(p.law)},
               {"externalForce", b.attractor ? json{{"towardsAxis", b.attractor->axis}, {"magnitude", b.attractor->magnitude}}
                                             : vec(p.externalForce.uniform)},
               {"timeStep", p.timeStep},
               {"steps", p.steps},
               {"domain", p.domain},
               {"reconnection", {{"enabled", b.reconnection}, {"threshold", b.threshold}}},
               {"lines", json::array()},
               {"disclinations", json::array()}};
        for (const auto& l : b.lines) {
            json nodes = json::array();
            for (const auto& x : l.nodes) nodes.push_back(vec(x));
            d["lines"].push_back({{"id", l.id},
                                  {"nodes", nodes},
                                  {"burgers", vec(l.burgers)},
                                  {"closed", l.closed},
                                  {"mobility", l.mobility}});
        }
        for (const auto& x : b.disclinations.lines) {
            d["disclinations"].push_back({{"axis", x.axis}, {"frank", vec(x.frank)}, {"coreRadius", x.coreRadius}});
        }
        j["dynamics"] = std::move(d);
    }
    j["outputs"] = s.outputs;
    return j;
}

}  // namespace cartan::cli
