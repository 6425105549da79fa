#include "netham/netlist.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <set>

namespace netham {

using nlohmann::json;

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Capacitor: return "capacitor";
        case ElementKind::Inductor: return "inductor";
        case ElementKind::JosephsonJunction: return "josephson";
        case ElementKind::PhaseSlip: return "phase_slip";
        case ElementKind::VoltageSource: return "voltage_source";
        case ElementKind::CurrentSource: return "current_source";
        case ElementKind::TransformerPort: return "transformer_port";
        case ElementKind::GyratorPort: return "gyrator_port";
    }
    return "?";
}

namespace {

ElementKind kind_from_name(const std::string& s, const std::string& where) {
    static const std::map<std::string, ElementKind> table = {
        {"capacitor", ElementKind::Capacitor},
        {"inductor", ElementKind::Inductor},
        {"josephson", ElementKind::JosephsonJunction},
        {"phase_slip", ElementKind::PhaseSlip},
        {"voltage_source", ElementKind::VoltageSource},
        {"current_source", ElementKind::CurrentSource},
        {"transformer_port", ElementKind::TransformerPort},
        {"gyrator_port", ElementKind::GyratorPort},
    };
    auto it = table.find(s);
    if (it == table.end())
        throw NetlistError("unknown branch kind '" + s + "' at " + where);
    return it->second;
}

// parameter key whose value is the single element constant, per kind
const char* param_key(ElementKind k) {
    switch (k) {
        case ElementKind::Capacitor: return "C";
        case ElementKind::Inductor: return "L";
        case ElementKind::JosephsonJunction: return "EJ";
        case ElementKind::PhaseSlip: return "ES";
        default: return nullptr;
    }
}

Rational rational_field(const json& j, const std::string& where) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<long long>());
        if (j.is_number()) return parse_rational(j.dump());
    } catch (const std::invalid_argument& e) {
        throw NetlistError(std::string(e.what()) + " at " + where);
    }
    throw NetlistError("expected number or rational string at " + where);
}

VarTopology topology_field(const json& j, const std::string& where) {
    std::string s = j.get<std::string>();
    if (s == "S1") return VarTopology::Compact;
    if (s == "R") return VarTopology::Extended;
    throw NetlistError("topology tag must be \"S1\" or \"R\" at " + where);
}

}  // namespace

void apply_default_topology(Branch& b) {
    switch (b.kind) {
        case ElementKind::Capacitor:
        case ElementKind::VoltageSource:
        case ElementKind::JosephsonJunction:
            if (b.flux == VarTopology::Unset) b.flux = VarTopology::Compact;
            if (b.charge == VarTopology::Unset) b.charge = VarTopology::Extended;
            break;
        case ElementKind::Inductor:
        case ElementKind::CurrentSource:
        case ElementKind::PhaseSlip:
            if (b.flux == VarTopology::Unset) b.flux = VarTopology::Extended;
            if (b.charge == VarTopology::Unset) b.charge = VarTopology::Compact;
            break;
        case ElementKind::TransformerPort:
        case ElementKind::GyratorPort:
            break;  // deliberately Unset unless overridden
    }
}

double Waveform::operator()(double t) const {
    if (kind == Kind::Dc) return dc;
    if (times.empty()) return 0;
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    size_t i = static_cast<size_t>(it - times.begin());
    double t0 = times[i - 1], t1 = times[i];
    double w = (t - t0) / (t1 - t0);
    return values[i - 1] * (1 - w) + values[i] * w;
}

double Waveform::derivative(double t) const {
    if (kind == Kind::Dc) return 0;
    if (times.empty() || t <= times.front() || t >= times.back()) return 0;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    size_t i = static_cast<size_t>(it - times.begin());
    return (values[i] - values[i - 1]) / (times[i] - times[i - 1]);
}

int CircuitGraph::node_index(const std::string& name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == name) return static_cast<int>(i);
    return -1;
}

int CircuitGraph::branch_index(const std::string& id) const {
    for (size_t i = 0; i < branches.size(); ++i)
        if (branches[i].id == id) return static_cast<int>(i);
    return -1;
}

const Drive* CircuitGraph::drive_for(const std::string& branch_id) const {
    for (const auto& d : drives)
        if (d.branch == branch_id) return &d;
    return nullptr;
}

CircuitGraph parse_netlist(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw NetlistError(std::string("netlist is not valid JSON: ") + e.what());
    }
    CircuitGraph g;
    if (!doc.contains("nodes") || !doc["nodes"].is_array())
        throw NetlistError("missing \"nodes\" array");
    for (const auto& n : doc["nodes"]) g.nodes.push_back(n.get<std::string>());
    if (!doc.contains("ground")) throw NetlistError("missing \"ground\"");
    g.ground = doc["ground"].get<std::string>();
    if (g.node_index(g.ground) < 0)
        throw NetlistError("ground node '" + g.ground + "' not in nodes");

    if (!doc.contains("branches") || !doc["branches"].is_array() ||
        doc["branches"].empty())
        throw NetlistError("empty circuit: \"branches\" missing or empty");

    for (const auto& jb : doc["branches"]) {
        Branch b;
        for (const char* key : {"id", "from", "to", "kind"})
            if (!jb.contains(key))
                throw NetlistError(std::string("branch missing \"") + key + "\"");
        b.id = jb["id"].get<std::string>();
        const std::string where = "branch '" + b.id + "'";
        b.tail = jb["from"].get<std::string>();
        b.head = jb["to"].get<std::string>();
        if (g.node_index(b.tail) < 0)
            throw NetlistError("dangling node '" + b.tail + "' in " + where);
        if (g.node_index(b.head) < 0)
            throw NetlistError("dangling node '" + b.head + "' in " + where);
        b.kind = kind_from_name(jb["kind"].get<std::string>(), where);
        if (const char* pk = param_key(b.kind)) {
            if (!jb.contains("params") || !jb["params"].contains(pk))
                throw NetlistError("missing params." + std::string(pk) + " in " + where);
            b.value = rational_field(jb["params"][pk], where + " params." + pk);
            if (b.value <= 0)
                throw NetlistError("nonpositive " + std::string(pk) + " in " + where);
        }
        if (jb.contains("topology")) {
            const auto& jt = jb["topology"];
            if (jt.contains("flux")) b.flux = topology_field(jt["flux"], where);
            if (jt.contains("charge")) b.charge = topology_field(jt["charge"], where);
        }
        apply_default_topology(b);
        if (g.branch_index(b.id) >= 0)
            throw NetlistError("duplicate branch id '" + b.id + "'");
        g.branches.push_back(std::move(b));
    }

    for (const auto& jm : doc.value("multiports", json::array())) {
        MultiportGroup m;
        std::string type = jm.at("type").get<std::string>();
        if (type == "gyrator")
            m.type = MultiportGroup::Type::Gyrator;
        else if (type == "transformer")
            m.type = MultiportGroup::Type::Transformer;
        else
            throw NetlistError("multiport type must be gyrator or transformer");
        for (const auto& p : jm.at("ports")) {
            std::string id = p.get<std::string>();
            int bi = g.branch_index(id);
            if (bi < 0) throw NetlistError("multiport references unknown branch '" + id + "'");
            ElementKind want = m.type == MultiportGroup::Type::Gyrator
                                   ? ElementKind::GyratorPort
                                   : ElementKind::TransformerPort;
            if (g.branches[static_cast<size_t>(bi)].kind != want)
                throw NetlistError("multiport port '" + id + "' has wrong branch kind");
            m.ports.push_back(id);
        }
        const auto& jmat = jm.at("matrix");
        int rows = static_cast<int>(jmat.size());
        int cols = rows ? static_cast<int>(jmat[0].size()) : 0;
        m.matrix = RMat(rows, cols);
        for (int i = 0; i < rows; ++i) {
            if (static_cast<int>(jmat[i].size()) != cols)
                throw NetlistError("ragged multiport matrix");
            for (int j = 0; j < cols; ++j)
                m.matrix(i, j) = rational_field(jmat[i][j], "multiport matrix");
        }
        if (m.type == MultiportGroup::Type::Gyrator) {
            if (rows != cols || rows != static_cast<int>(m.ports.size()))
                throw NetlistError("gyrator matrix must be n x n for n ports");
        } else {
            if (rows + cols != static_cast<int>(m.ports.size()))
                throw NetlistError(
                    "transformer needs n_left + n_right ports with an "
                    "n_right x n_left matrix");
        }
        g.multiports.push_back(std::move(m));
    }

    for (const auto& jt : doc.value("tlines", json::array())) {
        TransmissionLine t;
        t.id = jt.at("id").get<std::string>();
        t.c = jt.at("c").get<double>();
        t.l = jt.at("l").get<double>();
        if (t.c <= 0 || t.l <= 0)
            throw NetlistError("nonpositive c or l in tline '" + t.id + "'");
        if (jt.contains("length"))
            t.length = jt["length"].get<double>();
        else if (!jt.value("semi_infinite", false))
            throw NetlistError("tline '" + t.id + "' needs length or semi_infinite");
        t.end0 = jt.at("end0").get<std::string>();
        if (jt.contains("end1") && !jt["end1"].is_null())
            t.end1 = jt["end1"].get<std::string>();
        g.tlines.push_back(std::move(t));
    }

    for (const auto& jd : doc.value("drives", json::array())) {
        Drive d;
        d.branch = jd.at("branch").get<std::string>();
        int bi = g.branch_index(d.branch);
        if (bi < 0) throw NetlistError("drive references unknown branch '" + d.branch + "'");
        auto k = g.branches[static_cast<size_t>(bi)].kind;
        if (k != ElementKind::VoltageSource && k != ElementKind::CurrentSource)
            throw NetlistError("drive on non-source branch '" + d.branch + "'");
        std::string wf = jd.at("waveform").get<std::string>();
        if (wf == "dc") {
            d.waveform.kind = Waveform::Kind::Dc;
            d.waveform.dc = jd.value("value", 0.0);
        } else if (wf == "table") {
            d.waveform.kind = Waveform::Kind::Table;
            for (const auto& row : jd.at("points")) {
                d.waveform.times.push_back(row.at(0).get<double>());
                d.waveform.values.push_back(row.at(1).get<double>());
            }
            for (size_t i = 1; i < d.waveform.times.size(); ++i)
                if (d.waveform.times[i] <= d.waveform.times[i - 1])
                    throw NetlistError("waveform table times not strictly increasing");
        } else {
            throw NetlistError("waveform must be \"dc\" or \"table\"");
        }
        g.drives.push_back(std::move(d));
    }
    return g;
}

std::string emit_netlist(const CircuitGraph& g) {
    json doc;
    doc["nodes"] = g.nodes;
    doc["ground"] = g.ground;
    doc["branches"] = json::array();
    for (const auto& b : g.branches) {
        json jb = {{"id", b.id}, {"from", b.tail}, {"to", b.head},
                   {"kind", kind_name(b.kind)}};
        if (const char* pk = param_key(b.kind))
            jb["params"] = {{pk, to_string(b.value)}};
        json jt;
        if (b.flux != VarTopology::Unset)
            jt["flux"] = b.flux == VarTopology::Compact ? "S1" : "R";
        if (b.charge != VarTopology::Unset)
            jt["charge"] = b.charge == VarTopology::Compact ? "S1" : "R";
        if (!jt.is_null()) jb["topology"] = jt;
        doc["branches"].push_back(jb);
    }
    if (!g.multiports.empty()) {
        doc["multiports"] = json::array();
        for (const auto& m : g.multiports) {
            json jm = {{"type", m.type == MultiportGroup::Type::Gyrator
                                    ? "gyrator" : "transformer"},
                       {"ports", m.ports}};
            json rows = json::array();
            for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index j = 0; j < m.matrix.cols(); ++j)
                    row.push_back(to_string(m.matrix(i, j)));
                rows.push_back(row);
            }
            jm["matrix"] = rows;
            doc["multiports"].push_back(jm);
        }
    }
    if (!g.tlines.empty()) {
        doc["tlines"] = json::array();
        for (const auto& t : g.tlines) {
            json jt = {{"id", t.id}, {"c", t.c}, {"l", t.l}, {"end0", t.end0}};
            if (t.length) jt["length"] = *t.length;
            else jt["semi_infinite"] = true;
            if (t.end1) jt["end1"] = *t.end1;
            doc["tlines"].push_back(jt);
        }
    }
    if (!g.drives.empty()) {
        doc["drives"] = json::array();
        for (const auto& d : g.drives) {
            json jd = {{"branch", d.branch}};
            if (d.waveform.kind == Waveform::Kind::Dc) {
                jd["waveform"] = "dc";
                jd["value"] = d.waveform.dc;
            } else {
                jd["waveform"] = "table";
                json pts = json::array();
                for (size_t i = 0; i < d.waveform.times.size(); ++i)
                    pts.push_back({d.waveform.times[i], d.waveform.values[i]});
                jd["points"] = pts;
            }
            doc["drives"].push_back(jd);
        }
    }
    return doc.dump(2);
}

ValidationReport validate(const CircuitGraph& g) {
    ValidationReport rep;
    auto add = [&](std::string code, std::string msg) {
        rep.findings.push_back({std::move(code), std::move(msg)});
    };

    // connectivity over branches (union-find on nodes)
    std::vector<int> parent(g.nodes.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
        return x;
    };
    for (const auto& b : g.branches)
        parent[static_cast<size_t>(find(g.node_index(b.tail)))] =
            find(g.node_index(b.head));
    int root = find(0);
    for (size_t i = 1; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) != root) {
            add("graph-not-connected", "graph not connected: node '" +
                                           g.nodes[i] + "' unreachable");
            break;
        }

    std::set<std::string> grouped;
    for (const auto& m : g.multiports) {
        if (m.type == MultiportGroup::Type::Gyrator) {
            RMat s = m.matrix + m.matrix.transpose();
            if (!is_zero(s))
                add("gyrator-not-skew", "gyrator block is not skew-symmetric");
        }
        for (const auto& p : m.ports) grouped.insert(p);
    }
    for (const auto& b : g.branches) {
        bool is_port = b.kind == ElementKind::TransformerPort ||
                       b.kind == ElementKind::GyratorPort;
        if (is_port && !grouped.count(b.id))
            add("orphan-port", "port branch '" + b.id + "' belongs to no multiport");
    }
    for (const auto& t : g.tlines) {
        if (g.node_index(t.end0) < 0)
            add("tline-endpoint", "tline '" + t.id + "' end0 not a node");
        if (t.end1 && g.node_index(*t.end1) < 0)
            add("tline-endpoint", "tline '" + t.id + "' end1 not a node");
    }
    return rep;
}

}  // namespace netham
