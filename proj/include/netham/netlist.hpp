#pragma once
// netlist.hpp — circuit data model: branches, element kinds, multiport groups,
// transmission lines, drives, and the topological tags (compact vs extended)
// that each branch flux/charge carries.
//
// Values are stored as exact rationals: the reduction stage is exact linear
// algebra and decimal inputs must not pick up binary rounding on the way in.

#include "netham/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netham {

enum class ElementKind {
    Capacitor,        // value = C [F]
    Inductor,         // value = L [H]
    JosephsonJunction,// value = E_J [J], flux is Phi_Q-periodic
    PhaseSlip,        // value = E_S [J], charge is 2e-periodic
    VoltageSource,    // waveform attached via Drive
    CurrentSource,    // waveform attached via Drive
    TransformerPort,  // member of a transformer multiport group
    GyratorPort,      // member of a gyrator multiport group
};

const char* kind_name(ElementKind k);

// Compact (S^1) vs extended (R) character of one branch variable. Multiport
// port branches stay Unset unless the netlist overrides them; downstream
// classification surfaces, rather than guesses, any case where that gap is
// load-bearing.
enum class VarTopology { Compact, Extended, Unset };

// Moduli are kept symbolic; the engine only needs their presence.
inline constexpr const char* kFluxModulus = "Phi_Q";   // h/2e
inline constexpr const char* kChargeModulus = "2e";

struct Branch {
    std::string id;
    std::string tail;  // orientation tail -> head; signs come from here only
    std::string head;
    ElementKind kind = ElementKind::Capacitor;
    Rational value = 0;           // C, L, E_J or E_S; unused for ports/sources
    VarTopology flux = VarTopology::Unset;
    VarTopology charge = VarTopology::Unset;
};

// Default tags per element class: capacitive-type branches (C, V, JJ) have
// compact flux and extended charge; inductive-type (L, I, PS) the converse;
// multiport ports stay Unset.
void apply_default_topology(Branch& b);

struct MultiportGroup {
    enum class Type { Transformer, Gyrator } type = Type::Gyrator;
    std::vector<std::string> ports;  // branch ids; transformer: left ports
                                     // first, then right ports
    RMat matrix;                     // transformer: T (n_right x n_left);
                                     // gyrator: Y (n x n, skew)
    int left_count() const {         // transformer only
        return static_cast<int>(matrix.cols());
    }
    int right_count() const { return static_cast<int>(matrix.rows()); }
};

struct TransmissionLine {
    std::string id;
    double c = 0;  // F/m
    double l = 0;  // H/m
    std::optional<double> length;  // absent => semi-infinite
    std::string end0;
    std::optional<std::string> end1;
};

struct Waveform {
    enum class Kind { Dc, Table } kind = Kind::Dc;
    double dc = 0;
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;

    double operator()(double t) const;   // linear interp, ends held
    double derivative(double t) const;   // piecewise slope, 0 for dc
};

struct Drive {
    std::string branch;  // must be a voltage or current source
    Waveform waveform;
};

struct CircuitGraph {
    std::vector<std::string> nodes;  // includes ground
    std::string ground;
    std::vector<Branch> branches;
    std::vector<MultiportGroup> multiports;
    std::vector<TransmissionLine> tlines;
    std::vector<Drive> drives;

    int node_index(const std::string& name) const;
    int branch_index(const std::string& id) const;
    const Drive* drive_for(const std::string& branch_id) const;

    // Branch-coordinate layout used everywhere downstream: for B branches the
    // differentials are ordered [dphi_0..dphi_{B-1} | dq_0..dq_{B-1}].
    int n_branches() const { return static_cast<int>(branches.size()); }
    int flux_coord(int branch) const { return branch; }
    int charge_coord(int branch) const { return n_branches() + branch; }
};

struct ValidationFinding {
    std::string code;     // stable identifier, e.g. "gyrator-not-skew"
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }
};

// JSON round trip. parse_netlist throws NetlistError (with field/location
// text) on schema violations, nonpositive element values, dangling nodes.
struct NetlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CircuitGraph parse_netlist(const std::string& json_text);
std::string emit_netlist(const CircuitGraph& g);  // canonical form

ValidationReport validate(const CircuitGraph& g);

}  // namespace netham
