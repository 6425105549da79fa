#pragma once
// constraints.hpp — spanning tree, fundamental loop/cutset rows, the full
// linear constraint matrix F over branch differentials [dphi | dq], its exact
// kernel K (F K = 0, dzeta = K dz), and the compact/extended classification
// of the solution manifold via the Pfaff splitting of the KVL/KCL systems.

#include "netham/netlist.hpp"

#include <string>
#include <vector>

namespace netham {

struct Tree {
    std::vector<int> tree_branches;    // indices into g.branches
    std::vector<int> cotree_branches;
};

// Deterministic spanning tree. Preference: capacitive-type branches (C, V,
// JJ) first, then everything else, stable by declaration order. Throws on a
// disconnected graph.
Tree spanning_tree(const CircuitGraph& g);

enum class ConstraintRowKind { KvlLoop, KclCutset, Transformer, Gyrator };

// A reduced coordinate: label, compact/extended character of the direction
// it parameterizes on the solution manifold, and which branch-variable
// sector its kernel column touches.
struct CoordInfo {
    std::string label;
    VarTopology topology = VarTopology::Extended;
    std::string modulus;  // "Phi_Q", "2e", or empty for extended coords
    enum class Sector { Flux, Charge, Mixed } sector = Sector::Mixed;
};

struct ConstraintSystem {
    RMat F;                                  // rows x 2B
    std::vector<ConstraintRowKind> row_kinds;
    std::vector<std::string> row_labels;

    RMat K;                                  // 2B x dim(z), F K = 0 exactly
    std::vector<std::string> z_labels;       // per kernel column
    std::vector<int> z_free_cols;            // branch-coordinate index of the
                                             // leading support row of each z
    std::vector<CoordInfo> z_coords;         // per kernel column; topology is
                                             // the manifold-level verdict
                                             // (period-lattice alignment),
                                             // not the raw branch tag
    // KVL / KCL sub-blocks (over flux / charge columns only) kept for the
    // topology classification.
    RMat loop_rows;    // n_loops x B  (flux columns)
    RMat cutset_rows;  // n_cutsets x B (charge columns)
};

// Builds F = [KVL; KCL; transformer; gyrator] and its exact kernel.
// Transformer rows: dQ_L + T^T dQ_R = 0 and dPhi_R - T dPhi_L = 0.
// Gyrator rows: dQ_G - Y dPhi_G = 0.
// Throws std::runtime_error on inconsistent constraint blocks (e.g. a loop
// of ideal voltage sources would make a KVL row degenerate with a source).
ConstraintSystem build_constraints(const CircuitGraph& g, const Tree& t);

// Name of branch coordinate `c` in the [dphi | dq] layout, e.g. "phi(Cj)".
std::string coord_name(const CircuitGraph& g, int c);

struct TopologyClassification {
    // Basis of compact directions of the integral manifold, expressed over
    // the compact branch coordinates (labels carry branch names).
    std::vector<std::string> compact_flux_labels;   // modulus Phi_Q each
    std::vector<std::string> compact_charge_labels; // modulus 2e each
    int compact_flux_count = 0;
    int compact_charge_count = 0;
    // The reordered Pfaff blocks (0 | D | E): D = columns of compact branch
    // variables, E = extended ones, after dropping identically-zero columns.
    RMat d_loop, e_loop, d_cut, e_cut;
};

struct TopologyUndetermined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pfaff splitting: within the KVL system, freeze the extended branch fluxes
// and count independent compact directions as dim ker(D_loop); dually for
// charges with the KCL system. Multiport ports with Unset tags are tried as
// both compact and extended; if the counts disagree the gap is load-bearing
// and TopologyUndetermined is thrown.
TopologyClassification classify_topology(const ConstraintSystem& cs,
                                         const CircuitGraph& g);

}  // namespace netham
