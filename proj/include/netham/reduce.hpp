#pragma once
// reduce.hpp — end-to-end reduction: pull the two-form back through the
// constraints, classify zero modes (gauge / linear constraint / flagged
// nonhomogeneous), solve and substitute the linear constraints, and bring the
// surviving block to canonical form. Everything exact until the caller asks
// for numbers.

#include "netham/hamiltonian.hpp"
#include "netham/symplectic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netham {

enum class ZeroModeClass { Gauge, LinearConstraint, Nonhomogeneous };

struct ZeroModeReport {
    ZeroModeClass cls;
    std::string label;       // defining coordinate of the mode vector
    std::string detail;      // solved expression or flag diagnostic
};

// Thrown when a zero-mode constraint is nonlinear in an eliminated coordinate
// (cosine argument hits it) or the linear block is singular. The pipeline
// maps this to exit code 3.
struct NonhomogeneousConstraint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReducedSystem {
    // Canonical coordinates eta (pairs block-ordered, see darboux).
    std::vector<CoordInfo> coords;
    int n_pairs = 0;

    // Back-substitution: original z = z_of_eta * eta + sum_j z_of_drive[j] *
    // waveform_j(t). Gauge coordinates are fixed to zero inside this map.
    RMat z_of_eta;
    RVec z_const;
    std::vector<RVec> z_of_drive;
    std::vector<Waveform> drive_waveforms;

    std::vector<ZeroModeReport> zero_mode_reports;
    RMat omega_z;      // two-form over z before reduction
    RMat omega_eta;    // canonical J block over eta
};

struct ReductionResult {
    ConstraintSystem constraints;
    ReducedSystem system;
    HamiltonianModel hamiltonian;   // over eta
    HamiltonianModel hamiltonian_z; // over z, before zero-mode elimination
};

// Classify zero modes of `tf` against H, solve the linear constraints, drop
// gauge coordinates (fixed to zero), and return the canonical system plus the
// reduced Hamiltonian. Throws NonhomogeneousConstraint per the flag contract.
std::pair<ReducedSystem, HamiltonianModel> classify_and_solve(
    const TwoForm& tf, const ZeroModeSet& zm, const HamiltonianModel& h);

// Full pipeline on a parsed netlist.
ReductionResult reduce_circuit(const CircuitGraph& g);

// JSON reduction report (omega before/after, zero modes, labels, Hamiltonian
// descriptor, back-substitution map).
std::string reduction_report(const ReductionResult& r);

// JSON Hamiltonian descriptor on its own.
std::string hamiltonian_descriptor(const HamiltonianModel& h);

}  // namespace netham
