#pragma once
// symplectic.hpp — the pre-canonical two-form over branch coordinates, its
// pullback through the constraint kernel, zero-mode extraction, and the exact
// Darboux (canonical-form) transform.

#include "netham/constraints.hpp"
#include "netham/hamiltonian.hpp"

#include <string>
#include <vector>

namespace netham {

struct TwoForm {
    RMat omega;                    // skew, omega(u,v) = u^T omega v
    std::vector<CoordInfo> coords;

    int dim() const { return static_cast<int>(coords.size()); }
};

// Over branch coordinates [phi | q]: inductive-class branches (L, I, JJ)
// contribute 1/2 dphi∧dq, capacitive-class (C, V, PS) contribute 1/2 dq∧dphi.
// Multiport ports contribute nothing (they are pure constraints).
TwoForm build_two_form(const CircuitGraph& g);

// omega_z = K^T omega_2B K, exact; coordinates labeled from the kernel.
TwoForm pullback(const TwoForm& tf, const ConstraintSystem& cs,
                 const CircuitGraph& g);

struct ZeroModeSet {
    RMat basis;                  // dim x m, omega^T basis = 0 exactly
    std::vector<int> free_cols;  // defining coordinate of each vector
};

ZeroModeSet zero_modes(const TwoForm& tf);

// Exact canonical transform: x = S eta with S^T omega S = J, where eta is
// block-ordered (pair "position" coordinates first, conjugates second) and
// J = [[0, I], [-I, 0]]. The structured route (invertible charge-flux block,
// vanishing charge-charge block) shifts charge-like coordinates only, so
// compact flux coordinates pass through unchanged; otherwise falls back to
// symplectic Gram-Schmidt. Throws std::domain_error on degenerate omega and
// std::runtime_error if no compactness-preserving transform is found.
struct SymplecticTransform {
    RMat S;
    std::vector<CoordInfo> coords;  // labels/tags of eta
    int n_pairs = 0;
};

SymplecticTransform darboux(const TwoForm& tf);

}  // namespace netham
