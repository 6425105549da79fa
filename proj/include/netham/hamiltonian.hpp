#pragma once
// hamiltonian.hpp — total energy H_T = H + H_d(t) over a labeled coordinate
// set: quadratic capacitive/inductive forms, Josephson/phase-slip cosines,
// and source couplings. Coefficients stay exact rationals; numeric evaluation
// (values, gradients) happens in doubles through a compiled view.

#include "netham/constraints.hpp"
#include "netham/netlist.hpp"

#include <string>
#include <vector>

namespace netham {

// One term -E * cos(2*pi * (k.x + phase) / modulus).
struct CosineTerm {
    Rational amplitude;   // E, joule
    RVec wavevector;      // k, rational row over coordinates
    Rational phase = 0;   // same units as k.x
    std::string modulus;  // Phi_Q or 2e
};

struct DriveTerm {
    RVec coeff;          // H_d += (coeff . x) * waveform(t)
    Waveform waveform;
    std::string source;  // branch id, for reports
};

struct HamiltonianModel {
    std::vector<CoordInfo> coords;
    RMat quad;                       // H ⊇ 1/2 x^T quad x, symmetric
    RVec linear;                     // H ⊇ linear . x
    std::vector<CosineTerm> cosines;
    std::vector<DriveTerm> drives;

    int dim() const { return static_cast<int>(coords.size()); }
};

// Moduli are symbolic in the model; evaluation needs numbers. Defaults are 1
// (nondimensional convention, documented in the README); physical values can
// be supplied when SI output is wanted.
struct EvalContext {
    double flux_quantum = 1.0;  // value of Phi_Q
    double charge_2e = 1.0;     // value of 2e
    double modulus_value(const std::string& m) const;
};

// Dense double view for hot loops (integrators, finite differences).
struct NumericModel {
    Eigen::MatrixXd quad;
    Eigen::VectorXd linear;
    struct Cos { double amplitude, phase; Eigen::VectorXd k; };  // k premultiplied by 2*pi/modulus
    std::vector<Cos> cosines;
    std::vector<const DriveTerm*> drives;

    double value(const Eigen::VectorXd& x, double t) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x, double t) const;
};

NumericModel make_numeric(const HamiltonianModel& h, const EvalContext& ctx = {});

// Branch constitutive energies composed with the kernel map dzeta = K dz.
// Linear elements produce quadratic terms, JJ/PS produce cosines, driven
// sources produce drive rows (q_V * v(t), phi_I * i(t)).
HamiltonianModel assemble_energy(const CircuitGraph& g, const ConstraintSystem& cs);

// x_old = M x_new + offset; applies congruence to quad, composes wavevectors
// and drive rows, folds offsets into cosine phases and the linear term.
// Requires square invertible M (throws std::domain_error otherwise).
HamiltonianModel change_coordinates(const HamiltonianModel& h, const RMat& M,
                                    const RVec& offset,
                                    std::vector<CoordInfo> new_coords);

// Coefficient-level periodicity: H_T(x + modulus*e_i) == H_T(x) exactly for
// every compact coordinate i. Requires zero quad/linear/drive coefficients on
// i and integer cosine winding (matching modulus). Returns the first failing
// coordinate label, or empty when the model is exactly periodic.
std::string periodicity_violation(const HamiltonianModel& h);

}  // namespace netham
