#pragma once
// spectral.hpp — continuum back end for transmission lines terminated by a
// lumped capacitive/inductive/gyrative block at x = 0. Solves the boundary
// eigenproblem of the mode operator in the doubled (flux, charge) space,
// builds the conjugate F/G mode basis with its exact normalization, evaluates
// sum rules and junction coupling parameters, finds the discrete spectra of
// finite-length lines, and locates the poles of a finite line's input
// impedance (partial-fraction / ladder synthesis view).
//
// Units: inputs are the rescaled boundary matrices
//   A = c^{-1/2} C c^{-1/2},  B^{-1} = c^{1/2} L c^{1/2} inverted,
//   G = c^{-1/2} Y c^{-1/2} (skew),  Delta_i = 1/(l_i c_i)  (squared speeds),
// so every frequency below is an angular frequency in the same time unit.

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace netham {

struct BoundarySpec {
    Eigen::MatrixXd A;      // symmetric positive definite, N x N
    Eigen::MatrixXd Binv;   // symmetric positive definite, N x N
    Eigen::MatrixXd G;      // skew, N x N
    Eigen::VectorXd Delta;  // positive, length N

    int n() const { return static_cast<int>(Delta.size()); }
    void validate(double tol = 1e-12) const;  // throws std::invalid_argument
};

// 2N x 2N symmetric block matrix [[M, S], [-S, M]] whose eigenpairs carry the
// boundary normalization of the mode basis; eigenvalues are doubly
// degenerate, the two partners of a pair being (e, r) and (-r, e).
Eigen::MatrixXd assemble_boundary_gram(const BoundarySpec& s, double Omega);

struct ModePair {
    double m = 0;         // Gram eigenvalue (normalization sqrt(2/(pi m)))
    Eigen::VectorXd e, r; // unit-norm representative of the degenerate pair
};

struct ModePoint {
    double Omega = 0;          // requested frequency
    double Omega_used = 0;     // may differ if the point sat on a singular
                               // frequency of the boundary response
    bool perturbed = false;
    std::vector<ModePair> pairs;  // N entries
    Eigen::MatrixXd UF0, UG0;     // N x N, column lambda = U(0) of F/G mode
};

// Diagonalizes the boundary Gram matrix at Omega, pairs the degenerate
// eigenvectors by the (e, r) <-> (-r, e) symmetry, and tabulates boundary
// values. Points within `sing_tol` (relative) of a zero of the boundary
// response det(B^-1~ - Omega^2 A~) are offset by `sing_offset` (relative)
// and flagged.
ModePoint solve_modes(const BoundarySpec& s, double Omega,
                      double sing_tol = 1e-12, double sing_offset = 1e-8);

// Flux (U) and charge (V) components of the F- or G-type mode at position x.
struct ModeField {
    Eigen::VectorXd U, V;
};
ModeField eval_mode_F(const BoundarySpec& s, const ModePair& p, double Omega,
                      double x);
ModeField eval_mode_G(const BoundarySpec& s, const ModePair& p, double Omega,
                      double x);

// Closed form of the boundary flux amplitude for one line with a purely
// capacitive/inductive block (N = 1, G = 0):
//   U(0)^2 = Delta^{-1/2} * 2 Om^2 / (pi (Om^2 + (a0 Om^2 - 1/b0)^2 / Delta)).
double single_line_U0(double a0, double b0, double Delta, double Omega);

// Sum rule: integral over (0, inf) of sum_lambda U^F(0)U^F(0)^T +
// U^G(0)U^G(0)^T equals A^{-1} exactly; evaluated on a log-spaced grid up to
// Omega_max with a 1/Omega tail estimated from the large-Omega integrand.
struct SumRuleResult {
    Eigen::MatrixXd integral;  // quadrature value including tail
    Eigen::MatrixXd tail;      // the added tail estimate
    double residual_rel = 0;   // ||integral - A^{-1}|| / ||A^{-1}||
};
SumRuleResult sum_rule_capacitive(const BoundarySpec& s, double Omega_max,
                                  int panels = 256);

// Junction coupling parameters for one line with capacitive coupling block
// (a0, a0J~) and inductive shunt (b0, b0J~): gC = (a0/a0J~) U(0) sqrt(Om/2),
// gL = U(0) / (b0J~ sqrt(2 Om)). Normalization fixed by writing the dressed
// harmonic amplitudes in quanta, published here as the code's convention.
struct CouplingSweep {
    std::vector<double> Omega, gC, gL;
    double slope_C = 0, slope_L = 0;  // log-log slopes over the top decade
    double lamb_proxy = 0;            // quadrature of (gC^2 + gL^2)/Omega
};
CouplingSweep coupling_sweep(double a0, double b0, double Delta, double a0J,
                             double b0J, double Omega_min, double Omega_max,
                             int points);

// General multiline coupling report for a junction sector attached through
// capacitive blocks (inverse-capacitance blocks C0inv, C0Jinv, CJinv),
// inductive blocks (L0inv, L0Jinv, LJinv), a junction gyration YJ (skew) and
// a line-junction gyration Y0J; c holds the per-line capacitance densities.
struct JunctionBlocks {
    Eigen::MatrixXd C0inv, C0Jinv, CJinv;
    Eigen::MatrixXd L0inv, L0Jinv, LJinv;
    Eigen::MatrixXd YJ, Y0J;
    Eigen::VectorXd c;
};
struct CouplingReport {
    Eigen::MatrixXd GammaQ;     // A0 * (c^{1/2} C0Jinv)
    Eigen::MatrixXd GammaPhi;   // G0J~ + GammaQ YJ
    Eigen::MatrixXd Umat;       // integrated antisymmetric boundary matrix
    Eigen::MatrixXd CJtilde_inv;
    Eigen::MatrixXd LJtilde_inv;  // dressed inductive matrix
    Eigen::MatrixXd cross;        // residual charge-flux bilinear coefficient
};
CouplingReport couplings(const BoundarySpec& s, const JunctionBlocks& jb,
                         double Omega_max, int panels = 256);

// Finite lines of common length d: far-end condition per line.
struct FarEnd {
    enum class Kind { Open, Short, Capacitive } kind = Kind::Open;
    double a_d = 0;  // rescaled terminating capacitance (Capacitive only)
};
struct FiniteSpec {
    BoundarySpec b;  // x = 0 block; G must be zero for the discrete solver
    double d = 0;
    std::vector<FarEnd> far;  // one per line
};

// Discrete eigenfrequencies in (0, Omega_max]. The flux-sector quantization
// condition is det R(Omega) = 0 with R collecting the x = 0 block rows and
// the far-end rows; roots located by scanning and bisection. Throws
// std::runtime_error if a sign-change bracket fails to converge.
std::vector<double> finite_line_spectrum(const FiniteSpec& fs, double Omega_max);

// Flux mode shape of a finite-line eigenfrequency: U(x) with the boundary
// row structure, normalized to max-abs 1. Also reports the far-end dual
// charge value per line, V_i(d) = Delta_i U_i'(d) / (Omega a_d) for a
// capacitive end (so V(d) = Omega U(d) expresses the far-end condition).
struct FiniteMode {
    double Omega = 0;
    std::function<Eigen::VectorXd(double)> U;
    Eigen::VectorXd V_d;  // capacitive ends only; 0 elsewhere
};
FiniteMode finite_line_mode(const FiniteSpec& fs, double Omega);

// Input-impedance poles of one finite line seen from its port: an open far
// end gives a pole at zero (series capacitor C0 = c d in the ladder
// synthesis) plus poles at n pi / (d sqrt(l c)); a shorted far end has no
// leading capacitor and poles at (2n-1) pi / (2 d sqrt(l c)). Located by
// bracketed root finding on the trigonometric denominator.
struct FosterPoles {
    bool has_series_cap = false;
    double C0 = 0;
    std::vector<double> poles;
};
FosterPoles foster_poles(double c, double l, double d, bool open_end,
                         int count);

}  // namespace netham
