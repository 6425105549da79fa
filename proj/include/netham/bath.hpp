#pragma once
// bath.hpp — Caldeira-Leggett discretization of dissipative environments:
// one-port admittances/impedances become dense LC ladders, nonreciprocal
// two-ports become gyrator-coupled capacitor pairs. Bin weights are exact
// integrals of the target's real part over each frequency bin (removes the
// O(dOmega) bias of midpoint sampling next to poles), and reconstruction of
// the target response is a Riemann sum with principal-value handling by
// symmetric excision plus an analytic correction over the excised window.
//
// Distribution conventions (boundary value at s = -i omega + 0+, J the
// 2x2 skew unit [[0,1],[-1,0]]): each finite pole contributes
//   Z_k(omega) = (pi/2)[d(w-O_k)+d(w+O_k)] A_k
//              + (i pi/(2 O_k))[d(w-O_k)-d(w+O_k)] B_k
//              + PV B_k/(O_k^2-w^2) - i PV w A_k/(O_k^2-w^2),
// so with even densities a, b the continuum reconstruction is
//   Z(w) = pi a(w) 1 + PV_int b J + i [ (pi b(w)/w) J - w PV_int a 1 ].

#include "netham/hamiltonian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace netham {

// One finite pole of a canonical multiport fraction expansion:
// Z_k(s) = (s A + B) / (s^2 + Omega^2), A symmetric, B skew.
struct PoleTerm {
    double Omega = 0;
    Eigen::MatrixXd A, B;
};

// Analytic immittance target: closed-form boundary evaluator plus the
// symbolic pole structure at zero and infinity (those are realized as lumped
// elements, never discretized).
struct ImmittanceTarget {
    enum class Kind { Admittance, Impedance } kind = Kind::Admittance;
    int ports = 1;
    Eigen::MatrixXd A0, Ainf;    // pole-at-zero / pole-at-infinity blocks
    std::vector<PoleTerm> poles; // finite poles when given in assembled form
    std::function<Eigen::MatrixXcd(double)> eval;  // value at real omega

    // Checks dimensions, A0/Ainf/A_k symmetry, B_k skewness, and a passivity
    // proxy (hermitian part of eval positive semidefinite) on a sample grid.
    void validate(double tol = 1e-9) const;
};

ImmittanceTarget resistor_oneport(double R);
ImmittanceTarget series_rl_oneport(double R, double L);
// Impedance of a parallel RLC shunt: Re Z is a Lorentzian at 1/sqrt(LC).
ImmittanceTarget shunted_rlc_impedance(double R, double L, double C);
// Two-port of a gyrator (G = 1/R) with per-port capacitors C and
// conductances Y0: Z(w) = [(-i w C + Y0) 1 - G J]/((-i w C + Y0)^2 + G^2).
ImmittanceTarget nr_twoport_impedance(double C, double Y0, double G);

// Even scalar densities of the nonreciprocal two-port target; b carries the
// sign that makes the reconstruction formula above reproduce the target.
double nr_even_a(double C, double Y0, double G, double omega);
double nr_even_b(double C, double Y0, double G, double omega);

// ---------------------------------------------------------------------------
// One-port discretization: oscillators at Omega_k = k dOmega whose delta
// weights (pi y_k Omega_k / 2) match the bin integrals of the target's real
// part; L_k = 1/(Omega_k y_k), C_k = 1/(Omega_k^2 L_k). Bins with zero weight
// (purely reactive targets) are dropped, so all stored elements are positive.
struct OnePortBath {
    double dOmega = 0;
    std::vector<double> Omega, y, L, C;
    size_t size() const { return Omega.size(); }
};

// Throws std::domain_error when a bin integral of the real part is negative
// (non-passive target).
OnePortBath discretize_oneport(const ImmittanceTarget& t, double dOmega,
                               double Omega_max);

// Real part reconstructed as the bin's delta weight spread over its width;
// zero outside the discretized band.
double reconstruct_oneport_re(const OnePortBath& b, double omega);
// Imaginary part as the principal-value Riemann sum
//   -omega sum_k y_k Omega_k / (Omega_k^2 - omega^2).
double reconstruct_oneport_im(const OnePortBath& b, double omega);

// Which circuit charge was solved through the constraint two-form; the two
// resulting Hamiltonians are related by a symplectic map.
enum class OnePortConvention { SolvedLoopCharge, SolvedCapacitorCharge };

// Append the bath pairs to `system`. The system model must contain an
// extended flux coordinate `flux_label` and its conjugate charge
// `charge_label`, with the port capacitor energy q^2/(2 C_port) already in
// its quadratic form. SolvedLoopCharge keeps pairs (psi_k, q_k) and dresses
// the capacitor to (q + sum q_k)^2/(2 C_port); SolvedCapacitorCharge keeps
// pairs (phi_k, q_k) and dresses the bath inductors to (Phi + phi_k)^2/(2 L_k).
// An empty bath returns `system` unchanged.
HamiltonianModel emit_bath_hamiltonian(const OnePortBath& b,
                                       const HamiltonianModel& system,
                                       const std::string& flux_label,
                                       const std::string& charge_label,
                                       const Rational& C_port,
                                       OnePortConvention conv);

// ---------------------------------------------------------------------------
// Nonreciprocal two-port discretization: per-bin delta weights a_k, b_k are
// exact bin integrals of 2 a, 2 b (the factor 2 folds the negative-frequency
// half of the even densities); the realization is a capacitor pair coupled by
// a gyrator with R_k = a_k-density/Omega_k and C_k = 1/(R_k Omega_k), so the
// pair oscillates at Omega_k.
struct NrTwoPortBath {
    double dOmega = 0;
    std::vector<double> Omega, a, b;  // delta weights per bin
    std::vector<double> R, C;         // circuit realization per bin
    size_t size() const { return Omega.size(); }
};

NrTwoPortBath discretize_nr_twoport(double C, double Y0, double G,
                                    double dOmega, double Omega_max);

Eigen::Matrix2cd nr_target(double C, double Y0, double G, double omega);
// Riemann-sum reconstruction from the bin weights alone (delta parts as bin
// densities, principal values by symmetric excision with a linearly
// interpolated density over the excised window).
Eigen::Matrix2cd reconstruct_nr(const NrTwoPortBath& b, double omega);

// Independent-oscillator Hamiltonian of the nonreciprocal bath: pair
// (psi_k^a, q_k^a) per bin with H_k = q^2/(2 C_k) + psi^2/(2 C_k R_k^2),
// an oscillator at frequency 1/(R_k C_k) = Omega_k. Empty bath -> empty model.
HamiltonianModel emit_nr_bath_hamiltonian(const NrTwoPortBath& b);

}  // namespace netham
