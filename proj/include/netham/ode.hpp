#pragma once
// ode.hpp — small dense integrators used by the verification layer: an
// adaptive Dormand-Prince RK45 for canonical equations of motion, and a
// projection integrator for the unreduced constrained (DAE) formulation.
// These exist to check reductions, not to be a general ODE library.

#include "netham/hamiltonian.hpp"
#include "netham/reduce.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>

namespace netham {

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Adaptive RK45 (Dormand-Prince coefficients). Integrates y' = f(t, y) from
// t0 to t1; returns y(t1). Throws std::runtime_error when the step size
// underflows (non-convergence).
Eigen::VectorXd rk45(const OdeRhs& f, double t0, double t1, Eigen::VectorXd y,
                     double rtol = 1e-10, double atol = 1e-12);

// Canonical equations: omega zdot = grad H  =>  zdot = omega^{-1} grad H.
OdeRhs canonical_rhs(const NumericModel& h, const Eigen::MatrixXd& omega);

// Unreduced constrained system over z: omega is singular with zero modes W.
// Velocities solve the consistent stacked system
//   [omega; Wg^T; Wc^T quad] zdot = [grad H_T; 0; -Wc^T (d/dt drive)]
// in the least-squares sense, and each accepted step is projected back onto
// the affine constraint manifold Wc^T grad H_T(z, t) = 0.
struct DaeSystem {
    NumericModel h;
    Eigen::MatrixXd omega;
    Eigen::MatrixXd gauge;        // columns: gauge zero modes
    Eigen::MatrixXd constraints;  // columns: constraint zero modes

    Eigen::VectorXd velocity(double t, const Eigen::VectorXd& z) const;
    Eigen::VectorXd project(double t, Eigen::VectorXd z) const;
};

// Integrate the DAE by RK45 on the consistent velocity field with projection
// after every accepted macro step (interval subdivision at `n_project`
// points).
Eigen::VectorXd dae_integrate(const DaeSystem& sys, double t0, double t1,
                              Eigen::VectorXd z, int n_project = 64,
                              double rtol = 1e-10, double atol = 1e-12);

}  // namespace netham
