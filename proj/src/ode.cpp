#include "netham/ode.hpp"

#include <cmath>

namespace netham {

Eigen::VectorXd rk45(const OdeRhs& f, double t0, double t1, Eigen::VectorXd y,
                     double rtol, double atol) {
    // Dormand-Prince 5(4) tableau
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static const double a51 = 19372. / 6561, a52 = -25360. / 2187,
                        a53 = 64448. / 6561, a54 = -212. / 729;
    static const double a61 = 9017. / 3168, a62 = -355. / 33,
                        a63 = 46732. / 5247, a64 = 49. / 176,
                        a65 = -5103. / 18656;
    static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                        b5 = -2187. / 6784, b6 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920,
                        e5 = -17253. / 339200, e6 = 22. / 525, e7 = -1. / 40;

    double t = t0;
    double span = t1 - t0;
    if (span == 0) return y;
    double dir = span > 0 ? 1.0 : -1.0;
    double h = span / 100.0;
    const double hmin = std::abs(span) * 1e-14;

    Eigen::VectorXd k1 = f(t, y);
    while ((t1 - t) * dir > 0) {
        if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
        Eigen::VectorXd k2 = f(t + c2 * h, y + h * (a21 * k1));
        Eigen::VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Eigen::VectorXd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Eigen::VectorXd k5 =
            f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Eigen::VectorXd k6 = f(
            t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Eigen::VectorXd ynew =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Eigen::VectorXd k7 = f(t + h, ynew);
        Eigen::VectorXd err_v =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            err = std::max(err, std::abs(err_v(i)) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = std::move(ynew);
            k1 = std::move(k7);  // FSAL
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) < hmin)
            throw std::runtime_error("rk45: step size underflow");
    }
    return y;
}

OdeRhs canonical_rhs(const NumericModel& h, const Eigen::MatrixXd& omega) {
    Eigen::MatrixXd om_inv = omega.inverse();
    return [h, om_inv](double t, const Eigen::VectorXd& z) {
        return Eigen::VectorXd(om_inv * h.gradient(z, t));
    };
}

Eigen::VectorXd DaeSystem::velocity(double t, const Eigen::VectorXd& z) const {
    const Eigen::Index n = z.size();
    const Eigen::Index ng = gauge.cols(), nc = constraints.cols();
    Eigen::MatrixXd M(n + ng + nc, n);
    Eigen::VectorXd rhs(n + ng + nc);
    M.topRows(n) = omega;
    rhs.head(n) = h.gradient(z, t);
    M.middleRows(n, ng) = gauge.transpose();
    rhs.segment(n, ng).setZero();
    M.bottomRows(nc) = constraints.transpose() * h.quad;
    // d/dt of W^T grad H_T = W^T quad zdot + W^T drive-coeff * v'(t) = 0
    for (Eigen::Index j = 0; j < nc; ++j) {
        double s = 0;
        for (const auto* d : h.drives) {
            double wd = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                wd += constraints(i, j) * to_double(d->coeff(i));
            s += wd * d->waveform.derivative(t);
        }
        rhs(n + ng + j) = -s;
    }
    return M.colPivHouseholderQr().solve(rhs);
}

Eigen::VectorXd DaeSystem::project(double t, Eigen::VectorXd z) const {
    const Eigen::Index nc = constraints.cols();
    if (nc == 0) return z;
    // residual r(z) = Wc^T grad H_T(z, t); correct along minimal-norm delta
    Eigen::MatrixXd C = constraints.transpose() * h.quad;  // nc x n
    Eigen::VectorXd r = constraints.transpose() * h.gradient(z, t);
    Eigen::MatrixXd CCt = C * C.transpose();
    z -= C.transpose() * CCt.ldlt().solve(r);
    return z;
}

Eigen::VectorXd dae_integrate(const DaeSystem& sys, double t0, double t1,
                              Eigen::VectorXd z, int n_project, double rtol,
                              double atol) {
    OdeRhs f = [&sys](double t, const Eigen::VectorXd& y) {
        return sys.velocity(t, y);
    };
    z = sys.project(t0, std::move(z));
    double dt = (t1 - t0) / n_project;
    for (int i = 0; i < n_project; ++i) {
        double ta = t0 + i * dt, tb = i + 1 == n_project ? t1 : ta + dt;
        z = rk45(f, ta, tb, std::move(z), rtol, atol);
        z = sys.project(tb, std::move(z));
    }
    return z;
}

}  // namespace netham
