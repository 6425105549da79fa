#include "netham/bath.hpp"

#include "netham/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace netham {

namespace {

const Eigen::Matrix2d kJ = (Eigen::Matrix2d() << 0, 1, -1, 0).finished();

// integral of f over one bin [center - h/2, center + h/2]
double bin_integral(const std::function<double(double)>& f, double center,
                    double h) {
    return integrate(f, center - 0.5 * h, center + 0.5 * h, 1, 16);
}

// Principal-value Riemann sum: sum_k w_k / (Omega_k^2 - omega^2) where w_k is
// the delta weight 2*int_bin f of an even density f. Cells within a few bins
// of omega are excised and replaced by the analytic principal value over the
// excised window, with the density linearly interpolated from the bin
// weights.
double pv_riemann(const std::vector<double>& Omega,
                  const std::vector<double>& w, double dOmega, double omega) {
    const int n_ex = 3;
    double acc = 0;
    std::vector<double> parts;
    parts.reserve(Omega.size());
    int lo_k = -1, hi_k = -1;
    for (size_t k = 0; k < Omega.size(); ++k) {
        if (std::abs(Omega[k] - omega) < n_ex * dOmega) {
            if (lo_k < 0) lo_k = static_cast<int>(k);
            hi_k = static_cast<int>(k);
            continue;
        }
        parts.push_back(w[k] / ((Omega[k] - omega) * (Omega[k] + omega)));
    }
    acc = pairwise_sum(std::move(parts));

    // dense density table rho_k = w_k / (2 dOmega) on the ideal grid
    // Omega_k = (k+1) dOmega, robust to dropped zero-weight bins
    int K = 0;
    for (double Ok : Omega)
        K = std::max(K, static_cast<int>(std::lround(Ok / dOmega)));
    std::vector<double> dens(static_cast<size_t>(K), 0.0);
    for (size_t k = 0; k < Omega.size(); ++k) {
        int ki = static_cast<int>(std::lround(Omega[k] / dOmega)) - 1;
        if (ki >= 0 && ki < K)
            dens[static_cast<size_t>(ki)] = w[k] / (2.0 * dOmega);
    }
    auto rho = [&](double t) {
        // linear interpolation, constant extrapolation at the low edge
        // (the density is even and smooth through zero)
        double pos = t / dOmega - 1.0;
        if (pos <= 0.0) return dens.empty() ? 0.0 : dens[0];
        int k0 = static_cast<int>(std::floor(pos));
        double frac = pos - k0;
        auto at = [&](int k) {
            if (k < 0 || k >= K) return 0.0;
            return dens[static_cast<size_t>(k)];
        };
        return (1.0 - frac) * at(k0) + frac * at(k0 + 1);
    };

    // the [0, dOmega/2) sliver below the first bin (cells only start at
    // Omega_1); analytic quadrature with the extrapolated density
    if (omega > dOmega) {
        acc += integrate(
            [&](double t) { return 2.0 * rho(t) / ((t - omega) * (t + omega)); },
            0.0, 0.5 * dOmega, 4);
    }
    if (lo_k < 0) return acc;  // omega outside the discretized band

    double lo = Omega[static_cast<size_t>(lo_k)] - 0.5 * dOmega;
    double hi = Omega[static_cast<size_t>(hi_k)] + 0.5 * dOmega;
    if (!(lo < omega && omega < hi)) {
        // pole fell in the half-bin gap at the band edge: plain quadrature
        return acc + integrate(
                         [&](double t) {
                             return 2.0 * rho(t) /
                                    ((t - omega) * (t + omega));
                         },
                         lo, hi, 8);
    }
    return acc + principal_value(
                     [&](double t) { return 2.0 * rho(t) / (t + omega); }, lo,
                     hi, omega, 8);
}

Rational rat(double x) { return Rational(x); }

CoordInfo bath_coord(const std::string& label, CoordInfo::Sector sec) {
    CoordInfo c;
    c.label = label;
    c.topology = VarTopology::Extended;
    c.modulus.clear();
    c.sector = sec;
    return c;
}

int coord_index(const HamiltonianModel& h, const std::string& label) {
    for (int i = 0; i < h.dim(); ++i)
        if (h.coords[static_cast<size_t>(i)].label == label) return i;
    throw std::invalid_argument("coordinate not found: " + label);
}

// grow a model's quadratic form by `extra` zero rows/columns
HamiltonianModel grow(const HamiltonianModel& h, int extra) {
    HamiltonianModel out = h;
    int n = h.dim();
    out.quad = RMat::Zero(n + extra, n + extra);
    out.quad.topLeftCorner(n, n) = h.quad;
    out.linear = RVec::Zero(n + extra);
    out.linear.head(n) = h.linear;
    for (auto& c : out.cosines) {
        RVec k = RVec::Zero(n + extra);
        k.head(n) = c.wavevector;
        c.wavevector = k;
    }
    for (auto& d : out.drives) {
        RVec k = RVec::Zero(n + extra);
        k.head(n) = d.coeff;
        d.coeff = k;
    }
    return out;
}

}  // namespace

void ImmittanceTarget::validate(double tol) const {
    if (ports < 1) throw std::invalid_argument("target needs at least one port");
    auto check_sym = [&](const Eigen::MatrixXd& m, const char* what) {
        if (m.size() == 0) return;
        if (m.rows() != ports || m.cols() != ports)
            throw std::invalid_argument(std::string(what) + ": wrong dimension");
        if ((m - m.transpose()).norm() > tol * (m.norm() + 1))
            throw std::invalid_argument(std::string(what) + ": not symmetric");
    };
    check_sym(A0, "pole-at-zero block");
    check_sym(Ainf, "pole-at-infinity block");
    for (const auto& p : poles) {
        check_sym(p.A, "finite-pole symmetric part");
        if (p.B.size() &&
            (p.B + p.B.transpose()).norm() > tol * (p.B.norm() + 1))
            throw std::invalid_argument("finite-pole skew part: not skew");
        if (!(p.Omega > 0))
            throw std::invalid_argument("finite pole at nonpositive frequency");
    }
    if (!eval) throw std::invalid_argument("target has no evaluator");
    // passivity proxy: hermitian part positive semidefinite on a sample grid
    for (double w : {0.013, 0.19, 0.77, 1.4, 6.3, 41.0}) {
        Eigen::MatrixXcd z = eval(w);
        Eigen::MatrixXcd herm = 0.5 * (z + z.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
        if (es.eigenvalues().minCoeff() < -tol * (herm.norm() + 1))
            throw std::invalid_argument("target fails the passivity proxy");
    }
}

ImmittanceTarget resistor_oneport(double R) {
    if (!(R > 0)) throw std::invalid_argument("resistance must be positive");
    ImmittanceTarget t;
    t.kind = ImmittanceTarget::Kind::Admittance;
    t.ports = 1;
    t.eval = [R](double) {
        return Eigen::MatrixXcd::Constant(1, 1, 1.0 / R);
    };
    return t;
}

ImmittanceTarget series_rl_oneport(double R, double L) {
    if (!(R > 0 && L > 0))
        throw std::invalid_argument("element values must be positive");
    ImmittanceTarget t;
    t.kind = ImmittanceTarget::Kind::Admittance;
    t.ports = 1;
    t.eval = [R, L](double w) {
        std::complex<double> y = 1.0 / std::complex<double>(R, -w * L);
        return Eigen::MatrixXcd::Constant(1, 1, y);
    };
    return t;
}

ImmittanceTarget shunted_rlc_impedance(double R, double L, double C) {
    if (!(R > 0 && L > 0 && C > 0))
        throw std::invalid_argument("element values must be positive");
    ImmittanceTarget t;
    t.kind = ImmittanceTarget::Kind::Impedance;
    t.ports = 1;
    t.eval = [R, L, C](double w) {
        std::complex<double> y(1.0 / R, 1.0 / (w * L) - w * C);
        return Eigen::MatrixXcd::Constant(1, 1, 1.0 / y);
    };
    return t;
}

double nr_even_a(double C, double Y0, double G, double w) {
    double P = Y0 * Y0 + G * G - w * w * C * C;
    double D = P * P + 4 * w * w * C * C * Y0 * Y0;
    return Y0 * (Y0 * Y0 + w * w * C * C + G * G) / (M_PI * D);
}

double nr_even_b(double C, double Y0, double G, double w) {
    double P = Y0 * Y0 + G * G - w * w * C * C;
    double D = P * P + 4 * w * w * C * C * Y0 * Y0;
    return -2.0 * w * w * Y0 * C * G / (M_PI * D);
}

Eigen::Matrix2cd nr_target(double C, double Y0, double G, double omega) {
    std::complex<double> u(Y0, -omega * C);
    Eigen::Matrix2cd num = u * Eigen::Matrix2d::Identity() -
                           G * kJ.cast<std::complex<double>>();
    return num / (u * u + G * G);
}

ImmittanceTarget nr_twoport_impedance(double C, double Y0, double G) {
    if (!(C > 0 && Y0 > 0) || G < 0)
        throw std::invalid_argument("need C, Y0 > 0 and G >= 0");
    ImmittanceTarget t;
    t.kind = ImmittanceTarget::Kind::Impedance;
    t.ports = 2;
    t.eval = [C, Y0, G](double w) -> Eigen::MatrixXcd {
        return nr_target(C, Y0, G, w);
    };
    return t;
}

OnePortBath discretize_oneport(const ImmittanceTarget& t, double dOmega,
                               double Omega_max) {
    if (!(dOmega > 0 && Omega_max > dOmega))
        throw std::invalid_argument("need 0 < dOmega < Omega_max");
    if (t.ports != 1) throw std::invalid_argument("one-port target required");
    OnePortBath b;
    b.dOmega = dOmega;
    auto re = [&](double w) { return t.eval(w)(0, 0).real(); };
    int K = static_cast<int>(std::floor(Omega_max / dOmega));
    for (int k = 1; k <= K; ++k) {
        double Ok = k * dOmega;
        double weight = bin_integral(re, Ok, dOmega);  // = pi y_k Omega_k / 2
        if (weight < -1e-12 * dOmega)
            throw std::domain_error("negative real part: non-passive target");
        if (weight <= 0) continue;  // purely reactive bin carries no oscillator
        double yk = 2.0 * weight / (M_PI * Ok);
        b.Omega.push_back(Ok);
        b.y.push_back(yk);
        b.L.push_back(1.0 / (Ok * yk));
        b.C.push_back(yk / Ok);  // 1/(Omega_k^2 L_k)
    }
    return b;
}

double reconstruct_oneport_re(const OnePortBath& b, double omega) {
    if (b.Omega.empty()) return 0.0;
    int k = static_cast<int>(std::lround(omega / b.dOmega));
    for (size_t i = 0; i < b.Omega.size(); ++i) {
        int ki = static_cast<int>(std::lround(b.Omega[i] / b.dOmega));
        if (ki == k)
            return 0.5 * M_PI * b.y[i] * b.Omega[i] / b.dOmega;
    }
    return 0.0;
}

double reconstruct_oneport_im(const OnePortBath& b, double omega) {
    if (b.Omega.empty()) return 0.0;
    std::vector<double> w(b.size());
    for (size_t k = 0; k < b.size(); ++k) w[k] = b.y[k] * b.Omega[k];
    return -omega * pv_riemann(b.Omega, w, b.dOmega, omega);
}

HamiltonianModel emit_bath_hamiltonian(const OnePortBath& b,
                                       const HamiltonianModel& system,
                                       const std::string& flux_label,
                                       const std::string& charge_label,
                                       const Rational& C_port,
                                       OnePortConvention conv) {
    if (b.Omega.empty()) return system;
    const int n = system.dim();
    const int nb = static_cast<int>(b.size());
    const int fi = coord_index(system, flux_label);
    const int qi = coord_index(system, charge_label);
    HamiltonianModel out = grow(system, 2 * nb);
    for (int k = 0; k < nb; ++k) {
        const Rational Ck = rat(b.C[static_cast<size_t>(k)]);
        const Rational Lk = rat(b.L[static_cast<size_t>(k)]);
        const int pf = n + 2 * k;      // bath flux coordinate
        const int pq = n + 2 * k + 1;  // bath charge coordinate
        const std::string idx = std::to_string(k + 1);
        out.quad(pq, pq) += 1 / Ck;
        if (conv == OnePortConvention::SolvedLoopCharge) {
            out.coords.push_back(
                bath_coord("psi_" + idx, CoordInfo::Sector::Flux));
            out.coords.push_back(
                bath_coord("q_" + idx, CoordInfo::Sector::Charge));
            out.quad(pf, pf) += 1 / Lk;
            // (q + sum q_m)^2/(2C) on top of the system's q^2/(2C)
            out.quad(qi, pq) += 1 / C_port;
            out.quad(pq, qi) += 1 / C_port;
            for (int m = 0; m < k; ++m) {
                out.quad(pq, n + 2 * m + 1) += 1 / C_port;
                out.quad(n + 2 * m + 1, pq) += 1 / C_port;
            }
            out.quad(pq, pq) += 1 / C_port;
        } else {
            out.coords.push_back(
                bath_coord("phi_" + idx, CoordInfo::Sector::Flux));
            out.coords.push_back(
                bath_coord("q_" + idx, CoordInfo::Sector::Charge));
            // (Phi + phi_k)^2/(2 L_k) replaces the bare bath inductor
            out.quad(pf, pf) += 1 / Lk;
            out.quad(fi, pf) += 1 / Lk;
            out.quad(pf, fi) += 1 / Lk;
            out.quad(fi, fi) += 1 / Lk;
        }
    }
    return out;
}

NrTwoPortBath discretize_nr_twoport(double C, double Y0, double G,
                                    double dOmega, double Omega_max) {
    if (!(C > 0 && Y0 > 0) || G < 0)
        throw std::invalid_argument("need C, Y0 > 0 and G >= 0");
    if (!(dOmega > 0 && Omega_max > dOmega))
        throw std::invalid_argument("need 0 < dOmega < Omega_max");
    NrTwoPortBath b;
    b.dOmega = dOmega;
    auto fa = [&](double w) { return nr_even_a(C, Y0, G, w); };
    auto fb = [&](double w) { return nr_even_b(C, Y0, G, w); };
    int K = static_cast<int>(std::floor(Omega_max / dOmega));
    for (int k = 1; k <= K; ++k) {
        double Ok = k * dOmega;
        double ak = 2.0 * bin_integral(fa, Ok, dOmega);
        double bk = G == 0 ? 0.0 : 2.0 * bin_integral(fb, Ok, dOmega);
        if (ak <= 0) continue;
        b.Omega.push_back(Ok);
        b.a.push_back(ak);
        b.b.push_back(bk);
        double Rk = ak / (2.0 * dOmega) / Ok;  // z_k from the a-density
        b.R.push_back(Rk);
        b.C.push_back(1.0 / (Rk * Ok));
    }
    return b;
}

Eigen::Matrix2cd reconstruct_nr(const NrTwoPortBath& b, double omega) {
    double re1 = 0, imJ = 0;
    for (size_t k = 0; k < b.size(); ++k) {
        if (std::abs(b.Omega[k] - omega) <= 0.5 * b.dOmega) {
            re1 = 0.5 * M_PI * b.a[k] / b.dOmega;
            imJ = 0.5 * M_PI * b.b[k] / (omega * b.dOmega);
            break;
        }
    }
    double reJ = pv_riemann(b.Omega, b.b, b.dOmega, omega);
    double im1 = -omega * pv_riemann(b.Omega, b.a, b.dOmega, omega);
    Eigen::Matrix2cd z =
        re1 * Eigen::Matrix2d::Identity().cast<std::complex<double>>() +
        reJ * kJ.cast<std::complex<double>>();
    z += std::complex<double>(0, 1) *
         (im1 * Eigen::Matrix2d::Identity().cast<std::complex<double>>() +
          imJ * kJ.cast<std::complex<double>>());
    return z;
}

HamiltonianModel emit_nr_bath_hamiltonian(const NrTwoPortBath& b) {
    HamiltonianModel h;
    const int nb = static_cast<int>(b.size());
    h.quad = RMat::Zero(2 * nb, 2 * nb);
    h.linear = RVec::Zero(2 * nb);
    for (int k = 0; k < nb; ++k) {
        const Rational Ck = rat(b.C[static_cast<size_t>(k)]);
        const Rational Rk = rat(b.R[static_cast<size_t>(k)]);
        const std::string idx = std::to_string(k + 1);
        h.coords.push_back(
            bath_coord("psi_a_" + idx, CoordInfo::Sector::Flux));
        h.coords.push_back(
            bath_coord("q_a_" + idx, CoordInfo::Sector::Charge));
        h.quad(2 * k, 2 * k) = 1 / (Ck * Rk * Rk);
        h.quad(2 * k + 1, 2 * k + 1) = 1 / Ck;
    }
    return h;
}

}  // namespace netham
