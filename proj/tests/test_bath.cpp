#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netham/bath.hpp"
#include "netham/ode.hpp"
#include "netham/quadrature.hpp"

#include <cmath>
#include <complex>

using namespace netham;

namespace {

// principal value of the full-line integral of an even density against
// 1/(Omega^2 - omega^2), with an analytic 1/Omega^4 tail beyond the range
double pv_full_line(const std::function<double(double)>& f, double omega,
                    double hi, double tail_coeff) {
    double body = principal_value(
        [&](double t) { return 2.0 * f(t) / (t + omega); }, 1e-8, hi, omega,
        800);
    return body + tail_coeff / (3.0 * hi * hi * hi);
}

// canonical RHS for a model whose coordinates alternate (flux, charge) pairs
OdeRhs pair_rhs(const NumericModel& nm,
                const std::vector<std::pair<int, int>>& pairs) {
    return [nm, pairs](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd g = nm.gradient(x, t);
        Eigen::VectorXd dx = Eigen::VectorXd::Zero(x.size());
        for (auto [f, q] : pairs) {
            dx(f) = g(q);
            dx(q) = -g(f);
        }
        return dx;
    };
}

HamiltonianModel lc_system(const Rational& C, const Rational& L) {
    HamiltonianModel h;
    CoordInfo phi, q;
    phi.label = "Phi";
    phi.topology = VarTopology::Extended;
    phi.sector = CoordInfo::Sector::Flux;
    q.label = "q_l";
    q.topology = VarTopology::Extended;
    q.sector = CoordInfo::Sector::Charge;
    h.coords = {phi, q};
    h.quad = RMat::Zero(2, 2);
    h.quad(0, 0) = 1 / L;
    h.quad(1, 1) = 1 / C;
    h.linear = RVec::Zero(2);
    return h;
}

}  // namespace

TEST_CASE("resistor bath weights and reconstruction are exactly flat") {
    double R = 3.7, dOmega = 0.05, Omega_max = 500.0;
    OnePortBath b = discretize_oneport(resistor_oneport(R), dOmega, Omega_max);
    REQUIRE(!b.Omega.empty());
    for (size_t k = 0; k < b.size(); ++k) {
        CHECK(b.y[k] ==
              doctest::Approx(2.0 * dOmega / (M_PI * R * b.Omega[k]))
                  .epsilon(1e-12));
        CHECK(b.L[k] > 0);
        CHECK(b.C[k] > 0);
    }
    // two decades, within 2 percent (bin-integral weights make it exact)
    for (double w = 0.1; w < 10.0; w *= 1.15) {
        CHECK(std::abs(reconstruct_oneport_re(b, w) - 1.0 / R) <=
              0.02 / R);
        // a flat real part has vanishing imaginary part
        CHECK(std::abs(reconstruct_oneport_im(b, w)) <= 0.02 / R);
    }
}

TEST_CASE("purely reactive target yields an empty oscillator list") {
    ImmittanceTarget cap;
    cap.kind = ImmittanceTarget::Kind::Admittance;
    cap.ports = 1;
    cap.Ainf = Eigen::MatrixXd::Constant(1, 1, 2.0);  // Y = sC, C = 2
    cap.eval = [](double w) {
        return Eigen::MatrixXcd::Constant(1, 1, std::complex<double>(0, -2.0 * w));
    };
    cap.validate();
    OnePortBath b = discretize_oneport(cap, 0.1, 10.0);
    CHECK(b.Omega.empty());
    // and an empty bath leaves the system model untouched
    HamiltonianModel sys = lc_system(Rational(1), Rational(1));
    HamiltonianModel out = emit_bath_hamiltonian(
        b, sys, "Phi", "q_l", Rational(1), OnePortConvention::SolvedLoopCharge);
    CHECK(out.dim() == sys.dim());
    CHECK(out.quad == sys.quad);
}

TEST_CASE("non-passive target is rejected") {
    ImmittanceTarget bad;
    bad.ports = 1;
    bad.eval = [](double) {
        return Eigen::MatrixXcd::Constant(1, 1, -1.0);
    };
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(discretize_oneport(bad, 0.1, 5.0), std::domain_error);
}

TEST_CASE("reconstruction error decays linearly in the bin width") {
    ImmittanceTarget t = series_rl_oneport(1.0, 1.0);
    auto reY = [](double w) { return 1.0 / (1.0 + w * w); };
    std::vector<double> grid;
    for (int i = 0; i < 300; ++i)
        grid.push_back(0.1 * std::pow(100.0, i / 299.0));
    std::vector<double> lw, le;
    for (double dOmega : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        OnePortBath b = discretize_oneport(t, dOmega, 50.0);
        double acc = 0;
        for (double w : grid) {
            double d = reconstruct_oneport_re(b, w) - reY(w);
            acc += d * d;
        }
        lw.push_back(std::log(dOmega));
        le.push_back(std::log(std::sqrt(acc / grid.size())));
    }
    double n = lw.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lw.size(); ++i) {
        sx += lw[i];
        sy += le[i];
        sxx += lw[i] * lw[i];
        sxy += lw[i] * le[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("imaginary part from the real-part bins matches the target") {
    // Kramers-Kronig consistency on a non-flat admittance
    ImmittanceTarget t = series_rl_oneport(1.0, 1.0);
    OnePortBath b = discretize_oneport(t, 0.005, 200.0);
    for (double w = 0.1; w < 10.0; w *= 1.2) {
        double target = (w * 1.0) / (1.0 + w * w);  // Im 1/(R - i w L)
        double scale = std::abs(std::complex<double>(1.0, -w) / (1.0 + w * w));
        CHECK(std::abs(reconstruct_oneport_im(b, w) - target) <=
              0.03 * scale);
    }
}

TEST_CASE("shunted-RLC impedance real part reconstructed within 2 percent L2") {
    ImmittanceTarget t = shunted_rlc_impedance(2.0, 1.0, 1.0);
    OnePortBath b = discretize_oneport(t, 0.002, 100.0);
    double num = 0, den = 0;
    for (int i = 0; i < 200; ++i) {
        double w = 0.1 * std::pow(100.0, i / 199.0);
        double ref = t.eval(w)(0, 0).real();
        double d = reconstruct_oneport_re(b, w) - ref;
        num += d * d;
        den += ref * ref;
    }
    CHECK(std::sqrt(num / den) <= 0.02);
}

TEST_CASE("bath-dressed oscillator reproduces the direct circuit dynamics") {
    const double Cs = 1.0, Ls = 1.0;  // system LC
    ImmittanceTarget t = series_rl_oneport(2.0, 0.5);
    OnePortBath b = discretize_oneport(t, 1.3, 2.0);  // a single oscillator
    REQUIRE(b.size() == 1);
    HamiltonianModel sys = lc_system(Rational(1), Rational(1));
    HamiltonianModel hl = emit_bath_hamiltonian(
        b, sys, "Phi", "q_l", Rational(1), OnePortConvention::SolvedLoopCharge);
    REQUIRE(hl.dim() == 4);
    NumericModel nm = make_numeric(hl);

    // canonical integration of H = (q_l+q_1)^2/2C + Phi^2/2L + q_1^2/2C_1
    //                              + psi_1^2/2L_1
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
    x0(0) = 1.0;  // Phi
    auto rhs = pair_rhs(nm, {{0, 1}, {2, 3}});
    double t1 = 10.0;
    Eigen::VectorXd xT = rk45(rhs, 0.0, t1, x0);

    // direct second-order circuit equations: node C Phi'' + Phi/L + q' = 0,
    // branch L_1 q'' + q/C_1 = Phi'
    double L1 = b.L[0], C1 = b.C[0];
    OdeRhs direct = [&](double, const Eigen::VectorXd& s) {
        Eigen::VectorXd ds(4);  // (Phi, Phi', q, q')
        ds(0) = s(1);
        ds(1) = -(s(0) / Ls + s(3)) / Cs;
        ds(2) = s(3);
        ds(3) = (s(1) - s(2) / C1) / L1;
        return ds;
    };
    Eigen::VectorXd s0(4);
    s0 << 1.0, 0.0, 0.0, 0.0;
    Eigen::VectorXd sT = rk45(direct, 0.0, t1, s0);
    CHECK(xT(0) == doctest::Approx(sT(0)).epsilon(1e-8));

    // the solved-capacitor-charge convention is the same dynamics in other
    // coordinates: Phi(t) must agree
    HamiltonianModel hc =
        emit_bath_hamiltonian(b, sys, "Phi", "q_l", Rational(1),
                              OnePortConvention::SolvedCapacitorCharge);
    NumericModel nc = make_numeric(hc);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(4);
    y0(0) = 1.0;           // Phi
    y0(2) = -1.0;          // phi_1 = psi_1 - Phi
    Eigen::VectorXd yT = rk45(pair_rhs(nc, {{0, 1}, {2, 3}}), 0.0, t1, y0);
    CHECK(yT(0) == doctest::Approx(xT(0)).epsilon(1e-8));
}

TEST_CASE("nonreciprocal principal-value identities hold numerically") {
    double C = 1.0, Y0 = 1.3, G = 0.8;
    auto fa = [&](double w) { return nr_even_a(C, Y0, G, w); };
    auto fb = [&](double w) { return nr_even_b(C, Y0, G, w); };
    double ta = 2.0 * Y0 / (M_PI * C * C);       // a ~ ta / Omega^2
    double tb = -4.0 * Y0 * G / (M_PI * C * C);  // b ~ tb / Omega^2
    for (double w : {0.3, 0.9, 1.7, 4.2}) {
        double P = Y0 * Y0 + G * G - w * w * C * C;
        double D = P * P + 4 * w * w * C * C * Y0 * Y0;
        double ia = pv_full_line(fa, w, 300.0, ta);
        double ib = pv_full_line(fb, w, 300.0, tb);
        CHECK(ia == doctest::Approx(-C * (Y0 * Y0 + w * w * C * C - G * G) / D)
                        .epsilon(1e-4));
        CHECK(ib == doctest::Approx(-G * (Y0 * Y0 - w * w * C * C + G * G) / D)
                        .epsilon(1e-4));
    }
}

TEST_CASE("nonreciprocal two-port reconstruction matches the target response") {
    double C = 1.0, Y0 = 1.0, G = 0.7;
    nr_twoport_impedance(C, Y0, G).validate();
    NrTwoPortBath b = discretize_nr_twoport(C, Y0, G, 0.005, 60.0);
    for (size_t k = 0; k < b.size(); ++k) {
        CHECK(b.R[k] > 0);
        CHECK(b.C[k] > 0);
    }
    for (int i = 0; i < 40; ++i) {
        double w = 0.1 * std::pow(100.0, i / 39.0);
        Eigen::Matrix2cd ref = nr_target(C, Y0, G, w);
        Eigen::Matrix2cd rec = reconstruct_nr(b, w);
        double scale = ref.norm();
        CHECK((rec.real() - ref.real()).norm() <= 0.02 * scale);
        CHECK((rec.imag() - ref.imag()).norm() <= 0.03 * scale);
        // hermitian-part positivity of the reconstruction (passivity)
        Eigen::Matrix2cd herm = 0.5 * (rec + rec.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(herm);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * scale);
    }
}

TEST_CASE("zero gyration degenerates to two reciprocal one-ports exactly") {
    double C = 0.8, Y0 = 1.1, dOmega = 0.02, Omega_max = 30.0;
    NrTwoPortBath b = discretize_nr_twoport(C, Y0, 0.0, dOmega, Omega_max);
    for (double bk : b.b) CHECK(bk == 0.0);

    // same weights as a one-port discretization of the scalar diagonal
    ImmittanceTarget scalar;
    scalar.kind = ImmittanceTarget::Kind::Impedance;
    scalar.ports = 1;
    scalar.eval = [C, Y0](double w) {
        return Eigen::MatrixXcd::Constant(
            1, 1, 1.0 / std::complex<double>(Y0, -w * C));
    };
    OnePortBath op = discretize_oneport(scalar, dOmega, Omega_max);
    REQUIRE(op.size() == b.size());
    for (size_t k = 0; k < b.size(); ++k)
        CHECK(b.a[k] ==
              doctest::Approx(op.y[k] * op.Omega[k]).epsilon(1e-12));

    // off-diagonal parts of the reconstruction vanish identically
    Eigen::Matrix2cd rec = reconstruct_nr(b, 1.0);
    CHECK(std::abs(rec(0, 1)) == 0.0);
    CHECK(std::abs(rec(1, 0)) == 0.0);
}

TEST_CASE("emitted nonreciprocal bath oscillates at the bin frequencies") {
    NrTwoPortBath b = discretize_nr_twoport(1.0, 1.0, 0.5, 0.7, 2.0);
    REQUIRE(b.size() >= 1);
    HamiltonianModel h = emit_nr_bath_hamiltonian(b);
    REQUIRE(h.dim() == 2 * static_cast<int>(b.size()));
    NumericModel nm = make_numeric(h);
    for (size_t k = 0; k < b.size(); ++k) {
        // realization consistency: 1/(R_k C_k) is the bin frequency
        CHECK(1.0 / (b.R[k] * b.C[k]) ==
              doctest::Approx(b.Omega[k]).epsilon(1e-12));
        // normal-mode oracle on the (psi, q) pair: xdot = S grad H has
        // eigenvalues +- i Omega_k
        double hpsi = to_double(h.quad(2 * k, 2 * k));
        double hq = to_double(h.quad(2 * k + 1, 2 * k + 1));
        CHECK(std::sqrt(hpsi * hq) == doctest::Approx(b.Omega[k]).epsilon(1e-12));
    }

    // flux-rescaling map: the gyrator-constrained charge pair Q with
    // R J Qdot = Q / C has the same trajectories as the canonical pair under
    // q = Q^1, psi = R Q^2
    double R = b.R[0], Ck = b.C[0];
    OdeRhs charge_form = [R, Ck](double, const Eigen::VectorXd& Q) {
        Eigen::VectorXd dQ(2);
        dQ(0) = -Q(1) / (R * Ck);
        dQ(1) = Q(0) / (R * Ck);
        return dQ;
    };
    Eigen::VectorXd Q0(2);
    Q0 << 0.7, -0.2;
    Eigen::VectorXd QT = rk45(charge_form, 0.0, 5.0, Q0);

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(h.dim());
    x0(0) = R * Q0(1);  // psi_1
    x0(1) = Q0(0);      // q_1
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < static_cast<int>(b.size()); ++k)
        pairs.push_back({2 * k, 2 * k + 1});
    Eigen::VectorXd xT = rk45(pair_rhs(nm, pairs), 0.0, 5.0, x0);
    CHECK(xT(1) == doctest::Approx(QT(0)).epsilon(1e-8));
    CHECK(xT(0) == doctest::Approx(R * QT(1)).epsilon(1e-8));

    // empty bath emits an empty fragment
    NrTwoPortBath empty;
    empty.dOmega = 0.1;
    CHECK(emit_nr_bath_hamiltonian(empty).dim() == 0);
}
