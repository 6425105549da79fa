#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netham/ode.hpp"
#include "netham/reduce.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace netham;

namespace {

CircuitGraph load_fixture(const std::string& name) {
    std::ifstream in(std::string(NETHAM_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_netlist(ss.str());
}

int count_class(const ReducedSystem& s, ZeroModeClass c) {
    int n = 0;
    for (const auto& r : s.zero_mode_reports)
        if (r.cls == c) ++n;
    return n;
}

Eigen::MatrixXd canonical_j(int n_pairs) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n_pairs, 2 * n_pairs);
    j.topRightCorner(n_pairs, n_pairs).setIdentity();
    j.bottomLeftCorner(n_pairs, n_pairs) =
        -Eigen::MatrixXd::Identity(n_pairs, n_pairs);
    return j;
}

}  // namespace

TEST_CASE("LC oscillator reduces to one canonical pair") {
    auto g = load_fixture("lc.json");
    auto r = reduce_circuit(g);

    CHECK(r.system.n_pairs == 1);
    CHECK(r.hamiltonian.dim() == 2);
    CHECK(to_double(RMat(r.system.omega_eta)).isApprox(canonical_j(1)));

    // H = phi^2/(2L) + q^2/(2C) with L = 1/2, C = 2: quad = diag(2, 1/2)
    // up to the canonical pairing order.
    NumericModel nm = make_numeric(r.hamiltonian);
    Eigen::Vector2d x(0.3, -0.7);
    double expect = 0.3 * 0.3 / (2 * 0.5) + 0.7 * 0.7 / (2 * 2.0);
    // position coordinate may be flux or charge; try both pairings
    double alt = 0.3 * 0.3 / (2 * 2.0) + 0.7 * 0.7 / (2 * 0.5);
    double got = nm.value(x, 0.0);
    CHECK((std::abs(got - expect) < 1e-12 || std::abs(got - alt) < 1e-12));

    // Angular frequency 1/sqrt(LC) = 1: one full period returns the state.
    auto rhs = canonical_rhs(nm, to_double(RMat(r.system.omega_eta)));
    Eigen::VectorXd y0 = x;
    Eigen::VectorXd y1 = rk45(rhs, 0.0, 2.0 * M_PI, y0);
    CHECK((y1 - y0).norm() < 1e-7);
}

TEST_CASE("driven transmon-resonator circuit: mode counts and classes") {
    auto g = load_fixture("fig2.json");
    auto r = reduce_circuit(g);

    CHECK(r.system.n_pairs == 2);
    CHECK(count_class(r.system, ZeroModeClass::Gauge) == 1);
    CHECK(count_class(r.system, ZeroModeClass::LinearConstraint) == 2);
    CHECK(r.hamiltonian.dim() == 4);
    CHECK(periodicity_violation(r.hamiltonian).empty());

    // solved-constraint drive substitution must leave a drive term (the gate
    // voltage couples to the junction island charge)
    CHECK(!r.hamiltonian.drives.empty());
}

TEST_CASE("gradient of the compiled model matches central differences") {
    auto g = load_fixture("fig2.json");
    auto r = reduce_circuit(g);
    NumericModel nm = make_numeric(r.hamiltonian);

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(r.hamiltonian.dim());
        for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
        double t = 0.5 + 0.2 * u(rng);
        Eigen::VectorXd grad = nm.gradient(x, t);
        const double h = 1e-6;
        for (int i = 0; i < x.size(); ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            double fd = (nm.value(xp, t) - nm.value(xm, t)) / (2 * h);
            CHECK(std::abs(grad(i) - fd) < 1e-8);
        }
    }
}

TEST_CASE("energy is conserved along undriven canonical flow") {
    auto g = load_fixture("fig7.json");
    auto r = reduce_circuit(g);
    NumericModel nm = make_numeric(r.hamiltonian);
    auto rhs = canonical_rhs(nm, to_double(RMat(r.system.omega_eta)));

    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(r.hamiltonian.dim());
    for (int i = 0; i < y0.size(); ++i) y0(i) = 0.1 * (i + 1);
    double e0 = nm.value(y0, 0.0);
    Eigen::VectorXd y = y0;
    double drift = 0;
    for (int k = 0; k < 10; ++k) {
        y = rk45(rhs, k * 1.0, (k + 1) * 1.0, y, 1e-12, 1e-14);
        drift = std::max(drift, std::abs(nm.value(y, 0.0) - e0));
    }
    CHECK(drift < 1e-9);
}

TEST_CASE("junction shorted by an inductor is flagged nonhomogeneous") {
    auto g = load_fixture("jj-series-L.json");
    CHECK_THROWS_AS(reduce_circuit(g), NonhomogeneousConstraint);
}

namespace {

// independent oracle: total branch energy evaluated directly on the branch
// configuration zeta = K z, bypassing the assembled model entirely
double branch_energy(const CircuitGraph& g, const Eigen::VectorXd& zeta) {
    const int B = g.n_branches();
    double e = 0;
    for (int b = 0; b < B; ++b) {
        const Branch& br = g.branches[static_cast<size_t>(b)];
        double phi = zeta(b), q = zeta(B + b), v = to_double(br.value);
        switch (br.kind) {
            case ElementKind::Capacitor: e += q * q / (2 * v); break;
            case ElementKind::Inductor: e += phi * phi / (2 * v); break;
            case ElementKind::JosephsonJunction:
                e -= v * std::cos(2 * M_PI * phi);
                break;
            case ElementKind::PhaseSlip:
                e -= v * std::cos(2 * M_PI * q);
                break;
            default: break;
        }
    }
    return e;
}

}  // namespace

TEST_CASE("gyrator-shunted junction pair reduces to the shifted-charge form") {
    auto g = load_fixture("gkp.json");
    auto r = reduce_circuit(g);

    CHECK(r.system.n_pairs == 2);
    // inductors shunt every node, so no direction of the solution manifold
    // is a cycle: all coordinates extended
    for (const auto& c : r.hamiltonian.coords)
        CHECK(c.topology == VarTopology::Extended);

    // the gyrator couples the two flux coordinates inside omega_z (that is
    // the structure the charge shift Q -> Q + Y Phi/2 later absorbs)
    std::vector<int> flux_like;
    for (size_t i = 0; i < r.hamiltonian_z.coords.size(); ++i)
        if (r.hamiltonian_z.coords[i].sector != CoordInfo::Sector::Charge)
            flux_like.push_back(static_cast<int>(i));
    REQUIRE(flux_like.size() == 2);
    CHECK(r.system.omega_z(flux_like[0], flux_like[1]) != 0);
    CHECK(r.system.omega_z(flux_like[0], flux_like[1]) ==
          -r.system.omega_z(flux_like[1], flux_like[0]));

    // cosines never touch pure-charge coordinates
    for (const auto& cos : r.hamiltonian.cosines)
        for (int i = 0; i < r.hamiltonian.dim(); ++i)
            if (cos.wavevector(i) != 0)
                CHECK(r.hamiltonian.coords[static_cast<size_t>(i)].sector !=
                      CoordInfo::Sector::Charge);

    // end-to-end: reduced H(eta) equals the branch-energy sum evaluated on
    // the lifted configuration K z(eta)
    NumericModel nm = make_numeric(r.hamiltonian);
    Eigen::MatrixXd kd = to_double(r.constraints.K);
    Eigen::MatrixXd zmap = to_double(r.system.z_of_eta);
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd eta(r.hamiltonian.dim());
        for (int i = 0; i < eta.size(); ++i) eta(i) = u(rng);
        Eigen::VectorXd z = zmap * eta + to_double(RMat(r.system.z_const));
        CHECK(nm.value(eta, 0.0) ==
              doctest::Approx(branch_energy(g, kd * z)).epsilon(1e-12));
    }
}

TEST_CASE("reduced flow agrees with projected integration of the full system") {
    auto g = load_fixture("fig2.json");
    auto r = reduce_circuit(g);

    // rebuild the unreduced pieces
    TwoForm tfz{r.system.omega_z, r.hamiltonian_z.coords};
    ZeroModeSet zm = zero_modes(tfz);
    NumericModel hz = make_numeric(r.hamiltonian_z);

    // split modes: gauge iff the full Hamiltonian is flat along the mode
    std::vector<Eigen::VectorXd> gauge_cols, con_cols;
    for (Eigen::Index c = 0; c < zm.basis.cols(); ++c) {
        RVec w = zm.basis.col(c);
        RVec qw = r.hamiltonian_z.quad * w;
        bool flat = is_zero(RMat(qw));
        Rational lw = 0;
        for (int i = 0; i < w.size(); ++i) lw += r.hamiltonian_z.linear(i) * w(i);
        if (flat && lw == 0) {
            for (const auto& d : r.hamiltonian_z.drives) {
                Rational dw = 0;
                for (int i = 0; i < w.size(); ++i) dw += d.coeff(i) * w(i);
                if (dw != 0) flat = false;
            }
        } else {
            flat = false;
        }
        (flat ? gauge_cols : con_cols).push_back(to_double(RMat(w)));
    }
    REQUIRE(gauge_cols.size() == 1);
    REQUIRE(con_cols.size() == 2);

    DaeSystem dae;
    dae.h = hz;
    dae.omega = to_double(r.system.omega_z);
    dae.gauge.resize(r.hamiltonian_z.dim(), static_cast<Eigen::Index>(gauge_cols.size()));
    for (size_t i = 0; i < gauge_cols.size(); ++i) dae.gauge.col(static_cast<Eigen::Index>(i)) = gauge_cols[i];
    dae.constraints.resize(r.hamiltonian_z.dim(), static_cast<Eigen::Index>(con_cols.size()));
    for (size_t i = 0; i < con_cols.size(); ++i) dae.constraints.col(static_cast<Eigen::Index>(i)) = con_cols[i];

    // reduced initial state and its lift
    Eigen::VectorXd eta0(r.hamiltonian.dim());
    eta0 << 0.2, -0.1, 0.05, 0.15;
    auto lift = [&](const Eigen::VectorXd& eta, double t) {
        Eigen::VectorXd z = to_double(r.system.z_of_eta) * eta +
                            to_double(RMat(r.system.z_const));
        for (size_t j = 0; j < r.system.z_of_drive.size(); ++j)
            z += to_double(RMat(r.system.z_of_drive[j])) *
                 r.system.drive_waveforms[j](t);
        return z;
    };

    NumericModel nm = make_numeric(r.hamiltonian);
    auto rhs = canonical_rhs(nm, to_double(RMat(r.system.omega_eta)));
    const double t1 = 1.5;
    Eigen::VectorXd eta1 = rk45(rhs, 0.0, t1, eta0, 1e-11, 1e-13);
    Eigen::VectorXd z_red = lift(eta1, t1);

    Eigen::VectorXd z0 = lift(eta0, 0.0);
    Eigen::VectorXd z_dae = dae_integrate(dae, 0.0, t1, z0, 64, 1e-11, 1e-13);

    // compare modulo the gauge directions
    Eigen::MatrixXd gq = dae.gauge.householderQr().householderQ();
    Eigen::MatrixXd gbasis = gq.leftCols(dae.gauge.cols());
    Eigen::VectorXd diff = z_red - z_dae;
    diff -= gbasis * (gbasis.transpose() * diff);
    CHECK(diff.norm() < 1e-6);
}
