#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netham/quadrature.hpp"
#include "netham/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace netham;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(rng);
    return m * m.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_skew(int n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(rng);
    return 0.5 * (m - m.transpose());
}

BoundarySpec random_spec(int n, std::mt19937& rng, bool with_g = true) {
    BoundarySpec s;
    s.A = random_spd(n, rng);
    s.Binv = random_spd(n, rng);
    s.G = with_g ? random_skew(n, rng)
                 : Eigen::MatrixXd::Zero(n, n);
    std::uniform_real_distribution<double> ud(0.3, 3.0);
    s.Delta.resize(n);
    for (int i = 0; i < n; ++i) s.Delta(i) = ud(rng);
    return s;
}

// largest characteristic frequency of the boundary block; the integrands
// reach their asymptotic power laws a couple of decades above it
double spec_cutoff(const BoundarySpec& s) {
    Eigen::VectorXd Ds = s.Delta.array().sqrt().matrix();
    double wa = (Ds.asDiagonal() * s.A.inverse()).norm();
    double wb = (Ds.cwiseInverse().asDiagonal() * s.Binv).norm();
    return std::max(wa, wb);
}

// independent root of the single-line transcendental condition
//   Omega d / sqrt(Delta) + atan(Omega a0 / sqrt(Delta))
//     + atan(Omega a_d / sqrt(Delta)) = n pi
// (purely capacitive block at both ends); left side strictly increasing
double single_line_root(double Delta, double a0, double ad, double d, int n) {
    double sq = std::sqrt(Delta);
    auto f = [&](double Om) {
        return Om * d / sq + std::atan(Om * a0 / sq) + std::atan(Om * ad / sq) -
               n * M_PI;
    };
    double lo = 1e-12, hi = n * M_PI * sq / d + 1.0;
    while (f(hi) < 0) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("boundary flux amplitude matches the single-line closed form") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ud(0.2, 4.0);
    for (int rep = 0; rep < 5; ++rep) {
        double a0 = ud(rng), b0 = ud(rng), Delta = ud(rng);
        BoundarySpec s;
        s.A = Eigen::MatrixXd::Constant(1, 1, a0);
        s.Binv = Eigen::MatrixXd::Constant(1, 1, 1.0 / b0);
        s.G = Eigen::MatrixXd::Zero(1, 1);
        s.Delta = Eigen::VectorXd::Constant(1, Delta);
        s.validate();
        double w_lo = 1e-3 * spec_cutoff(s), w_hi = 1e3 * spec_cutoff(s);
        double r = std::log(w_hi / w_lo) / 999;
        for (int i = 0; i < 1000; ++i) {
            double Om = w_lo * std::exp(r * i);
            ModePoint mp = solve_modes(s, Om);
            double u2 = mp.UF0(0, 0) * mp.UF0(0, 0) +
                        mp.UG0(0, 0) * mp.UG0(0, 0);
            double ref = single_line_U0(a0, b0, Delta, Om);
            CHECK(u2 == doctest::Approx(ref * ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("boundary Gram eigenvalues are doubly degenerate with exact pair partners") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> nd(1, 3);
    std::uniform_real_distribution<double> wd(0.1, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        int n = nd(rng);
        BoundarySpec s = random_spec(n, rng);
        double Om = wd(rng) * spec_cutoff(s);
        Eigen::MatrixXd gram = assemble_boundary_gram(s, Om);
        double scale = gram.norm();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        for (int i = 0; i + 1 < 2 * n; i += 2)
            CHECK(std::abs(es.eigenvalues()(i) - es.eigenvalues()(i + 1)) <=
                  1e-12 * scale);

        ModePoint mp = solve_modes(s, Om);
        REQUIRE(static_cast<int>(mp.pairs.size()) == n);
        for (const auto& p : mp.pairs) {
            Eigen::VectorXd v(2 * n), jv(2 * n);
            v << p.e, p.r;
            jv << -p.r, p.e;
            CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
            CHECK((gram * v - p.m * v).norm() <= 1e-10 * scale);
            CHECK((gram * jv - p.m * jv).norm() <= 1e-10 * scale);
            CHECK(p.m > 0);
        }
    }
}

TEST_CASE("dual map relations hold with second-order stencil convergence") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> nd(1, 3);
    std::uniform_real_distribution<double> wd(0.5, 5.0);
    std::vector<double> orders;
    for (int rep = 0; rep < 100; ++rep) {
        int n = nd(rng);
        BoundarySpec s = random_spec(n, rng);
        double Om = wd(rng) * spec_cutoff(s);
        ModePoint mp = solve_modes(s, Om);
        const ModePair& p = mp.pairs[static_cast<size_t>(rep % n)];
        double x = 0.3;
        double h1 = 1e-3 * std::sqrt(s.Delta.minCoeff()) / Om;

        // -i d/dx of (V^F; Delta U^F) should equal i Omega (U^G; V^G):
        // componentwise (V^F)' = -Omega U^G and Delta (U^F)' = -Omega V^G
        auto resid = [&](double h) {
            ModeField fp = eval_mode_F(s, p, Om, x + h);
            ModeField fm = eval_mode_F(s, p, Om, x - h);
            ModeField g = eval_mode_G(s, p, Om, x);
            Eigen::VectorXd dV = (fp.V - fm.V) / (2 * h);
            Eigen::VectorXd dU = (fp.U - fm.U) / (2 * h);
            return std::sqrt((dV + Om * g.U).squaredNorm() +
                             (s.Delta.asDiagonal() * dU + Om * g.V)
                                 .squaredNorm());
        };
        double r1 = resid(h1), r2 = resid(0.5 * h1);
        REQUIRE(r2 > 0);
        orders.push_back(std::log2(r1 / r2));

        // applying the map twice is the mode operator: -Delta U'' = Om^2 U
        ModeField f0 = eval_mode_F(s, p, Om, x);
        ModeField fp = eval_mode_F(s, p, Om, x + h1);
        ModeField fm = eval_mode_F(s, p, Om, x - h1);
        Eigen::VectorXd d2U = (fp.U - 2 * f0.U + fm.U) / (h1 * h1);
        Eigen::VectorXd lhs = -(s.Delta.asDiagonal() * d2U);
        CHECK((lhs - Om * Om * f0.U).norm() <= 1e-4 * Om * Om * f0.U.norm() + 1e-12);
    }
    std::sort(orders.begin(), orders.end());
    double median = orders[orders.size() / 2];
    CHECK(median == doctest::Approx(2.0).epsilon(0.1));
    for (double o : orders) CHECK(o == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("mode-operator quadratic form is nonnegative on smooth decaying fields") {
    std::mt19937 rng(41);
    std::normal_distribution<double> d(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 2;
        BoundarySpec s = random_spec(n, rng);
        // random smooth decaying field on the half line
        std::vector<double> au(4), bu(4), av(4), bv(4);
        for (int k = 0; k < 4; ++k) {
            au[static_cast<size_t>(k)] = d(rng);
            bu[static_cast<size_t>(k)] = d(rng);
            av[static_cast<size_t>(k)] = d(rng);
            bv[static_cast<size_t>(k)] = d(rng);
        }
        auto U = [&](double x, int i) {
            return (au[static_cast<size_t>(i)] +
                    bu[static_cast<size_t>(i)] * x) *
                   std::exp(-0.5 * x * x);
        };
        auto V = [&](double x, int i) {
            return (av[static_cast<size_t>(i)] +
                    bv[static_cast<size_t>(i)] * x) *
                   std::exp(-0.5 * x * x);
        };
        double h = 1e-6;
        auto dU = [&](double x, int i) {
            return (U(x + h, i) - U(x - h, i)) / (2 * h);
        };
        auto dV = [&](double x, int i) {
            return (V(x + h, i) - V(x - h, i)) / (2 * h);
        };
        // integral (U')^T Delta U' + ||V'||^2 + boundary terms, which is the
        // value of the quadratic form of the mode operator on this field
        double bulk = integrate(
            [&](double x) {
                double acc = 0;
                for (int i = 0; i < n; ++i) {
                    double du = dU(x, i), dv = dV(x, i);
                    acc += s.Delta(i) * du * du + dv * dv;
                }
                return acc;
            },
            0.0, 12.0, 64);
        Eigen::VectorXd U0(n), dV0(n);
        for (int i = 0; i < n; ++i) {
            U0(i) = U(0.0, i);
            dV0(i) = dV(0.0, i);
        }
        double bnd = U0.dot(s.Binv * U0) + dV0.dot(s.A * dV0);
        CHECK(bulk + bnd >= -1e-10);
    }
}

TEST_CASE("sum rule over the mode basis reproduces the inverse capacitive block") {
    std::mt19937 rng(53);
    SUBCASE("single line") {
        BoundarySpec s;
        s.A = Eigen::MatrixXd::Constant(1, 1, 0.7);
        s.Binv = Eigen::MatrixXd::Constant(1, 1, 1.0 / 1.3);
        s.G = Eigen::MatrixXd::Zero(1, 1);
        s.Delta = Eigen::VectorXd::Constant(1, 2.0);
        SumRuleResult r = sum_rule_capacitive(s, 100.0 * spec_cutoff(s));
        CHECK(r.residual_rel <= 1e-4);
    }
    SUBCASE("three coupled nonreciprocal lines") {
        BoundarySpec s = random_spec(3, rng);
        SumRuleResult r = sum_rule_capacitive(s, 100.0 * spec_cutoff(s));
        CHECK(r.residual_rel <= 1e-4);
    }
}

TEST_CASE("diagonal reciprocal blocks leave the boundary amplitudes decoupled") {
    BoundarySpec s;
    s.A = Eigen::Vector3d(0.5, 0.9, 1.4).asDiagonal();
    s.Binv = Eigen::Vector3d(1.1, 0.6, 2.0).asDiagonal();
    s.G = Eigen::MatrixXd::Zero(3, 3);
    s.Delta = Eigen::Vector3d(1.0, 2.0, 0.7);
    for (double Om : {0.3, 1.0, 4.2, 17.0}) {
        ModePoint mp = solve_modes(s, Om);
        Eigen::MatrixXd outer = mp.UF0 * mp.UF0.transpose() +
                                mp.UG0 * mp.UG0.transpose();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(std::abs(outer(i, j)) <= 1e-12);
            double ref = single_line_U0(s.A(i, i), 1.0 / s.Binv(i, i),
                                        s.Delta(i), Om);
            CHECK(outer(i, i) == doctest::Approx(ref * ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("junction couplings fall off with the expected power laws") {
    double a0 = 0.8, b0 = 1.7, Delta = 1.9, a0J = 0.5, b0J = 2.1;
    double cut = std::max(std::sqrt(Delta) / a0, 1.0 / (b0 * std::sqrt(Delta)));
    CouplingSweep cs =
        coupling_sweep(a0, b0, Delta, a0J, b0J, 100 * cut, 1000 * cut, 200);
    CHECK(cs.slope_C == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(cs.slope_L == doctest::Approx(-1.5).epsilon(0.033));
    CHECK(std::abs(cs.slope_C + 0.5) <= 0.05);
    CHECK(std::abs(cs.slope_L + 1.5) <= 0.05);

    // the weighted integral of g^2 is already converged at this cutoff
    CouplingSweep cs2 =
        coupling_sweep(a0, b0, Delta, a0J, b0J, 100 * cut, 2000 * cut, 200);
    double base = coupling_sweep(a0, b0, Delta, a0J, b0J, 1e-3 * cut,
                                 1000 * cut, 200)
                      .lamb_proxy;
    double doubled = coupling_sweep(a0, b0, Delta, a0J, b0J, 1e-3 * cut,
                                    2000 * cut, 200)
                         .lamb_proxy;
    CHECK(std::abs(doubled - base) / base < 0.01);
    (void)cs2;
}

TEST_CASE("coupling report obeys the structural identities of its blocks") {
    std::mt19937 rng(67);
    BoundarySpec s = random_spec(2, rng);
    JunctionBlocks jb;
    jb.C0inv = random_spd(2, rng);
    jb.C0Jinv = 0.3 * random_spd(2, rng);
    jb.CJinv = random_spd(2, rng) + 2.0 * Eigen::MatrixXd::Identity(2, 2);
    jb.L0inv = random_spd(2, rng);
    jb.L0Jinv = 0.2 * random_spd(2, rng);
    jb.LJinv = random_spd(2, rng);
    jb.YJ = random_skew(2, rng);
    jb.Y0J = 0.4 * random_spd(2, rng);
    jb.c = Eigen::Vector2d(1.3, 0.8);
    CouplingReport r = couplings(s, jb, 50.0 * spec_cutoff(s), 128);

    // the integrated boundary matrix is antisymmetric
    CHECK((r.Umat + r.Umat.transpose()).norm() <= 1e-10 * (r.Umat.norm() + 1));
    // the dressed inductive matrix is symmetric
    CHECK((r.LJtilde_inv - r.LJtilde_inv.transpose()).norm() <=
          1e-10 * r.LJtilde_inv.norm());
    CHECK((r.CJtilde_inv - r.CJtilde_inv.transpose()).norm() <=
          1e-10 * r.CJtilde_inv.norm());
    // with no line-junction coupling at all, the dressing disappears
    JunctionBlocks bare = jb;
    bare.C0Jinv.setZero();
    bare.L0Jinv.setZero();
    bare.Y0J.setZero();
    bare.YJ.setZero();
    CouplingReport r0 = couplings(s, bare, 50.0 * spec_cutoff(s), 64);
    CHECK((r0.LJtilde_inv - bare.LJinv).norm() <= 1e-12 * bare.LJinv.norm());
    CHECK((r0.CJtilde_inv - bare.CJinv).norm() <= 1e-12 * bare.CJinv.norm());
    CHECK(r0.cross.norm() <= 1e-12);
}

TEST_CASE("finite line spectrum matches the transcendental closed form") {
    double Delta = 1.7, a0 = 0.6, ad = 0.35, d = 2.3;
    FiniteSpec fs;
    fs.b.A = Eigen::MatrixXd::Constant(1, 1, a0);
    fs.b.Binv = Eigen::MatrixXd::Zero(1, 1);
    fs.b.G = Eigen::MatrixXd::Zero(1, 1);
    fs.b.Delta = Eigen::VectorXd::Constant(1, Delta);
    fs.d = d;
    fs.far.push_back({FarEnd::Kind::Capacitive, ad});

    double hi = single_line_root(Delta, a0, ad, d, 21);
    std::vector<double> got = finite_line_spectrum(fs, 0.5 * (hi + single_line_root(Delta, a0, ad, d, 20)));
    REQUIRE(static_cast<int>(got.size()) >= 20);
    for (int n = 1; n <= 20; ++n) {
        double ref = single_line_root(Delta, a0, ad, d, n);
        CHECK(got[static_cast<size_t>(n - 1)] ==
              doctest::Approx(ref).epsilon(1e-8));
    }

    // the far-end dual charge equals Omega times the far-end flux
    for (int n = 1; n <= 5; ++n) {
        FiniteMode fm = finite_line_mode(fs, got[static_cast<size_t>(n - 1)]);
        double Ud = fm.U(d)(0);
        CHECK(fm.V_d(0) == doctest::Approx(fm.Omega * Ud).epsilon(1e-8));
    }

    // mode-count estimate: Omega_max d / (pi sqrt(Delta)) up to O(1)
    double Om_max = 40.0;
    std::vector<double> many = finite_line_spectrum(fs, Om_max);
    double weyl = Om_max * d / (M_PI * std::sqrt(Delta));
    CHECK(std::abs(static_cast<double>(many.size()) - weyl) <= 2.0);
}

TEST_CASE("three decoupled lines merge their individual spectra") {
    FiniteSpec fs;
    fs.b.A = Eigen::Vector3d(0.6, 0.9, 1.2).asDiagonal();
    fs.b.Binv = Eigen::MatrixXd::Zero(3, 3);
    fs.b.G = Eigen::MatrixXd::Zero(3, 3);
    fs.b.Delta = Eigen::Vector3d(1.7, 1.1, 0.8);
    fs.d = 2.0;
    fs.far.push_back({FarEnd::Kind::Capacitive, 0.4});
    fs.far.push_back({FarEnd::Kind::Open, 0.0});
    fs.far.push_back({FarEnd::Kind::Open, 0.0});
    std::vector<double> merged = finite_line_spectrum(fs, 25.0);

    FiniteSpec one;
    one.b.A = fs.b.A.block(0, 0, 1, 1);
    one.b.Binv = Eigen::MatrixXd::Zero(1, 1);
    one.b.G = Eigen::MatrixXd::Zero(1, 1);
    one.b.Delta = fs.b.Delta.head(1);
    one.d = fs.d;
    one.far.push_back(fs.far[0]);
    std::vector<double> line1 = finite_line_spectrum(one, 25.0);
    REQUIRE(!line1.empty());
    for (double w : line1) {
        double best = 1e300;
        for (double m : merged) best = std::min(best, std::abs(m - w));
        CHECK(best <= 1e-8 * w);
    }
}

TEST_CASE("coupled-block determinant solver agrees with weak-coupling limits") {
    FiniteSpec fs;
    Eigen::MatrixXd A(2, 2);
    A << 0.8, 1e-9, 1e-9, 1.1;
    fs.b.A = A;
    fs.b.Binv = Eigen::MatrixXd::Zero(2, 2);
    fs.b.G = Eigen::MatrixXd::Zero(2, 2);
    fs.b.Delta = Eigen::Vector2d(1.3, 0.9);
    fs.d = 1.5;
    fs.far.push_back({FarEnd::Kind::Open, 0.0});
    fs.far.push_back({FarEnd::Kind::Short, 0.0});
    std::vector<double> coupled = finite_line_spectrum(fs, 15.0);

    FiniteSpec dec = fs;
    dec.b.A(0, 1) = dec.b.A(1, 0) = 0.0;
    std::vector<double> decoupled = finite_line_spectrum(dec, 15.0);
    REQUIRE(coupled.size() == decoupled.size());
    for (size_t i = 0; i < coupled.size(); ++i)
        CHECK(coupled[i] == doctest::Approx(decoupled[i]).epsilon(1e-6));
}

TEST_CASE("input-impedance poles follow the ladder synthesis of a finite line") {
    double c = 0.7, l = 1.9, d = 2.4;
    double tau = d * std::sqrt(l * c);
    FosterPoles open = foster_poles(c, l, d, true, 8);
    CHECK(open.has_series_cap);
    CHECK(open.C0 == doctest::Approx(c * d).epsilon(1e-14));
    for (int n = 1; n <= 8; ++n)
        CHECK(open.poles[static_cast<size_t>(n - 1)] ==
              doctest::Approx(n * M_PI / tau).epsilon(1e-12));
    FosterPoles shorted = foster_poles(c, l, d, false, 8);
    CHECK(!shorted.has_series_cap);
    CHECK(shorted.C0 == 0.0);
    for (int n = 1; n <= 8; ++n)
        CHECK(shorted.poles[static_cast<size_t>(n - 1)] ==
              doctest::Approx((2 * n - 1) * M_PI / (2 * tau)).epsilon(1e-12));
}

TEST_CASE("input validation rejects malformed boundary blocks") {
    BoundarySpec s;
    s.A = Eigen::MatrixXd::Identity(2, 2);
    s.Binv = Eigen::MatrixXd::Identity(2, 2);
    s.G = Eigen::MatrixXd::Zero(2, 2);
    s.Delta = Eigen::Vector2d(1.0, 1.0);
    CHECK_NOTHROW(s.validate());

    BoundarySpec bad = s;
    bad.G(0, 1) = 1.0;  // not skew without the (1,0) entry
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.Delta(1) = -2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.A(0, 0) = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    FiniteSpec fs;
    fs.b = s;
    fs.b.G(0, 1) = 0.5;
    fs.b.G(1, 0) = -0.5;
    fs.d = 1.0;
    fs.far.resize(2);
    CHECK_THROWS_AS(finite_line_spectrum(fs, 10.0), std::invalid_argument);
}
