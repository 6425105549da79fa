#include "netham/spectral.hpp"

#include "netham/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace netham {

namespace {

Eigen::VectorXd sqrt_vec(const Eigen::VectorXd& v) {
    return v.array().sqrt().matrix();
}

// Rescaled (tilded) boundary matrices entering the mode problem.
struct Tilded {
    Eigen::MatrixXd At, Binvt, Gt;
    Eigen::VectorXd Ds, Dsi;  // Delta^{1/2}, Delta^{-1/2} diagonals

    explicit Tilded(const BoundarySpec& s) {
        Ds = sqrt_vec(s.Delta);
        Dsi = Ds.cwiseInverse();
        At = Dsi.asDiagonal() * s.A * Dsi.asDiagonal();
        Binvt = Dsi.asDiagonal() * s.Binv * Dsi.asDiagonal();
        Gt = Dsi.asDiagonal() * s.G * Dsi.asDiagonal();
    }
    // inverse boundary response (a polynomial in Omega; no inversion needed)
    Eigen::MatrixXd Einv(double Omega) const { return Binvt - Omega * Omega * At; }
};

}  // namespace

void BoundarySpec::validate(double tol) const {
    const int N = n();
    if (A.rows() != N || A.cols() != N || Binv.rows() != N ||
        Binv.cols() != N || G.rows() != N || G.cols() != N)
        throw std::invalid_argument("boundary block dimensions disagree");
    double scale = std::max({A.norm(), Binv.norm(), G.norm(), 1.0});
    if ((A - A.transpose()).norm() > tol * scale)
        throw std::invalid_argument("capacitive block not symmetric");
    if ((Binv - Binv.transpose()).norm() > tol * scale)
        throw std::invalid_argument("inductive block not symmetric");
    if ((G + G.transpose()).norm() > tol * scale)
        throw std::invalid_argument("gyration block not skew");
    for (int i = 0; i < N; ++i)
        if (!(Delta(i) > 0))
            throw std::invalid_argument("propagation speeds must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A), eb(Binv);
    if (ea.eigenvalues().minCoeff() <= 0)
        throw std::invalid_argument("capacitive block not positive definite");
    if (eb.eigenvalues().minCoeff() <= 0)
        throw std::invalid_argument("inductive block not positive definite");
}

Eigen::MatrixXd assemble_boundary_gram(const BoundarySpec& s, double Omega) {
    const Tilded t(s);
    const int N = s.n();
    const Eigen::MatrixXd Einv = t.Einv(Omega);
    const Eigen::MatrixXd OEinv = Einv / Omega;
    const Eigen::MatrixXd M =
        Eigen::MatrixXd(t.Dsi.asDiagonal()) +
        (Einv * t.Ds.asDiagonal() * Einv) / (Omega * Omega) +
        t.Gt.transpose() * t.Ds.asDiagonal() * t.Gt;
    const Eigen::MatrixXd S = OEinv * t.Ds.asDiagonal() * t.Gt -
                              t.Gt.transpose() * t.Ds.asDiagonal() * OEinv;
    Eigen::MatrixXd gram(2 * N, 2 * N);
    gram.block(0, 0, N, N) = M;
    gram.block(0, N, N, N) = S;
    gram.block(N, 0, N, N) = -S;
    gram.block(N, N, N, N) = M;
    // construction guarantees exact symmetry; enforce it bit-for-bit
    gram = 0.5 * (gram + Eigen::MatrixXd(gram.transpose()));
    return gram;
}

ModePoint solve_modes(const BoundarySpec& s, double Omega, double sing_tol,
                      double sing_offset) {
    const int N = s.n();
    ModePoint mp;
    mp.Omega = Omega;
    mp.Omega_used = Omega;

    {
        // flag frequencies sitting on a zero of the boundary response
        Tilded t(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.Einv(Omega));
        double scale = std::max(t.Binvt.norm(), Omega * Omega * t.At.norm());
        if (es.eigenvalues().cwiseAbs().minCoeff() < sing_tol * scale) {
            mp.perturbed = true;
            mp.Omega_used = Omega * (1.0 + sing_offset);
        }
    }

    const Eigen::MatrixXd gram = assemble_boundary_gram(s, mp.Omega_used);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const Eigen::MatrixXd& vecs = es.eigenvectors();

    // pick one representative per degenerate pair: the partner of v = (e, r)
    // is Jv = (-r, e); greedily keep eigenvectors independent of the span of
    // the already-chosen representatives and their partners
    auto partner = [N](const Eigen::VectorXd& v) {
        Eigen::VectorXd p(2 * N);
        p.head(N) = -v.tail(N);
        p.tail(N) = v.head(N);
        return p;
    };
    std::vector<Eigen::VectorXd> span;  // orthonormal
    for (int i = 0; i < 2 * N && static_cast<int>(mp.pairs.size()) < N; ++i) {
        Eigen::VectorXd v = vecs.col(i);
        for (const auto& b : span) v -= b.dot(v) * b;
        if (v.norm() < 0.5) continue;
        v.normalize();
        ModePair p;
        p.m = es.eigenvalues()(i);
        p.e = v.head(N);
        p.r = v.tail(N);
        mp.pairs.push_back(p);
        span.push_back(v);
        Eigen::VectorXd w = partner(v);
        for (const auto& b : span) w -= b.dot(w) * b;
        if (w.norm() > 1e-8) span.push_back(w.normalized());
    }
    if (static_cast<int>(mp.pairs.size()) != N)
        throw std::runtime_error("mode pairing failed: spectrum not doubled");

    Tilded t(s);
    mp.UF0.resize(N, N);
    mp.UG0.resize(N, N);
    for (int l = 0; l < N; ++l) {
        double norm = std::sqrt(2.0 / (M_PI * mp.pairs[static_cast<size_t>(l)].m));
        mp.UF0.col(l) =
            norm * t.Dsi.asDiagonal() * mp.pairs[static_cast<size_t>(l)].e;
        mp.UG0.col(l) =
            -norm * t.Dsi.asDiagonal() * mp.pairs[static_cast<size_t>(l)].r;
    }
    return mp;
}

namespace {

ModeField eval_mode(const BoundarySpec& s, const ModePair& p, double Omega,
                    double x, bool f_type) {
    const Tilded t(s);
    const int N = s.n();
    const Eigen::MatrixXd OEinv = t.Einv(Omega) / Omega;
    const double norm = std::sqrt(2.0 / (M_PI * p.m));
    // cos/sin amplitude vectors (U-top, V-bottom blocks)
    Eigen::VectorXd cU(N), cV(N), sU(N), sV(N);
    if (f_type) {
        cU = t.Dsi.asDiagonal() * p.e;
        cV = t.Ds.asDiagonal() * (t.Gt * p.e - OEinv * p.r);
        sU = t.Gt * p.r + OEinv * p.e;
        sV = p.r;
    } else {
        cU = -(t.Dsi.asDiagonal() * p.r);
        cV = -(t.Ds.asDiagonal() * (t.Gt * p.r + OEinv * p.e));
        sU = t.Gt * p.e - OEinv * p.r;
        sV = p.e;
    }
    ModeField mf;
    mf.U.resize(N);
    mf.V.resize(N);
    for (int i = 0; i < N; ++i) {
        double th = Omega * x * t.Dsi(i);
        mf.U(i) = norm * (std::cos(th) * cU(i) + std::sin(th) * sU(i));
        mf.V(i) = norm * (std::cos(th) * cV(i) + std::sin(th) * sV(i));
    }
    return mf;
}

}  // namespace

ModeField eval_mode_F(const BoundarySpec& s, const ModePair& p, double Omega,
                      double x) {
    return eval_mode(s, p, Omega, x, true);
}

ModeField eval_mode_G(const BoundarySpec& s, const ModePair& p, double Omega,
                      double x) {
    return eval_mode(s, p, Omega, x, false);
}

double single_line_U0(double a0, double b0, double Delta, double Omega) {
    double w2 = Omega * Omega;
    double det = a0 * w2 - 1.0 / b0;
    double u2 = 2.0 * w2 /
                (M_PI * std::sqrt(Delta) * (w2 + det * det / Delta));
    return std::sqrt(u2);
}

namespace {

Eigen::MatrixXd u0_outer(const BoundarySpec& s, double Omega) {
    ModePoint mp = solve_modes(s, Omega);
    return mp.UF0 * mp.UF0.transpose() + mp.UG0 * mp.UG0.transpose();
}

// matrix-valued composite Gauss-Legendre on a log grid
Eigen::MatrixXd integrate_log_matrix(
    const std::function<Eigen::MatrixXd(double)>& f, double a, double b,
    int panels, int order = 16) {
    GaussRule gr(order);
    const double la = std::log(a), lb = std::log(b);
    const double h = (lb - la) / panels;
    Eigen::MatrixXd acc;
    for (int p = 0; p < panels; ++p) {
        double mid = la + (p + 0.5) * h;
        for (size_t i = 0; i < gr.x.size(); ++i) {
            double t = std::exp(mid + 0.5 * h * gr.x[i]);
            Eigen::MatrixXd val = f(t) * (t * 0.5 * h * gr.w[i]);
            acc = acc.size() ? Eigen::MatrixXd(acc + val) : val;
        }
    }
    return acc;
}

}  // namespace

SumRuleResult sum_rule_capacitive(const BoundarySpec& s, double Omega_max,
                                  int panels) {
    // the integrand vanishes as Omega^2 at the origin; the (0, eps) segment
    // is below double precision relevance for eps = 1e-6 Omega_max
    const double lo = 1e-6 * Omega_max;
    auto f = [&](double Om) { return u0_outer(s, Om); };
    Eigen::MatrixXd body = integrate_log_matrix(f, lo, Omega_max, panels);

    // tail: Omega^2 * integrand -> T + c / Omega^2; two-point Richardson fit,
    // integral over (Omega_max, inf) = T / Omega_max + c / (3 Omega_max^3)
    Eigen::MatrixXd t1 = Omega_max * Omega_max * f(Omega_max);
    Eigen::MatrixXd t2 = 0.25 * Omega_max * Omega_max * f(0.5 * Omega_max);
    Eigen::MatrixXd T = (4.0 * t1 - t2) / 3.0;
    Eigen::MatrixXd c2 = (t1 - T) * (Omega_max * Omega_max);
    SumRuleResult out;
    out.tail = T / Omega_max + c2 / (3.0 * std::pow(Omega_max, 3));
    out.integral = body + out.tail;
    Eigen::MatrixXd target = s.A.inverse();
    out.residual_rel = (out.integral - target).norm() / target.norm();
    return out;
}

CouplingSweep coupling_sweep(double a0, double b0, double Delta, double a0J,
                             double b0J, double Omega_min, double Omega_max,
                             int points) {
    CouplingSweep cs;
    cs.Omega.reserve(static_cast<size_t>(points));
    const double r = std::log(Omega_max / Omega_min) / (points - 1);
    for (int i = 0; i < points; ++i) {
        double Om = Omega_min * std::exp(r * i);
        double u0 = single_line_U0(a0, b0, Delta, Om);
        cs.Omega.push_back(Om);
        cs.gC.push_back((a0 / a0J) * u0 * std::sqrt(0.5 * Om));
        cs.gL.push_back(u0 / (b0J * std::sqrt(2.0 * Om)));
    }
    // log-log slope over the top decade by least squares
    auto slope = [&](const std::vector<double>& g) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (size_t i = 0; i < cs.Omega.size(); ++i) {
            if (cs.Omega[i] < Omega_max / 10) continue;
            double x = std::log(cs.Omega[i]), y = std::log(g[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    cs.slope_C = slope(cs.gC);
    cs.slope_L = slope(cs.gL);
    cs.lamb_proxy = integrate_log(
        [&](double Om) {
            double u0 = single_line_U0(a0, b0, Delta, Om);
            double gc = (a0 / a0J) * u0 * std::sqrt(0.5 * Om);
            double gl = u0 / (b0J * std::sqrt(2.0 * Om));
            return (gc * gc + gl * gl) / Om;
        },
        Omega_min, Omega_max, 256);
    return cs;
}

CouplingReport couplings(const BoundarySpec& s, const JunctionBlocks& jb,
                         double Omega_max, int panels) {
    CouplingReport r;
    const Eigen::VectorXd cs_ = sqrt_vec(jb.c);
    const Eigen::VectorXd csi = cs_.cwiseInverse();
    const Eigen::MatrixXd C0 = jb.C0inv.inverse();
    const Eigen::MatrixXd A0 = csi.asDiagonal() * C0 * csi.asDiagonal();
    const Eigen::MatrixXd A0Jinv = cs_.asDiagonal() * jb.C0Jinv;
    const Eigen::MatrixXd G0J = csi.asDiagonal() * jb.Y0J;
    const Eigen::MatrixXd B0Jinv = csi.asDiagonal() * jb.L0Jinv;
    r.GammaQ = A0 * A0Jinv;
    r.GammaPhi = G0J + r.GammaQ * jb.YJ;
    r.CJtilde_inv =
        jb.CJinv - jb.C0Jinv.transpose() * C0 * jb.C0Jinv;

    auto anti = [&](double Om) {
        ModePoint mp = solve_modes(s, Om);
        Eigen::MatrixXd m =
            (mp.UG0 * mp.UF0.transpose() - mp.UF0 * mp.UG0.transpose()) / Om;
        return m;
    };
    r.Umat = integrate_log_matrix(anti, 1e-6 * Omega_max, Omega_max, panels);

    const Eigen::MatrixXd A0inv = A0.inverse();
    r.LJtilde_inv = jb.LJinv + r.GammaPhi.transpose() * A0inv * r.GammaPhi +
                    0.25 * jb.YJ * r.CJtilde_inv * jb.YJ.transpose() -
                    r.GammaPhi.transpose() * r.Umat * B0Jinv -
                    B0Jinv.transpose() * r.Umat.transpose() * r.GammaPhi;
    r.cross = r.GammaQ.transpose() * (A0inv * r.GammaPhi - r.Umat * B0Jinv) -
              0.5 * r.CJtilde_inv * jb.YJ;
    return r;
}

namespace {

// quantization-condition matrix for finite lines: rows are the far-end
// conditions applied to U(x) = cos(k x) u + sin(k x) s(u), where the x = 0
// block fixes s = Delta^{-1/2} (Binv - Omega^2 A) u / Omega
Eigen::MatrixXd finite_condition(const FiniteSpec& fs, double Omega) {
    const int N = fs.b.n();
    const Eigen::VectorXd Ds = sqrt_vec(fs.b.Delta);
    const Eigen::MatrixXd S =
        Ds.cwiseInverse().asDiagonal() *
        (fs.b.Binv - Omega * Omega * fs.b.A) / Omega;
    Eigen::MatrixXd R(N, N);
    for (int i = 0; i < N; ++i) {
        double th = Omega * fs.d / Ds(i);
        double cu = 0, csv = 0;  // coefficients of u_i and s_i in the row
        switch (fs.far[static_cast<size_t>(i)].kind) {
            case FarEnd::Kind::Open:
                cu = -std::sin(th);
                csv = std::cos(th);
                break;
            case FarEnd::Kind::Short:
                cu = std::cos(th);
                csv = std::sin(th);
                break;
            case FarEnd::Kind::Capacitive: {
                double ad = fs.far[static_cast<size_t>(i)].a_d;
                cu = -Ds(i) * std::sin(th) - Omega * ad * std::cos(th);
                csv = Ds(i) * std::cos(th) - Omega * ad * std::sin(th);
                break;
            }
        }
        R.row(i) = csv * S.row(i);
        R(i, i) += cu;
    }
    return R;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw std::runtime_error("root bracket lost during bisection");
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0 || (b - a) < 1e-15 * std::abs(m)) return m;
        if (fa * fm < 0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

bool offdiag_zero(const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0) return false;
    return true;
}

}  // namespace

std::vector<double> finite_line_spectrum(const FiniteSpec& fs,
                                         double Omega_max) {
    if (fs.b.G.norm() != 0)
        throw std::invalid_argument(
            "finite-line solver requires a reciprocal (G = 0) block");
    if (static_cast<int>(fs.far.size()) != fs.b.n())
        throw std::invalid_argument("one far-end condition per line required");
    const int N = fs.b.n();
    const Eigen::VectorXd Ds = sqrt_vec(fs.b.Delta);
    const double spacing = M_PI * Ds.minCoeff() / fs.d;
    const double lo = spacing * 1e-4;
    const double step = spacing / 64;

    std::vector<double> roots;
    if (offdiag_zero(fs.b.A) && offdiag_zero(fs.b.Binv)) {
        // decoupled lines: one scalar transcendental condition per line
        for (int i = 0; i < N; ++i) {
            auto f = [&, i](double Om) { return finite_condition(fs, Om)(i, i); };
            double prev = f(lo);
            for (double Om = lo + step; Om <= Omega_max; Om += step) {
                double cur = f(Om);
                if (prev * cur < 0) roots.push_back(bisect(f, Om - step, Om));
                prev = cur;
            }
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    auto det = [&](double Om) {
        Eigen::MatrixXd R = finite_condition(fs, Om);
        for (int i = 0; i < R.rows(); ++i) {
            double n2 = R.row(i).norm();
            if (n2 > 0) R.row(i) /= n2;
        }
        return R.determinant();
    };
    double prev = det(lo);
    for (double Om = lo + step; Om <= Omega_max; Om += step) {
        double cur = det(Om);
        if (prev * cur < 0) roots.push_back(bisect(det, Om - step, Om));
        prev = cur;
    }
    return roots;
}

FiniteMode finite_line_mode(const FiniteSpec& fs, double Omega) {
    const int N = fs.b.n();
    const Eigen::MatrixXd R = finite_condition(fs, Omega);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
    Eigen::VectorXd u = svd.matrixV().col(N - 1);
    const Eigen::VectorXd Ds = sqrt_vec(fs.b.Delta);
    Eigen::VectorXd s = Ds.cwiseInverse().asDiagonal() *
                        (fs.b.Binv - Omega * Omega * fs.b.A) * u / Omega;
    // normalize to unit max flux amplitude
    double amp = std::max(u.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff());
    u /= amp;
    s /= amp;
    FiniteMode fm;
    fm.Omega = Omega;
    fm.U = [u, s, Ds, Omega, N](double x) {
        Eigen::VectorXd out(N);
        for (int i = 0; i < N; ++i) {
            double th = Omega * x / Ds(i);
            out(i) = std::cos(th) * u(i) + std::sin(th) * s(i);
        }
        return out;
    };
    fm.V_d = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < N; ++i) {
        if (fs.far[static_cast<size_t>(i)].kind != FarEnd::Kind::Capacitive)
            continue;
        double th = Omega * fs.d / Ds(i);
        double up = (Omega / Ds(i)) * (-std::sin(th) * u(i) + std::cos(th) * s(i));
        fm.V_d(i) = fs.b.Delta(i) * up /
                    (Omega * fs.far[static_cast<size_t>(i)].a_d);
    }
    return fm;
}

FosterPoles foster_poles(double c, double l, double d, bool open_end,
                         int count) {
    if (!(c > 0 && l > 0 && d > 0))
        throw std::invalid_argument("line parameters must be positive");
    FosterPoles fp;
    fp.has_series_cap = open_end;
    fp.C0 = open_end ? c * d : 0.0;
    const double tau = d * std::sqrt(l * c);
    // poles of the input impedance: zeros of sin(w tau) (open far end, the
    // zero-frequency pole is carried by C0) or of cos(w tau) (shorted end)
    auto den = [&](double w) {
        return open_end ? std::sin(w * tau) : std::cos(w * tau);
    };
    for (int n = 1; n <= count; ++n) {
        double center =
            open_end ? n * M_PI / tau : (2 * n - 1) * M_PI / (2 * tau);
        double a = center - 0.4 * M_PI / tau, b = center + 0.4 * M_PI / tau;
        fp.poles.push_back(bisect(den, a, b));
    }
    return fp;
}

}  // namespace netham
