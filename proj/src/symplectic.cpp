#include "netham/symplectic.hpp"

#include <stdexcept>

namespace netham {

namespace {

bool inductive_class(ElementKind k) {
    return k == ElementKind::Inductor || k == ElementKind::CurrentSource ||
           k == ElementKind::JosephsonJunction;
}

bool capacitive_class(ElementKind k) {
    return k == ElementKind::Capacitor || k == ElementKind::VoltageSource ||
           k == ElementKind::PhaseSlip;
}

int compact_count(const std::vector<CoordInfo>& coords) {
    int n = 0;
    for (const auto& c : coords) n += c.topology == VarTopology::Compact;
    return n;
}

}  // namespace

TwoForm build_two_form(const CircuitGraph& g) {
    const int B = g.n_branches();
    TwoForm tf;
    tf.omega = RMat::Zero(2 * B, 2 * B);
    const Rational half(1, 2);
    for (int b = 0; b < B; ++b) {
        const Branch& br = g.branches[static_cast<size_t>(b)];
        int f = g.flux_coord(b), q = g.charge_coord(b);
        if (inductive_class(br.kind)) {          // 1/2 dphi ∧ dq
            tf.omega(f, q) += half;
            tf.omega(q, f) -= half;
        } else if (capacitive_class(br.kind)) {  // 1/2 dq ∧ dphi
            tf.omega(q, f) += half;
            tf.omega(f, q) -= half;
        }
        CoordInfo cf{coord_name(g, f), br.flux,
                     br.flux == VarTopology::Compact ? kFluxModulus : "",
                     CoordInfo::Sector::Flux};
        tf.coords.push_back(std::move(cf));
    }
    for (int b = 0; b < B; ++b) {
        const Branch& br = g.branches[static_cast<size_t>(b)];
        CoordInfo cq{coord_name(g, g.charge_coord(b)), br.charge,
                     br.charge == VarTopology::Compact ? kChargeModulus : "",
                     CoordInfo::Sector::Charge};
        tf.coords.push_back(std::move(cq));
    }
    return tf;
}

TwoForm pullback(const TwoForm& tf, const ConstraintSystem& cs,
                 const CircuitGraph& g) {
    if (tf.omega.rows() != cs.K.rows())
        throw std::domain_error("pullback: dimension mismatch");
    (void)g;
    TwoForm out;
    out.omega = cs.K.transpose() * tf.omega * cs.K;
    out.coords = cs.z_coords;
    return out;
}

ZeroModeSet zero_modes(const TwoForm& tf) {
    Kernel k = kernel(tf.omega);
    return {std::move(k.basis), std::move(k.free_cols)};
}

namespace {

SymplecticTransform gram_schmidt_darboux(const TwoForm& tf) {
    const int n = tf.dim();
    const RMat& om = tf.omega;
    std::vector<RVec> remaining;
    for (int i = 0; i < n; ++i) {
        RVec e = RVec::Zero(n);
        e(i) = 1;
        remaining.push_back(std::move(e));
    }
    std::vector<RVec> us, vs;
    while (!remaining.empty()) {
        RVec u = remaining.front();
        remaining.erase(remaining.begin());
        RVec ou = om.transpose() * u;  // row: omega(u, .)
        size_t partner = remaining.size();
        Rational c = 0;
        for (size_t j = 0; j < remaining.size(); ++j) {
            c = u.dot(om * remaining[j]);
            if (c != 0) { partner = j; break; }
        }
        if (partner == remaining.size())
            throw std::domain_error("darboux: degenerate two-form");
        RVec v = remaining[static_cast<size_t>(partner)] / c;
        remaining.erase(remaining.begin() + static_cast<long>(partner));
        for (auto& w : remaining) {
            Rational a = u.dot(om * w), b = v.dot(om * w);
            w = w - a * v + b * u;
        }
        us.push_back(std::move(u));
        vs.push_back(std::move(v));
    }
    SymplecticTransform st;
    st.n_pairs = static_cast<int>(us.size());
    st.S = RMat(n, n);
    for (int i = 0; i < st.n_pairs; ++i) {
        st.S.col(i) = us[static_cast<size_t>(i)];
        st.S.col(st.n_pairs + i) = vs[static_cast<size_t>(i)];
    }
    auto col_info = [&](const RVec& col) {
        // keep label/tags when the vector is a (scaled) coordinate axis
        int support = -1;
        for (int i = 0; i < n; ++i)
            if (col(i) != 0) {
                if (support >= 0) { support = -1; break; }
                support = i;
            }
        if (support >= 0) {
            CoordInfo ci = tf.coords[static_cast<size_t>(support)];
            if (col(support) != 1) ci.label += "~";
            return ci;
        }
        CoordInfo ci;
        ci.label = "mix";
        ci.topology = VarTopology::Extended;
        ci.sector = CoordInfo::Sector::Mixed;
        return ci;
    };
    for (int i = 0; i < st.n_pairs; ++i) st.coords.push_back(col_info(st.S.col(i)));
    for (int i = 0; i < st.n_pairs; ++i)
        st.coords.push_back(col_info(st.S.col(st.n_pairs + i)));
    return st;
}

// Structured route: with x permuted to (shift-side s, kept-side p),
// omega = [[0, A], [-A^T, Bk]] with A invertible and Bk skew. Then
// x_s = A^{-T}(eta_s + 1/2 Bk eta_p), x_p = eta_p gives S^T omega S = J and
// leaves the kept side (fluxes, typically compact) untouched.
bool structured_darboux(const TwoForm& tf, const std::vector<int>& shift,
                        const std::vector<int>& keep, SymplecticTransform& out) {
    const int n = tf.dim(), half = static_cast<int>(shift.size());
    if (static_cast<int>(keep.size()) != half || 2 * half != n) return false;
    RMat zz(half, half), A(half, half), Bk(half, half);
    for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) {
            zz(i, j) = tf.omega(shift[static_cast<size_t>(i)], shift[static_cast<size_t>(j)]);
            A(i, j) = tf.omega(shift[static_cast<size_t>(i)], keep[static_cast<size_t>(j)]);
            Bk(i, j) = tf.omega(keep[static_cast<size_t>(i)], keep[static_cast<size_t>(j)]);
        }
    if (!is_zero(zz) || rank(A) != half) return false;
    RMat Ait = inverse(A).transpose();
    RMat Sp(n, n);
    Sp.setZero();
    RMat top_left = Ait;                  // d x_s / d eta_s
    RMat top_right = Ait * Bk / 2;        // d x_s / d eta_p
    for (int i = 0; i < half; ++i) {
        for (int j = 0; j < half; ++j) {
            Sp(shift[static_cast<size_t>(i)], j) = top_left(i, j);
            Sp(shift[static_cast<size_t>(i)], half + j) = top_right(i, j);
        }
        Sp(keep[static_cast<size_t>(i)], half + i) = 1;
    }
    out.S = std::move(Sp);
    out.n_pairs = half;
    out.coords.clear();
    for (int i = 0; i < half; ++i) {
        CoordInfo ci = tf.coords[static_cast<size_t>(shift[static_cast<size_t>(i)])];
        // the shifted coordinate is a combination unless its S column is e_i
        bool unit = true;
        for (int r = 0; r < n && unit; ++r)
            unit = (out.S(r, i) == (r == shift[static_cast<size_t>(i)] ? 1 : 0));
        if (!unit) {
            ci.label += "~";
            if (ci.topology == VarTopology::Compact) {
                ci.topology = VarTopology::Extended;
                ci.modulus.clear();
            }
        }
        out.coords.push_back(std::move(ci));
    }
    for (int i = 0; i < half; ++i)
        out.coords.push_back(tf.coords[static_cast<size_t>(keep[static_cast<size_t>(i)])]);
    return true;
}

}  // namespace

SymplecticTransform darboux(const TwoForm& tf) {
    const int n = tf.dim();
    if (n % 2 != 0 || rank(tf.omega) != n)
        throw std::domain_error("darboux: degenerate two-form");

    // Prefer shifting pure-charge coordinates: compact directions and cosine
    // arguments live on the flux side, and the structured route passes the
    // kept side through untouched (this is what turns a gyrator's flux-flux
    // block into the familiar shifted-charge pairing). Mixed-support
    // coordinates count as flux-side. Fall back to shifting the flux side,
    // then to symplectic Gram-Schmidt.
    std::vector<int> charges, fluxes;
    for (int i = 0; i < n; ++i) {
        if (tf.coords[static_cast<size_t>(i)].sector == CoordInfo::Sector::Charge)
            charges.push_back(i);
        else
            fluxes.push_back(i);
    }

    SymplecticTransform st;
    bool done = structured_darboux(tf, charges, fluxes, st) ||
                structured_darboux(tf, fluxes, charges, st);
    if (!done) st = gram_schmidt_darboux(tf);

    // exactness guard: S^T omega S must be the canonical block J
    RMat J = RMat::Zero(n, n);
    for (int i = 0; i < st.n_pairs; ++i) {
        J(i, st.n_pairs + i) = 1;
        J(st.n_pairs + i, i) = -1;
    }
    if (!is_zero(st.S.transpose() * tf.omega * st.S - J))
        throw std::logic_error("darboux: transform failed exactness check");
    if (compact_count(st.coords) != compact_count(tf.coords))
        throw std::runtime_error(
            "darboux: could not preserve compact coordinate count");
    return st;
}

}  // namespace netham
