#include "netham/reduce.hpp"

#include <json.hpp>

#include <algorithm>

namespace netham {

using nlohmann::json;

namespace {

std::string render_combination(const RVec& coeffs,
                               const std::vector<CoordInfo>& coords) {
    std::string s;
    for (int i = 0; i < coeffs.size(); ++i) {
        const Rational& x = coeffs(i);
        if (x == 0) continue;
        std::string c = to_string(abs(x));
        std::string term = (c == "1" ? "" : c + "*") + coords[static_cast<size_t>(i)].label;
        if (s.empty())
            s = (x < 0 ? "-" : "") + term;
        else
            s += (x < 0 ? " - " : " + ") + term;
    }
    return s.empty() ? "0" : s;
}

}  // namespace

std::pair<ReducedSystem, HamiltonianModel> classify_and_solve(
    const TwoForm& tf, const ZeroModeSet& zm, const HamiltonianModel& h) {
    const int nz = tf.dim();
    const int m = static_cast<int>(zm.basis.cols());

    // classification, in the kernel's lexicographic (free-column) order
    std::vector<int> gauge_ix, constraint_ix;
    for (int i = 0; i < m; ++i) {
        RVec w = zm.basis.col(i);
        for (const auto& c : h.cosines)
            if (w.dot(c.wavevector) != 0)
                throw NonhomogeneousConstraint(
                    "zero-mode constraint on '" +
                    tf.coords[static_cast<size_t>(
                                  zm.free_cols[static_cast<size_t>(i)])]
                        .label +
                    "' is nonlinear (cosine argument involves an eliminated "
                    "coordinate)");
        RVec gq = h.quad * w;
        bool quad_zero = true;
        for (int j = 0; j < nz; ++j) quad_zero &= gq(j) == 0;
        bool lin_zero = h.linear.dot(w) == 0;
        bool drive_zero = true;
        for (const auto& d : h.drives) drive_zero &= d.coeff.dot(w) == 0;
        if (quad_zero && lin_zero && drive_zero)
            gauge_ix.push_back(i);
        else if (quad_zero)
            throw NonhomogeneousConstraint(
                "zero-mode constraint has no coordinate dependence but a "
                "nonzero source/linear part (inconsistent circuit)");
        else
            constraint_ix.push_back(i);
    }
    const int ng = static_cast<int>(gauge_ix.size());
    const int nc = static_cast<int>(constraint_ix.size());
    const int nxi = nz - m;

    // complement coordinates = non-free columns of the omega kernel
    std::vector<int> xi_ix;
    {
        std::vector<bool> is_free(static_cast<size_t>(nz), false);
        for (int fc : zm.free_cols) is_free[static_cast<size_t>(fc)] = true;
        for (int i = 0; i < nz; ++i)
            if (!is_free[static_cast<size_t>(i)]) xi_ix.push_back(i);
    }

    // y = (xi, gauge w, constraint w); z = P y
    RMat P = RMat::Zero(nz, nz);
    for (int j = 0; j < nxi; ++j) P(xi_ix[static_cast<size_t>(j)], j) = 1;
    for (int j = 0; j < ng; ++j)
        P.col(nxi + j) = zm.basis.col(gauge_ix[static_cast<size_t>(j)]);
    for (int j = 0; j < nc; ++j)
        P.col(nxi + ng + j) = zm.basis.col(constraint_ix[static_cast<size_t>(j)]);

    RMat quad_y = P.transpose() * h.quad * P;
    RVec linear_y = P.transpose() * h.linear;

    auto block = [&](const RMat& a, int r0, int nr, int c0, int ncol) {
        return RMat(a.block(r0, c0, nr, ncol));
    };
    RMat A_xx = block(quad_y, 0, nxi, 0, nxi);
    RMat A_xc = block(quad_y, 0, nxi, nxi + ng, nc);
    RMat A_cc = block(quad_y, nxi + ng, nc, nxi + ng, nc);
    RVec l_x = linear_y.segment(0, nxi);
    RVec l_c = linear_y.segment(nxi + ng, nc);

    RMat M(nc, 0);
    RVec m0(nc);
    std::vector<RVec> mdrive;
    if (nc > 0) {
        RMat Acc_inv;
        try {
            Acc_inv = inverse(A_cc);
        } catch (const std::domain_error&) {
            throw NonhomogeneousConstraint(
                "linear constraint block is singular; cannot solve eliminated "
                "coordinates");
        }
        M = -(Acc_inv * block(quad_y, nxi + ng, nc, 0, nxi));
        m0 = -(Acc_inv * l_c);
        for (const auto& d : h.drives) {
            RVec dy = P.transpose() * d.coeff;
            mdrive.push_back(-(Acc_inv * RVec(dy.segment(nxi + ng, nc))));
        }
    } else {
        M = RMat::Zero(0, nxi);
        m0 = RVec::Zero(0);
        for (size_t j = 0; j < h.drives.size(); ++j) mdrive.push_back(RVec::Zero(0));
    }

    // substitute w* = M xi + m0 + sum_j m_j v_j into the quadratic form
    HamiltonianModel hred;
    for (int i : xi_ix) hred.coords.push_back(tf.coords[static_cast<size_t>(i)]);
    hred.quad = A_xx + A_xc * M + M.transpose() * A_xc.transpose() +
                M.transpose() * A_cc * M;
    hred.linear = l_x + A_xc * m0 + M.transpose() * (A_cc * m0 + l_c);
    for (const auto& c : h.cosines) {
        CosineTerm nc2 = c;
        RVec ky = P.transpose() * c.wavevector;
        nc2.wavevector = ky.segment(0, nxi);
        hred.cosines.push_back(std::move(nc2));
    }
    for (size_t j = 0; j < h.drives.size(); ++j) {
        RVec dy = P.transpose() * h.drives[j].coeff;
        DriveTerm nd = h.drives[j];
        RVec d_x = dy.segment(0, nxi), d_c = dy.segment(nxi + ng, nc);
        nd.coeff = d_x + A_xc * mdrive[j] +
                   M.transpose() * (A_cc * mdrive[j] + d_c);
        hred.drives.push_back(std::move(nd));
    }

    // canonical form on the surviving block
    TwoForm tf_xi;
    tf_xi.omega = RMat((P.transpose() * tf.omega * P).block(0, 0, nxi, nxi));
    tf_xi.coords = hred.coords;
    SymplecticTransform st = darboux(tf_xi);

    HamiltonianModel heta =
        change_coordinates(hred, st.S, RVec::Zero(nxi), st.coords);

    ReducedSystem rs;
    rs.coords = st.coords;
    rs.n_pairs = st.n_pairs;
    rs.omega_z = tf.omega;
    rs.omega_eta = st.S.transpose() * tf_xi.omega * st.S;

    RMat P_x = block(P, 0, nz, 0, nxi);
    RMat P_c = block(P, 0, nz, nxi + ng, nc);
    rs.z_of_eta = (P_x + P_c * M) * st.S;
    rs.z_const = P_c * m0;
    for (size_t j = 0; j < h.drives.size(); ++j) {
        rs.z_of_drive.push_back(P_c * mdrive[j]);
        rs.drive_waveforms.push_back(h.drives[j].waveform);
    }

    for (int j = 0; j < ng; ++j) {
        ZeroModeReport r;
        r.cls = ZeroModeClass::Gauge;
        r.label = tf.coords[static_cast<size_t>(
                                zm.free_cols[static_cast<size_t>(
                                    gauge_ix[static_cast<size_t>(j)])])]
                      .label;
        r.detail = "gauge freedom; coordinate fixed to 0";
        rs.zero_mode_reports.push_back(std::move(r));
    }
    for (int j = 0; j < nc; ++j) {
        ZeroModeReport r;
        r.cls = ZeroModeClass::LinearConstraint;
        r.label = tf.coords[static_cast<size_t>(
                                zm.free_cols[static_cast<size_t>(
                                    constraint_ix[static_cast<size_t>(j)])])]
                      .label;
        std::string rhs = render_combination(RVec(M.row(j).transpose()), hred.coords);
        if (m0(j) != 0) rhs += " + " + to_string(m0(j));
        for (size_t d = 0; d < mdrive.size(); ++d)
            if (mdrive[d](j) != 0)
                rhs += " + " + to_string(mdrive[d](j)) + "*" +
                       h.drives[d].source + "(t)";
        r.detail = "solved: " + r.label + " = " + rhs;
        rs.zero_mode_reports.push_back(std::move(r));
    }
    return {std::move(rs), std::move(heta)};
}

ReductionResult reduce_circuit(const CircuitGraph& g) {
    ReductionResult out;
    Tree t = spanning_tree(g);
    out.constraints = build_constraints(g, t);
    TwoForm branch_form = build_two_form(g);
    TwoForm omega_z = pullback(branch_form, out.constraints, g);
    out.hamiltonian_z = assemble_energy(g, out.constraints);
    ZeroModeSet zm = zero_modes(omega_z);
    auto [rs, h] = classify_and_solve(omega_z, zm, out.hamiltonian_z);
    out.system = std::move(rs);
    out.hamiltonian = std::move(h);
    return out;
}

namespace {

json rational_matrix(const RMat& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(to_string(a(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json rational_vector(const RVec& v) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(to_string(v(i)));
    return row;
}

json coords_json(const std::vector<CoordInfo>& coords) {
    json out = json::array();
    for (const auto& c : coords) {
        json jc = {{"label", c.label}};
        jc["topology"] = c.topology == VarTopology::Compact ? "S1"
                         : c.topology == VarTopology::Extended ? "R" : "unset";
        if (!c.modulus.empty()) jc["modulus"] = c.modulus;
        out.push_back(jc);
    }
    return out;
}

json hamiltonian_json(const HamiltonianModel& h) {
    json out;
    out["coords"] = coords_json(h.coords);
    out["quad"] = rational_matrix(h.quad);
    out["linear"] = rational_vector(h.linear);
    out["cosines"] = json::array();
    for (const auto& c : h.cosines)
        out["cosines"].push_back({{"amplitude", to_string(c.amplitude)},
                                  {"wavevector", rational_vector(c.wavevector)},
                                  {"phase", to_string(c.phase)},
                                  {"modulus", c.modulus}});
    out["drives"] = json::array();
    for (const auto& d : h.drives)
        out["drives"].push_back(
            {{"source", d.source}, {"coeff", rational_vector(d.coeff)}});
    return out;
}

}  // namespace

std::string hamiltonian_descriptor(const HamiltonianModel& h) {
    return hamiltonian_json(h).dump(2);
}

std::string reduction_report(const ReductionResult& r) {
    json out;
    out["constraints"] = {
        {"rows", r.constraints.F.rows()},
        {"cols", r.constraints.F.cols()},
        {"rank", rank(r.constraints.F)},
        {"kernel_dim", r.constraints.K.cols()},
        {"z_labels", r.constraints.z_labels},
    };
    out["omega_z"] = rational_matrix(r.system.omega_z);
    out["omega_eta"] = rational_matrix(r.system.omega_eta);
    out["zero_modes"] = json::array();
    for (const auto& zr : r.system.zero_mode_reports) {
        const char* cls = zr.cls == ZeroModeClass::Gauge ? "gauge"
                          : zr.cls == ZeroModeClass::LinearConstraint
                              ? "linear_constraint"
                              : "nonhomogeneous";
        out["zero_modes"].push_back(
            {{"class", cls}, {"coordinate", zr.label}, {"detail", zr.detail}});
    }
    out["canonical_coords"] = coords_json(r.system.coords);
    out["n_pairs"] = r.system.n_pairs;
    out["hamiltonian"] = hamiltonian_json(r.hamiltonian);
    out["back_substitution"] = {
        {"z_of_eta", rational_matrix(r.system.z_of_eta)},
        {"z_const", rational_vector(r.system.z_const)},
    };
    json zd = json::array();
    for (const auto& v : r.system.z_of_drive) zd.push_back(rational_vector(v));
    out["back_substitution"]["z_of_drive"] = zd;
    return out.dump(2);
}

}  // namespace netham
