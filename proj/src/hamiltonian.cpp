#include "netham/hamiltonian.hpp"

#include <cmath>

namespace netham {

double EvalContext::modulus_value(const std::string& m) const {
    if (m == kFluxModulus) return flux_quantum;
    if (m == kChargeModulus) return charge_2e;
    return 1.0;
}

double NumericModel::value(const Eigen::VectorXd& x, double t) const {
    double v = 0.5 * x.dot(quad * x) + linear.dot(x);
    for (const auto& c : cosines) v -= c.amplitude * std::cos(c.k.dot(x) + c.phase);
    for (const auto* d : drives) {
        Eigen::VectorXd cd(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) cd(i) = to_double(d->coeff(i));
        v += cd.dot(x) * d->waveform(t);
    }
    return v;
}

Eigen::VectorXd NumericModel::gradient(const Eigen::VectorXd& x, double t) const {
    Eigen::VectorXd g = quad * x + linear;
    for (const auto& c : cosines) g += c.amplitude * std::sin(c.k.dot(x) + c.phase) * c.k;
    for (const auto* d : drives) {
        double w = d->waveform(t);
        for (Eigen::Index i = 0; i < x.size(); ++i) g(i) += to_double(d->coeff(i)) * w;
    }
    return g;
}

NumericModel make_numeric(const HamiltonianModel& h, const EvalContext& ctx) {
    NumericModel n;
    n.quad = to_double(h.quad);
    n.linear = Eigen::VectorXd(h.dim());
    for (int i = 0; i < h.dim(); ++i) n.linear(i) = to_double(h.linear(i));
    for (const auto& c : h.cosines) {
        double scale = 2.0 * M_PI / ctx.modulus_value(c.modulus);
        NumericModel::Cos nc;
        nc.amplitude = to_double(c.amplitude);
        nc.phase = to_double(c.phase) * scale;
        nc.k = Eigen::VectorXd(h.dim());
        for (int i = 0; i < h.dim(); ++i) nc.k(i) = to_double(c.wavevector(i)) * scale;
        n.cosines.push_back(std::move(nc));
    }
    for (const auto& d : h.drives) n.drives.push_back(&d);
    return n;
}

HamiltonianModel assemble_energy(const CircuitGraph& g, const ConstraintSystem& cs) {
    const int B = g.n_branches();
    const int n = static_cast<int>(cs.K.cols());
    HamiltonianModel h;
    h.quad = RMat::Zero(n, n);
    h.linear = RVec::Zero(n);
    h.coords = cs.z_coords;

    auto krow = [&](int coord) {
        RVec r(n);
        for (int j = 0; j < n; ++j) r(j) = cs.K(coord, j);
        return r;
    };

    for (int b = 0; b < B; ++b) {
        const Branch& br = g.branches[static_cast<size_t>(b)];
        switch (br.kind) {
            case ElementKind::Capacitor: {  // q^2 / 2C
                RVec r = krow(g.charge_coord(b));
                h.quad += (r * r.transpose()) / br.value;
                break;
            }
            case ElementKind::Inductor: {  // phi^2 / 2L
                RVec r = krow(g.flux_coord(b));
                h.quad += (r * r.transpose()) / br.value;
                break;
            }
            case ElementKind::JosephsonJunction: {  // -E_J cos(2 pi phi / Phi_Q)
                CosineTerm c;
                c.amplitude = br.value;
                c.wavevector = krow(g.flux_coord(b));
                c.modulus = kFluxModulus;
                h.cosines.push_back(std::move(c));
                break;
            }
            case ElementKind::PhaseSlip: {  // -E_S cos(2 pi q / 2e)
                CosineTerm c;
                c.amplitude = br.value;
                c.wavevector = krow(g.charge_coord(b));
                c.modulus = kChargeModulus;
                h.cosines.push_back(std::move(c));
                break;
            }
            case ElementKind::VoltageSource:
            case ElementKind::CurrentSource: {
                const Drive* d = g.drive_for(br.id);
                if (!d) break;  // undriven source contributes nothing
                DriveTerm dt;
                dt.coeff = br.kind == ElementKind::VoltageSource
                               ? krow(g.charge_coord(b))
                               : krow(g.flux_coord(b));
                dt.waveform = d->waveform;
                dt.source = br.id;
                h.drives.push_back(std::move(dt));
                break;
            }
            case ElementKind::TransformerPort:
            case ElementKind::GyratorPort:
                break;  // constraint elements store no energy
        }
    }
    return h;
}

HamiltonianModel change_coordinates(const HamiltonianModel& h, const RMat& M,
                                    const RVec& offset,
                                    std::vector<CoordInfo> new_coords) {
    if (M.rows() != h.dim() || M.rows() != M.cols())
        throw std::domain_error("change_coordinates: map must be square");
    if (rank(M) != M.rows())
        throw std::domain_error("change_coordinates: singular map");
    HamiltonianModel out;
    out.coords = std::move(new_coords);
    out.quad = M.transpose() * h.quad * M;
    // 1/2 (Mx+c)^T A (Mx+c) => linear picks up M^T A c; constant dropped
    out.linear = M.transpose() * (h.linear + h.quad * offset);
    for (const auto& c : h.cosines) {
        CosineTerm nc = c;
        nc.wavevector = (c.wavevector.transpose() * M).transpose();
        nc.phase = c.phase + c.wavevector.dot(offset);
        out.cosines.push_back(std::move(nc));
    }
    for (const auto& d : h.drives) {
        DriveTerm nd = d;
        nd.coeff = (d.coeff.transpose() * M).transpose();
        out.drives.push_back(std::move(nd));
    }
    return out;
}

std::string periodicity_violation(const HamiltonianModel& h) {
    for (int i = 0; i < h.dim(); ++i) {
        const CoordInfo& ci = h.coords[static_cast<size_t>(i)];
        if (ci.topology != VarTopology::Compact) continue;
        for (int j = 0; j < h.dim(); ++j)
            if (h.quad(i, j) != 0)
                return ci.label + ": quadratic coefficient on compact coordinate";
        if (h.linear(i) != 0)
            return ci.label + ": linear coefficient on compact coordinate";
        for (const auto& d : h.drives)
            if (d.coeff(i) != 0)
                return ci.label + ": drive coupling on compact coordinate";
        for (const auto& c : h.cosines) {
            if (c.wavevector(i) == 0) continue;
            if (c.modulus != ci.modulus)
                return ci.label + ": cosine with mismatched modulus";
            if (denominator(Rational(c.wavevector(i))) != 1)
                return ci.label + ": non-integer cosine winding";
        }
    }
    return {};
}

}  // namespace netham
