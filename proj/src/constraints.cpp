#include "netham/constraints.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace netham {

namespace {

bool capacitive_type(ElementKind k) {
    return k == ElementKind::Capacitor || k == ElementKind::VoltageSource ||
           k == ElementKind::JosephsonJunction;
}

}  // namespace

Tree spanning_tree(const CircuitGraph& g) {
    const int B = g.n_branches();
    std::vector<int> order(static_cast<size_t>(B));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return capacitive_type(g.branches[static_cast<size_t>(a)].kind) >
               capacitive_type(g.branches[static_cast<size_t>(b)].kind);
    });

    std::vector<int> parent(g.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
        return x;
    };

    Tree t;
    std::vector<bool> in_tree(static_cast<size_t>(B), false);
    for (int bi : order) {
        const Branch& b = g.branches[static_cast<size_t>(bi)];
        int ru = find(g.node_index(b.tail)), rv = find(g.node_index(b.head));
        if (ru != rv) {
            parent[static_cast<size_t>(ru)] = rv;
            in_tree[static_cast<size_t>(bi)] = true;
        }
    }
    int root = find(0);
    for (size_t i = 1; i < g.nodes.size(); ++i)
        if (find(static_cast<int>(i)) != root)
            throw std::runtime_error("spanning_tree: graph not connected");
    for (int bi = 0; bi < B; ++bi)
        (in_tree[static_cast<size_t>(bi)] ? t.tree_branches : t.cotree_branches)
            .push_back(bi);
    return t;
}

std::string coord_name(const CircuitGraph& g, int c) {
    const int B = g.n_branches();
    if (c < B) return "phi(" + g.branches[static_cast<size_t>(c)].id + ")";
    return "q(" + g.branches[static_cast<size_t>(c - B)].id + ")";
}

namespace {

// tree adjacency: node -> list of (neighbor node, tree branch index)
std::vector<std::vector<std::pair<int, int>>> tree_adjacency(
    const CircuitGraph& g, const Tree& t) {
    std::vector<std::vector<std::pair<int, int>>> adj(g.nodes.size());
    for (int bi : t.tree_branches) {
        const Branch& b = g.branches[static_cast<size_t>(bi)];
        int u = g.node_index(b.tail), v = g.node_index(b.head);
        adj[static_cast<size_t>(u)].push_back({v, bi});
        adj[static_cast<size_t>(v)].push_back({u, bi});
    }
    return adj;
}

// node sequence of the unique tree path from -> to (BFS parents)
std::vector<std::pair<int, int>> tree_path(
    const std::vector<std::vector<std::pair<int, int>>>& adj, int from, int to) {
    std::vector<int> par(adj.size(), -1), par_edge(adj.size(), -1);
    std::deque<int> q{from};
    par[static_cast<size_t>(from)] = from;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        if (x == to) break;
        for (auto [y, e] : adj[static_cast<size_t>(x)])
            if (par[static_cast<size_t>(y)] < 0) {
                par[static_cast<size_t>(y)] = x;
                par_edge[static_cast<size_t>(y)] = e;
                q.push_back(y);
            }
    }
    std::vector<std::pair<int, int>> steps;  // (edge, +1 if traversed tail->head)
    for (int x = to; x != from; x = par[static_cast<size_t>(x)])
        steps.push_back({par_edge[static_cast<size_t>(x)], x});
    std::reverse(steps.begin(), steps.end());
    return steps;  // each entry: (branch, node arrived at)
}

}  // namespace

namespace {

// Period-lattice alignment. A compact cycle of the solution manifold is an
// integer branch-variable shift v, supported on compact variables of a single
// sector, with F v = 0: moving the state by modulus*v lands on an identified
// configuration. We compute a saturated integer basis of that lattice per
// sector, lift each basis vector through K, and change the kernel basis so
// every lattice direction is a coordinate axis. All remaining coordinates
// parameterize non-cyclic directions and are extended, whatever the raw tag
// of their defining branch variable says.
void align_period_lattice(const CircuitGraph& g, ConstraintSystem& cs,
                          const std::vector<int>& free_cols) {
    const int B = g.n_branches();
    const Eigen::Index nz = cs.K.cols();
    const IMat fi = clear_denominators(cs.F);

    bool any_unset = false;
    for (const auto& br : g.branches)
        any_unset |= br.flux == VarTopology::Unset ||
                     br.charge == VarTopology::Unset;

    auto lattice = [&](bool flux_side, bool unset_compact) {
        auto movable = [&](VarTopology t) {
            return t == VarTopology::Compact ||
                   (t == VarTopology::Unset && unset_compact);
        };
        std::vector<int> frozen;
        for (int b = 0; b < B; ++b) {
            const Branch& br = g.branches[static_cast<size_t>(b)];
            if (!(flux_side && movable(br.flux)))
                frozen.push_back(g.flux_coord(b));
            if (!(!flux_side && movable(br.charge)))
                frozen.push_back(g.charge_coord(b));
        }
        IMat a = IMat::Zero(fi.rows() + static_cast<Eigen::Index>(frozen.size()),
                            2 * B);
        a.topRows(fi.rows()) = fi;
        for (size_t i = 0; i < frozen.size(); ++i)
            a(fi.rows() + static_cast<Eigen::Index>(i), frozen[i]) = 1;
        return integer_kernel(std::move(a));
    };
    auto side = [&](bool flux_side, const char* what) {
        IMat l = lattice(flux_side, false);
        if (any_unset) {
            IMat both = lattice(flux_side, true);
            if (both.cols() != l.cols())
                throw TopologyUndetermined(
                    std::string("compactness undetermined: multiport ") + what +
                    " tags are load-bearing (" + std::to_string(l.cols()) +
                    " vs " + std::to_string(both.cols()) +
                    " compact directions)");
        }
        return l;
    };
    const IMat lat_f = side(true, "flux");
    const IMat lat_c = side(false, "charge");
    const Eigen::Index mf = lat_f.cols(), mc = lat_c.cols();

    // lift the lattice directions through K (K has full column rank and the
    // directions lie in ker F = range K, so the lift is exact and unique)
    RMat u(nz, nz);
    std::vector<IMat> zetas;
    for (Eigen::Index j = 0; j < mf + mc; ++j) {
        IMat zi = j < mf ? IMat(lat_f.col(j)) : IMat(lat_c.col(j - mf));
        RMat zeta(2 * B, 1);
        for (Eigen::Index i = 0; i < 2 * B; ++i) zeta(i, 0) = Rational(zi(i, 0));
        u.col(j) = solve(cs.K, zeta);
        zetas.push_back(std::move(zi));
    }
    // complete with original kernel coordinates, in declaration order
    Eigen::Index filled = mf + mc;
    std::vector<int> completion;
    for (Eigen::Index i = 0; i < nz && filled < nz; ++i) {
        RVec e = RVec::Zero(nz);
        e(i) = 1;
        u.col(filled) = e;
        RMat probe = u.leftCols(filled + 1);
        if (rank(probe) == filled + 1) {
            completion.push_back(static_cast<int>(i));
            ++filled;
        }
    }
    if (filled != nz)
        throw std::logic_error("align_period_lattice: basis completion failed");

    cs.K = RMat(cs.K * u);
    cs.z_labels.clear();
    cs.z_free_cols.clear();
    cs.z_coords.clear();
    for (Eigen::Index j = 0; j < nz; ++j) {
        CoordInfo ci;
        bool has_flux = false, has_charge = false;
        for (Eigen::Index i = 0; i < cs.K.rows(); ++i)
            if (cs.K(i, j) != 0) (i < B ? has_flux : has_charge) = true;
        if (!has_flux && !has_charge)
            throw std::logic_error("align_period_lattice: zero kernel column");
        ci.sector = has_flux && has_charge ? CoordInfo::Sector::Mixed
                    : has_flux             ? CoordInfo::Sector::Flux
                                           : CoordInfo::Sector::Charge;
        int lead = -1;
        bool twiddle = ci.sector == CoordInfo::Sector::Mixed;
        if (j < mf + mc) {
            ci.topology = VarTopology::Compact;
            ci.modulus = j < mf ? kFluxModulus : kChargeModulus;
            // label from the integer branch shift, flag combinations
            const IMat& zeta = zetas[static_cast<size_t>(j)];
            int nonzero = 0;
            for (Eigen::Index i = 0; i < 2 * B; ++i)
                if (zeta(i, 0) != 0) {
                    if (lead < 0) lead = static_cast<int>(i);
                    ++nonzero;
                }
            twiddle = twiddle || nonzero > 1 || zeta(lead, 0) != 1;
        } else {
            ci.topology = VarTopology::Extended;
            lead = free_cols[static_cast<size_t>(
                completion[static_cast<size_t>(j - mf - mc)])];
        }
        ci.label = coord_name(g, lead);
        if (twiddle) ci.label += "~";
        cs.z_labels.push_back(ci.label);
        cs.z_free_cols.push_back(lead);
        cs.z_coords.push_back(std::move(ci));
    }
}

}  // namespace

ConstraintSystem build_constraints(const CircuitGraph& g, const Tree& t) {
    const int B = g.n_branches();
    ConstraintSystem cs;
    auto adj = tree_adjacency(g, t);

    // KVL fundamental loops: one per cotree branch, traversed along it.
    cs.loop_rows = RMat::Zero(static_cast<Eigen::Index>(t.cotree_branches.size()), B);
    {
        Eigen::Index r = 0;
        for (int bi : t.cotree_branches) {
            const Branch& b = g.branches[static_cast<size_t>(bi)];
            cs.loop_rows(r, bi) = 1;
            int u = g.node_index(b.tail), v = g.node_index(b.head);
            int at = v;
            for (auto [e, arrived] : tree_path(adj, v, u)) {
                const Branch& tb = g.branches[static_cast<size_t>(e)];
                int from_node = at;
                at = arrived;
                // along orientation if we stepped tail -> head
                cs.loop_rows(r, e) +=
                    (g.node_index(tb.tail) == from_node) ? 1 : -1;
            }
            ++r;
        }
    }

    // KCL fundamental cutsets: one per tree branch; sign +1 for branches
    // crossing into the head-side component along the tree branch direction.
    cs.cutset_rows = RMat::Zero(static_cast<Eigen::Index>(t.tree_branches.size()), B);
    {
        Eigen::Index r = 0;
        for (int ti : t.tree_branches) {
            const Branch& tb = g.branches[static_cast<size_t>(ti)];
            // mark the component containing tb.head when ti is removed
            std::vector<bool> in_head(g.nodes.size(), false);
            std::deque<int> q{g.node_index(tb.head)};
            in_head[static_cast<size_t>(g.node_index(tb.head))] = true;
            while (!q.empty()) {
                int x = q.front();
                q.pop_front();
                for (auto [y, e] : adj[static_cast<size_t>(x)])
                    if (e != ti && !in_head[static_cast<size_t>(y)]) {
                        in_head[static_cast<size_t>(y)] = true;
                        q.push_back(y);
                    }
            }
            for (int bi = 0; bi < B; ++bi) {
                const Branch& b = g.branches[static_cast<size_t>(bi)];
                bool tail_in = in_head[static_cast<size_t>(g.node_index(b.tail))];
                bool head_in = in_head[static_cast<size_t>(g.node_index(b.head))];
                if (!tail_in && head_in)
                    cs.cutset_rows(r, bi) = 1;
                else if (tail_in && !head_in)
                    cs.cutset_rows(r, bi) = -1;
            }
            ++r;
        }
    }

    // Multiport rows
    Eigen::Index extra = 0;
    for (const auto& m : g.multiports)
        extra += m.type == MultiportGroup::Type::Gyrator
                     ? m.matrix.rows()
                     : m.matrix.rows() + m.matrix.cols();
    const Eigen::Index n_loops = cs.loop_rows.rows();
    const Eigen::Index n_cuts = cs.cutset_rows.rows();
    cs.F = RMat::Zero(n_loops + n_cuts + extra, 2 * B);
    cs.F.block(0, 0, n_loops, B) = cs.loop_rows;
    cs.F.block(n_loops, B, n_cuts, B) = cs.cutset_rows;
    for (Eigen::Index i = 0; i < n_loops; ++i) {
        cs.row_kinds.push_back(ConstraintRowKind::KvlLoop);
        cs.row_labels.push_back(
            "kvl(" +
            g.branches[static_cast<size_t>(t.cotree_branches[static_cast<size_t>(i)])].id +
            ")");
    }
    for (Eigen::Index i = 0; i < n_cuts; ++i) {
        cs.row_kinds.push_back(ConstraintRowKind::KclCutset);
        cs.row_labels.push_back(
            "kcl(" +
            g.branches[static_cast<size_t>(t.tree_branches[static_cast<size_t>(i)])].id +
            ")");
    }

    Eigen::Index r = n_loops + n_cuts;
    for (const auto& m : g.multiports) {
        if (m.type == MultiportGroup::Type::Gyrator) {
            // dQ_G - Y dPhi_G = 0
            for (Eigen::Index i = 0; i < m.matrix.rows(); ++i, ++r) {
                int pi = g.branch_index(m.ports[static_cast<size_t>(i)]);
                cs.F(r, g.charge_coord(pi)) = 1;
                for (Eigen::Index j = 0; j < m.matrix.cols(); ++j) {
                    int pj = g.branch_index(m.ports[static_cast<size_t>(j)]);
                    cs.F(r, g.flux_coord(pj)) -= m.matrix(i, j);
                }
                cs.row_kinds.push_back(ConstraintRowKind::Gyrator);
                cs.row_labels.push_back("gyr(" + m.ports[static_cast<size_t>(i)] + ")");
            }
        } else {
            const int nl = m.left_count(), nr = m.right_count();
            // dQ_L + T^T dQ_R = 0  (one row per left port)
            for (int i = 0; i < nl; ++i, ++r) {
                int pi = g.branch_index(m.ports[static_cast<size_t>(i)]);
                cs.F(r, g.charge_coord(pi)) = 1;
                for (int j = 0; j < nr; ++j) {
                    int pj = g.branch_index(m.ports[static_cast<size_t>(nl + j)]);
                    cs.F(r, g.charge_coord(pj)) += m.matrix(j, i);
                }
                cs.row_kinds.push_back(ConstraintRowKind::Transformer);
                cs.row_labels.push_back("xfoq(" + m.ports[static_cast<size_t>(i)] + ")");
            }
            // dPhi_R - T dPhi_L = 0  (one row per right port)
            for (int j = 0; j < nr; ++j, ++r) {
                int pj = g.branch_index(m.ports[static_cast<size_t>(nl + j)]);
                cs.F(r, g.flux_coord(pj)) = 1;
                for (int i = 0; i < nl; ++i) {
                    int pi = g.branch_index(m.ports[static_cast<size_t>(i)]);
                    cs.F(r, g.flux_coord(pi)) -= m.matrix(j, i);
                }
                cs.row_kinds.push_back(ConstraintRowKind::Transformer);
                cs.row_labels.push_back("xfof(" + m.ports[static_cast<size_t>(nl + j)] + ")");
            }
        }
    }

    Kernel k = kernel(cs.F);
    cs.K = std::move(k.basis);
    align_period_lattice(g, cs, k.free_cols);
    return cs;
}

namespace {

struct SplitCount {
    int count = 0;
    RMat d, e;
    std::vector<std::string> labels;
};

// Freeze the extended columns of `rows` and count independent compact
// directions: dim ker of the compact sub-block. `tags` gives one tag per
// column; `treat_unset_as_compact` resolves Unset columns for this attempt.
SplitCount pfaff_count(const RMat& rows, const std::vector<VarTopology>& tags,
                       const std::vector<std::string>& col_names,
                       bool treat_unset_as_compact) {
    std::vector<int> compact_cols, extended_cols;
    for (size_t c = 0; c < tags.size(); ++c) {
        bool compact = tags[c] == VarTopology::Compact ||
                       (tags[c] == VarTopology::Unset && treat_unset_as_compact);
        (compact ? compact_cols : extended_cols).push_back(static_cast<int>(c));
    }
    SplitCount out;
    out.d = RMat::Zero(rows.rows(), static_cast<Eigen::Index>(compact_cols.size()));
    out.e = RMat::Zero(rows.rows(), static_cast<Eigen::Index>(extended_cols.size()));
    for (size_t j = 0; j < compact_cols.size(); ++j)
        out.d.col(static_cast<Eigen::Index>(j)) = rows.col(compact_cols[j]);
    for (size_t j = 0; j < extended_cols.size(); ++j)
        out.e.col(static_cast<Eigen::Index>(j)) = rows.col(extended_cols[j]);
    Kernel kd = kernel(out.d);
    out.count = static_cast<int>(kd.basis.cols());
    for (Eigen::Index v = 0; v < kd.basis.cols(); ++v) {
        std::string s;
        for (Eigen::Index i = 0; i < kd.basis.rows(); ++i) {
            const Rational& x = kd.basis(i, v);
            if (x == 0) continue;
            std::string coeff = to_string(abs(x));
            std::string term =
                (coeff == "1" ? "" : coeff + "*") +
                col_names[static_cast<size_t>(compact_cols[static_cast<size_t>(i)])];
            if (s.empty())
                s = (x < 0 ? "-" : "") + term;
            else
                s += (x < 0 ? " - " : " + ") + term;
        }
        out.labels.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TopologyClassification classify_topology(const ConstraintSystem& cs,
                                         const CircuitGraph& g) {
    const int B = g.n_branches();
    std::vector<VarTopology> flux_tags, charge_tags;
    std::vector<std::string> flux_names, charge_names;
    bool any_unset = false;
    for (int b = 0; b < B; ++b) {
        const Branch& br = g.branches[static_cast<size_t>(b)];
        flux_tags.push_back(br.flux);
        charge_tags.push_back(br.charge);
        any_unset |= br.flux == VarTopology::Unset ||
                     br.charge == VarTopology::Unset;
        flux_names.push_back(coord_name(g, g.flux_coord(b)));
        charge_names.push_back(coord_name(g, g.charge_coord(b)));
    }

    auto resolve = [&](const RMat& rows, const std::vector<VarTopology>& tags,
                       const std::vector<std::string>& names, const char* what) {
        SplitCount as_ext = pfaff_count(rows, tags, names, false);
        if (any_unset) {
            SplitCount as_cpt = pfaff_count(rows, tags, names, true);
            if (as_cpt.count != as_ext.count)
                throw TopologyUndetermined(
                    std::string("compactness undetermined: multiport ") + what +
                    " tags are load-bearing (count " +
                    std::to_string(as_ext.count) + " vs " +
                    std::to_string(as_cpt.count) + ")");
        }
        return as_ext;
    };

    SplitCount fl = resolve(cs.loop_rows, flux_tags, flux_names, "flux");
    SplitCount ch = resolve(cs.cutset_rows, charge_tags, charge_names, "charge");

    TopologyClassification tc;
    tc.compact_flux_count = fl.count;
    tc.compact_charge_count = ch.count;
    tc.compact_flux_labels = std::move(fl.labels);
    tc.compact_charge_labels = std::move(ch.labels);
    tc.d_loop = std::move(fl.d);
    tc.e_loop = std::move(fl.e);
    tc.d_cut = std::move(ch.d);
    tc.e_cut = std::move(ch.e);
    return tc;
}

}  // namespace netham
