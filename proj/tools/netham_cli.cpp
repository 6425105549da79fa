// netham — command-line front end: reduce netlists to canonical Hamiltonians,
// classify solution-manifold topology, sweep transmission-line spectra and
// couplings, discretize dissipative environments, and run the verification
// suite. Reports are JSON, tables are CSV; files are written atomically
// (temporary file + rename) and every report records the seed.
//
// Exit codes: 0 ok, 1 verification failure, 2 input/usage error,
// 3 nonhomogeneous-constraint flag, 4 numerical non-convergence.

#include "netham/acceptance.hpp"
#include "netham/bath.hpp"
#include "netham/reduce.hpp"
#include "netham/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::json;
using namespace netham;

namespace {

struct CommonOpts {
    std::string input;
    std::string outdir = ".";
    double omega_min = 0, omega_max = 0;
    int omega_points = 0;
    double tol = 0;  // 0 = per-module default
    unsigned seed = 1;
    int threads = 1;
    std::string format = "json";
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Atomic write: the file appears complete or not at all.
void write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.good())
            throw std::invalid_argument("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string out_path(const CommonOpts& o, const std::string& what,
                     const std::string& ext) {
    std::filesystem::create_directories(o.outdir);
    return (std::filesystem::path(o.outdir) /
            (stem_of(o.input) + "." + what + "." + ext))
        .string();
}

Eigen::MatrixXd to_matrix(const json& j) {
    Eigen::MatrixXd m(j.size(), j.empty() ? 0 : j.at(0).size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            m(i, k) = j.at(static_cast<size_t>(i))
                          .at(static_cast<size_t>(k))
                          .get<double>();
    return m;
}

Eigen::VectorXd to_vector(const json& j) {
    Eigen::VectorXd v(j.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = j.at(static_cast<size_t>(i)).get<double>();
    return v;
}

json from_matrix(const Eigen::MatrixXd& m) {
    json j = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        j.push_back(row);
    }
    return j;
}

BoundarySpec boundary_from(const json& j) {
    BoundarySpec s;
    s.A = to_matrix(j.at("A"));
    s.Binv = to_matrix(j.at("Binv"));
    s.G = j.contains("G") ? to_matrix(j.at("G"))
                          : Eigen::MatrixXd::Zero(s.A.rows(), s.A.cols());
    s.Delta = to_vector(j.at("Delta"));
    return s;
}

// ------------------------------------------------------------------ reduce

int cmd_reduce(const CommonOpts& o) {
    auto g = parse_netlist(slurp(o.input));
    auto r = reduce_circuit(g);
    json rep = json::parse(reduction_report(r));
    rep["hamiltonian"] = json::parse(hamiltonian_descriptor(r.hamiltonian));
    rep["seed"] = o.seed;
    std::string text = rep.dump(2) + "\n";
    write_file(out_path(o, "reduce", "json"), text);
    std::cout << text;
    return 0;
}

// ---------------------------------------------------------------- topology

int cmd_topology(const CommonOpts& o) {
    auto g = parse_netlist(slurp(o.input));
    auto cs = build_constraints(g, spanning_tree(g));
    auto tc = classify_topology(cs, g);
    json rep;
    rep["compact_flux_count"] = tc.compact_flux_count;
    rep["compact_charge_count"] = tc.compact_charge_count;
    rep["compact_flux_labels"] = tc.compact_flux_labels;
    rep["compact_charge_labels"] = tc.compact_charge_labels;
    rep["seed"] = o.seed;
    std::string text = rep.dump(2) + "\n";
    write_file(out_path(o, "topology", "json"), text);
    std::cout << text;
    return 0;
}

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const CommonOpts& o) {
    json cfg = json::parse(slurp(o.input));
    std::string kind = cfg.at("kind").get<std::string>();
    json rep;
    rep["seed"] = o.seed;

    if (kind == "single_line") {
        double a0 = cfg.at("a0").get<double>();
        double b0 = cfg.at("b0").get<double>();
        double Delta = cfg.at("Delta").get<double>();
        double a0J = cfg.at("a0J").get<double>();
        double b0J = cfg.at("b0J").get<double>();
        double cut = std::max(std::sqrt(Delta) / a0,
                              1.0 / (b0 * std::sqrt(Delta)));
        double lo = o.omega_min > 0 ? o.omega_min : 1e-2 * cut;
        double hi = o.omega_max > 0 ? o.omega_max : 1e3 * cut;
        int pts = o.omega_points > 0 ? o.omega_points : 400;
        CouplingSweep cs = coupling_sweep(a0, b0, Delta, a0J, b0J, lo, hi, pts);

        std::ostringstream csv;
        csv << "Omega,U0_sq,gC,gL\n";
        csv.precision(12);
        for (size_t i = 0; i < cs.Omega.size(); ++i) {
            double u0 = single_line_U0(a0, b0, Delta, cs.Omega[i]);
            csv << cs.Omega[i] << "," << u0 * u0 << "," << cs.gC[i] << ","
                << cs.gL[i] << "\n";
        }
        write_file(out_path(o, "spectrum", "csv"), csv.str());
        rep["slope_C"] = cs.slope_C;
        rep["slope_L"] = cs.slope_L;
        rep["lamb_proxy"] = cs.lamb_proxy;
        rep["cutoff"] = cut;
    } else if (kind == "finite_lines") {
        FiniteSpec fs;
        fs.b = boundary_from(cfg);
        fs.d = cfg.at("d").get<double>();
        for (const auto& fj : cfg.at("far")) {
            FarEnd fe;
            std::string k = fj.at("kind").get<std::string>();
            if (k == "open") fe.kind = FarEnd::Kind::Open;
            else if (k == "short") fe.kind = FarEnd::Kind::Short;
            else if (k == "capacitive") {
                fe.kind = FarEnd::Kind::Capacitive;
                fe.a_d = fj.at("a_d").get<double>();
            } else {
                throw std::invalid_argument("unknown far-end kind: " + k);
            }
            fs.far.push_back(fe);
        }
        double hi = o.omega_max > 0 ? o.omega_max
                                    : cfg.at("omega_max").get<double>();
        std::vector<double> modes = finite_line_spectrum(fs, hi);
        std::ostringstream csv;
        csv << "n,Omega\n";
        csv.precision(12);
        for (size_t i = 0; i < modes.size(); ++i)
            csv << i + 1 << "," << modes[i] << "\n";
        write_file(out_path(o, "spectrum", "csv"), csv.str());
        rep["mode_count"] = modes.size();
        rep["omega_max"] = hi;
    } else {
        throw std::invalid_argument("unknown spectrum kind: " + kind);
    }

    std::string text = rep.dump(2) + "\n";
    write_file(out_path(o, "spectrum", "json"), text);
    std::cout << text;
    return 0;
}

// --------------------------------------------------------------- couplings

int cmd_couplings(const CommonOpts& o) {
    json cfg = json::parse(slurp(o.input));
    BoundarySpec s = boundary_from(cfg.at("boundary"));
    s.validate(o.tol > 0 ? o.tol : 1e-12);
    const json& jj = cfg.at("junction");
    JunctionBlocks jb;
    jb.C0inv = to_matrix(jj.at("C0inv"));
    jb.C0Jinv = to_matrix(jj.at("C0Jinv"));
    jb.CJinv = to_matrix(jj.at("CJinv"));
    jb.L0inv = to_matrix(jj.at("L0inv"));
    jb.L0Jinv = to_matrix(jj.at("L0Jinv"));
    jb.LJinv = to_matrix(jj.at("LJinv"));
    jb.YJ = to_matrix(jj.at("YJ"));
    jb.Y0J = to_matrix(jj.at("Y0J"));
    jb.c = to_vector(jj.at("c"));
    double hi = o.omega_max > 0 ? o.omega_max : cfg.at("omega_max").get<double>();
    int panels = cfg.value("panels", 256);
    CouplingReport r = couplings(s, jb, hi, panels);

    json rep;
    rep["GammaQ"] = from_matrix(r.GammaQ);
    rep["GammaPhi"] = from_matrix(r.GammaPhi);
    rep["Umat"] = from_matrix(r.Umat);
    rep["CJtilde_inv"] = from_matrix(r.CJtilde_inv);
    rep["LJtilde_inv"] = from_matrix(r.LJtilde_inv);
    rep["cross"] = from_matrix(r.cross);
    rep["omega_max"] = hi;
    rep["seed"] = o.seed;
    std::string text = rep.dump(2) + "\n";
    write_file(out_path(o, "couplings", "json"), text);
    std::cout << text;
    return 0;
}

// -------------------------------------------------------------------- bath

int cmd_bath(const CommonOpts& o) {
    json cfg = json::parse(slurp(o.input));
    std::string kind = cfg.at("kind").get<std::string>();
    double dOm = cfg.at("delta_omega").get<double>();
    double hi = o.omega_max > 0 ? o.omega_max : cfg.at("omega_max").get<double>();
    double glo = cfg.value("grid_min", 0.1);
    double ghi = cfg.value("grid_max", 10.0);
    int gpts = o.omega_points > 0 ? o.omega_points : cfg.value("grid_points", 60);

    json rep;
    rep["seed"] = o.seed;
    std::ostringstream csv;
    csv.precision(12);

    if (kind == "oneport") {
        std::string target = cfg.at("target").get<std::string>();
        ImmittanceTarget t;
        if (target == "resistor")
            t = resistor_oneport(cfg.at("R").get<double>());
        else if (target == "series_rl")
            t = series_rl_oneport(cfg.at("R").get<double>(),
                                  cfg.at("L").get<double>());
        else if (target == "shunted_rlc")
            t = shunted_rlc_impedance(cfg.at("R").get<double>(),
                                      cfg.at("L").get<double>(),
                                      cfg.at("C").get<double>());
        else
            throw std::invalid_argument("unknown one-port target: " + target);
        t.validate(o.tol > 0 ? o.tol : 1e-9);
        OnePortBath b = discretize_oneport(t, dOm, hi);
        rep["bins"] = b.size();
        rep["Omega"] = b.Omega;
        rep["y"] = b.y;
        rep["L"] = b.L;
        rep["C"] = b.C;
        csv << "omega,target_re,target_im,recon_re,recon_im\n";
        for (int i = 0; i < gpts; ++i) {
            double w = glo * std::pow(ghi / glo,
                                      gpts > 1 ? i / (gpts - 1.0) : 0.0);
            auto tv = t.eval(w)(0, 0);
            csv << w << "," << tv.real() << "," << tv.imag() << ","
                << reconstruct_oneport_re(b, w) << ","
                << reconstruct_oneport_im(b, w) << "\n";
        }
    } else if (kind == "nr_twoport") {
        double C = cfg.at("C").get<double>();
        double Y0 = cfg.at("Y0").get<double>();
        double G = cfg.at("G").get<double>();
        nr_twoport_impedance(C, Y0, G).validate(o.tol > 0 ? o.tol : 1e-9);
        NrTwoPortBath b = discretize_nr_twoport(C, Y0, G, dOm, hi);
        rep["bins"] = b.size();
        rep["Omega"] = b.Omega;
        rep["a"] = b.a;
        rep["b"] = b.b;
        rep["R"] = b.R;
        rep["C"] = b.C;
        csv << "omega,t_re11,t_im11,t_re12,t_im12,"
               "r_re11,r_im11,r_re12,r_im12\n";
        for (int i = 0; i < gpts; ++i) {
            double w = glo * std::pow(ghi / glo,
                                      gpts > 1 ? i / (gpts - 1.0) : 0.0);
            Eigen::Matrix2cd tv = nr_target(C, Y0, G, w);
            Eigen::Matrix2cd rv = reconstruct_nr(b, w);
            csv << w << "," << tv(0, 0).real() << "," << tv(0, 0).imag()
                << "," << tv(0, 1).real() << "," << tv(0, 1).imag() << ","
                << rv(0, 0).real() << "," << rv(0, 0).imag() << ","
                << rv(0, 1).real() << "," << rv(0, 1).imag() << "\n";
        }
    } else {
        throw std::invalid_argument("unknown bath kind: " + kind);
    }

    write_file(out_path(o, "bath", "csv"), csv.str());
    std::string text = rep.dump(2) + "\n";
    write_file(out_path(o, "bath", "json"), text);
    std::cout << "wrote " << out_path(o, "bath", "csv") << " and "
              << out_path(o, "bath", "json") << "\n";
    return 0;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const std::string& suite, const CommonOpts& o,
               const std::string& fixtures) {
    AcceptanceOptions opt;
    opt.seed = o.seed;
    opt.omega_max = o.omega_max;
    opt.fixture_dir = fixtures;
    auto results = run_acceptance(suite, opt);
    std::cout << format_results(results);
    bool ok = true;
    for (const auto& r : results) ok &= r.pass;
    std::cout << (ok ? "all checks passed" : "FAILURES present")
              << " (suite " << suite << ", seed " << o.seed << ")\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "netham — exact canonical reduction of superconducting-circuit "
        "netlists, transmission-line boundary spectra, and lumped "
        "environment synthesis"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string suite = "all";
    std::string fixtures = NETHAM_FIXTURE_DIR;

    auto add_common = [&](CLI::App* c, bool needs_input) {
        if (needs_input)
            c->add_option("input", o.input, "input file")->required();
        c->add_option("-o,--outdir", o.outdir,
                      "output directory (default: current)");
        c->add_option("--omega-min", o.omega_min,
                      "sweep lower frequency (default: config/derived)");
        c->add_option("--omega-max", o.omega_max,
                      "sweep/cutoff upper frequency (default: config/derived)");
        c->add_option("--omega-points", o.omega_points,
                      "number of grid points (default: config/derived)");
        c->add_option("--tol", o.tol,
                      "input validation tolerance (default: per module)");
        c->add_option("--seed", o.seed,
                      "seed of randomized checks, recorded in reports "
                      "(default 1)");
        c->add_option("--threads", o.threads, "thread budget (default 1)");
        c->add_option("--format", o.format, "report format: json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* c_reduce = app.add_subcommand(
        "reduce", "netlist -> canonical Hamiltonian report");
    add_common(c_reduce, true);
    auto* c_topo = app.add_subcommand(
        "topology", "netlist -> compact/extended direction report");
    add_common(c_topo, true);
    auto* c_spec = app.add_subcommand(
        "spectrum", "line config -> coupling sweep or discrete mode table");
    add_common(c_spec, true);
    auto* c_coup = app.add_subcommand(
        "couplings", "boundary + junction config -> dressed coupling report");
    add_common(c_coup, true);
    auto* c_bath = app.add_subcommand(
        "bath", "immittance config -> discretized bath + reconstruction");
    add_common(c_bath, true);
    auto* c_verify =
        app.add_subcommand("verify", "run the verification suite");
    c_verify->add_option("suite", suite,
                         "suite name (default all): one of all, reduction, "
                         "topology, sum-rules, couplings, duality, "
                         "circulator, bath, properties");
    c_verify->add_option("--fixtures", fixtures, "fixture directory");
    add_common(c_verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        Eigen::setNbThreads(o.threads);
        if (c_reduce->parsed()) return cmd_reduce(o);
        if (c_topo->parsed()) return cmd_topology(o);
        if (c_spec->parsed()) return cmd_spectrum(o);
        if (c_coup->parsed()) return cmd_couplings(o);
        if (c_bath->parsed()) return cmd_bath(o);
        if (c_verify->parsed()) return cmd_verify(suite, o, fixtures);
    } catch (const NonhomogeneousConstraint& e) {
        std::cerr << "nonhomogeneous constraint: " << e.what() << "\n";
        return 3;
    } catch (const NetlistError& e) {
        std::cerr << "netlist error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
