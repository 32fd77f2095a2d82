// psdocalc command line front end.

#include "psdocalc/bmo.hpp"
#include "psdocalc/calculus.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/experiment.hpp"
#include "psdocalc/psido.hpp"
#include "psdocalc/sobolev.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace psdocalc;

namespace {

// Exit codes
constexpr int kOk = 0, kFailure = 1, kConfig = 2, kArtifact = 3, kTolerance = 4;

struct SpaceOpts {
    std::string kind = "cycle";
    int size = 64;
    int size2 = 0;
    std::string measure = "counting";
    std::string op = "graph_laplacian";
    std::string coefficient = "1";

    void add(CLI::App* app) {
        app->add_option("--kind", kind, "cycle, grid_torus, path, binary_tree, sierpinski")->capture_default_str();
        app->add_option("--size", size, "N, width, levels or refinement level")->capture_default_str();
        app->add_option("--size2", size2, "torus height (0: same as width)");
        app->add_option("--measure", measure, "counting or degree")->capture_default_str();
        app->add_option("--operator", op, "graph_laplacian, divergence_form, sub_laplacian")->capture_default_str();
        app->add_option("--coefficient", coefficient, "divergence_form edge coefficient in x0, x1, ...");
    }

    SpaceSpec spec() const { return {parse_space_kind(kind), size, size2, parse_measure_choice(measure)}; }
    Setup setup() const { return make_setup(spec(), op, coefficient); }
};

struct SymbolOpts {
    std::string builtin;
    std::string file;
    std::string expr;
    double s = 0, rho = 1, delta = 0;

    void add(CLI::App* app) {
        app->add_option("--symbol", builtin, "builtin symbol id");
        app->add_option("--symbol-file", file, "symbol file ('# s= rho= delta=' headers, then the expression)");
        app->add_option("--expr", expr, "symbol expression in xi, x0, x1, ...");
        app->add_option("--class-s", s, "class order s (with --expr)");
        app->add_option("--rho", rho, "rho (with --expr)");
        app->add_option("--delta", delta, "delta (with --expr or builtins)");
    }

    SymbolSpec spec() const {
        if (int(!builtin.empty()) + int(!file.empty()) + int(!expr.empty()) > 1)
            throw InvalidArgument("give only one of --symbol, --symbol-file, --expr");
        if (!file.empty())
            return read_symbol_file(file);
        SymbolSpec out;
        out.params = {s, rho, delta, 2.0};
        if (!expr.empty())
            out.expression = expr;
        else
            out.builtin = builtin.empty() ? "one" : builtin;
        return out;
    }
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InvalidArgument("bad number '" + tok + "' in list '" + s + "'");
        }
    if (out.empty())
        throw InvalidArgument("empty list");
    return out;
}

Vec read_vector(const std::string& path, PointId n, std::uint64_t seed) {
    if (path.empty()) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1, 1);
        Vec v(n);
        for (auto& x : v)
            x = u(rng);
        return v;
    }
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open vector file " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#')
            continue;
        try {
            vals.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw InvalidArgument("bad value '" + line + "' in " + path);
        }
    }
    if (PointId(vals.size()) != n)
        throw InvalidArgument(path + " has " + std::to_string(vals.size()) + " values, the space has " +
                              std::to_string(n) + " points");
    return Eigen::Map<Vec>(vals.data(), n);
}

// Writes to --out when given, stdout otherwise.
struct Output {
    std::string path;

    void add(CLI::App* app) { app->add_option("--out", path, "output file (default stdout)"); }

    template <class F>
    void emit(F&& body) const {
        if (path.empty()) {
            body(std::cout);
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ArtifactError("cannot write " + path);
        body(out);
    }
};

std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void print_vector(std::ostream& os, const CVec& v, bool real) {
    os << (real ? "value\n" : "re,im\n");
    for (auto z : v)
        os << (real ? g(z.real()) : g(z.real()) + "," + g(z.imag())) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral pseudodifferential calculus on finite metric measure spaces"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    SpaceOpts sp;
    SymbolOpts so;
    Output out;
    std::uint64_t seed = 0;
    int status = kOk;
    std::function<void()> action;

    auto sub = [&](CLI::App* parent, const char* name, const char* help, bool with_symbol = false) {
        CLI::App* c = parent->add_subcommand(name, help);
        sp.add(c);
        out.add(c);
        c->add_option("--seed", seed, "random seed");
        if (with_symbol)
            so.add(c);
        return c;
    };

    // space
    CLI::App* space = app.add_subcommand("space", "build and inspect spaces")->require_subcommand(1);
    sub(space, "build", "dump the space as JSON")->callback([&] {
        action = [&] { out.emit([&](std::ostream& os) { os << space_to_json(build_space(sp.spec())).dump(2) << "\n"; }); };
    });
    std::string volume_csv;
    auto* stats = sub(space, "stats", "doubling profile and ball volume statistics");
    stats->add_option("--volume-csv", volume_csv, "write r,min,median,max volume statistics here");
    stats->callback([&] {
        action = [&] {
            const MetricMeasureSpace s = build_space(sp.spec());
            const DoublingProfile p = doubling_profile(s);
            out.emit([&](std::ostream& os) {
                os << "points,diameter,A2,n,D,fit_residual\n"
                   << s.size() << "," << s.diameter() << "," << g(p.A2) << "," << g(p.n) << "," << g(p.D) << ","
                   << g(p.fit_residual) << "\n";
            });
            if (!volume_csv.empty()) {
                std::ofstream v(volume_csv, std::ios::binary);
                write_volume_stats_csv(s, v);
            }
        };
    });

    // op
    CLI::App* op = app.add_subcommand("op", "operators and their spectra")->require_subcommand(1);
    sub(op, "eig", "eigenvalues as CSV")->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            out.emit([&](std::ostream& os) {
                os << "k,lambda\n";
                for (PointId k = 0; k < s.sd.size(); ++k)
                    os << k << "," << g(s.sd.eigenvalues[k]) << "\n";
            });
        };
    });
    std::string t_list = "1,4,16";
    double p = 2, nu = 3;
    auto* heat = sub(op, "heat-decay", "off-diagonal decay of the heat semigroup");
    heat->add_option("--t", t_list, "comma separated times")->capture_default_str();
    heat->add_option("--p", p, "exponent p = q")->capture_default_str();
    heat->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            HeatDecayOptions opt;
            opt.p = opt.q = p;
            opt.seed = seed;
            const DecayReport r = heat_decay(s.sd, s.space, parse_list(t_list), s.op.order_m, opt);
            out.emit([&](std::ostream& os) { write_decay_csv(r, os); });
            std::cerr << "gaussian rate c = " << r.c << ", R2 = " << r.r2 << ", C = " << r.C << "\n";
        };
    });

    // calc
    CLI::App* calc = app.add_subcommand("calc", "partition of unity and multipliers")->require_subcommand(1);
    int q = 16;
    auto* part = sub(calc, "partition", "tabulate eta, psi and the partition sums");
    part->add_option("--q", q, "points per octave")->capture_default_str();
    part->callback([&] {
        action = [&] {
            const PartitionOfUnity pu(8, q);
            const ScaleGrid grid = pu.grid(std::ldexp(1.0, -8));
            out.emit([&](std::ostream& os) {
                os << "xi,eta,psi,dyadic_sum,continuous_sum\n";
                for (double xi : geometric_grid(std::ldexp(1.0, -7), std::ldexp(1.0, 7), 8))
                    os << g(xi) << "," << g(pu.eta(xi)) << "," << g(pu.psi(xi)) << "," << g(pu.dyadic_sum(xi)) << ","
                       << g(pu.continuous_sum(xi, grid)) << "\n";
            });
        };
    });
    std::string r_list = "2,4,8";
    double N = 2;
    auto* mult = sub(calc, "multiplier-decay", "off-diagonal decay of (r^m L)^N e^{-r^m L}");
    mult->add_option("--r", r_list, "comma separated radii")->capture_default_str();
    mult->add_option("--N", N, "vanishing order at 0")->capture_default_str();
    mult->add_option("--nu", nu, "decay order")->capture_default_str();
    mult->add_option("--p", p, "exponent")->capture_default_str();
    mult->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const double m = s.op.order_m;
            auto family = [&](double r) {
                MultiplierSpec spec;
                spec.r = r;
                spec.N = N;
                spec.m = m;
                spec.nu = nu;
                const double rm = std::pow(r, m);
                spec.F = [rm, n = N](double xi) { return std::pow(rm * xi, n) * std::exp(-rm * xi); };
                return spec;
            };
            MultiplierCheckOptions opt;
            opt.p = p;
            opt.seed = seed;
            const DecayReport r =
                multiplier_offdiag_check(s.sd, s.space, family, parse_list(r_list), nu, doubling_profile(s.space).n, opt);
            out.emit([&](std::ostream& os) { write_decay_csv(r, os); });
            std::cerr << "fitted order " << r.exponent << ", C = " << r.C << "\n";
        };
    });

    // sym
    CLI::App* sym = app.add_subcommand("sym", "symbols")->require_subcommand(1);
    std::string text;
    auto* parse = sym->add_subcommand("parse", "parse an expression and print its canonical form");
    parse->add_option("expression", text, "expression")->required();
    parse->callback([&] {
        action = [&] {
            const SymbolExpr e = SymbolExpr::parse(text);
            std::cout << e.to_string() << "\n"
                      << "depth " << e.depth() << ", max feature " << e.max_feature() << ", uses xi "
                      << (e.uses_xi() ? "yes" : "no") << "\n";
        };
    });
    double alpha_max = 1;
    int beta_max = 2;
    auto* semi = sub(sym, "seminorm", "seminorm table K(alpha, beta)", true);
    semi->add_option("--alpha-max", alpha_max)->capture_default_str();
    semi->add_option("--beta-max", beta_max)->capture_default_str();
    semi->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            SeminormOptions opt;
            opt.alpha_max = alpha_max;
            opt.beta_max = beta_max;
            const SeminormTable t = seminorm(make_symbol(so.spec(), s.space, s.sd), &s.sd, opt);
            out.emit([&](std::ostream& os) {
                os << "alpha,beta,K\n";
                for (std::size_t a = 0; a < t.alphas.size(); ++a)
                    for (std::size_t b = 0; b < t.betas.size(); ++b)
                        os << t.alphas[a] << "," << t.betas[b] << "," << g(t.K(Eigen::Index(a), Eigen::Index(b)))
                           << "\n";
            });
        };
    });
    int l_max = 32;
    int dq = 32;
    auto* dec = sub(sym, "decompose", "elementary symbol decomposition", true);
    dec->add_option("--l-max", l_max)->capture_default_str();
    dec->add_option("--q", dq, "scale grid points per octave")->capture_default_str();
    dec->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const PartitionOfUnity pu(8, dq);
            const ElementaryDecomposition d = decompose(make_symbol(so.spec(), s.space, s.sd), s.space.size(), pu,
                                                        pu.grid(std::ldexp(1.0, -7)), l_max, 4 * (l_max + 1));
            out.emit([&](std::ostream& os) { write_decomposition_csv(d, os); });
            std::cerr << "residual " << reconstruct_residual(d, probe_grid(1e-2, d.band_hi(), 16)) << ", decay slope "
                      << -d.decay_M << " (R2 " << d.decay_r2 << ")\n";
        };
    });

    // psdo
    CLI::App* psdo = app.add_subcommand("psdo", "pseudodifferential operators")->require_subcommand(1);
    std::string f_file, g_file;
    auto* papply = sub(psdo, "apply", "apply T_sigma to a vector", true);
    papply->add_option("--f", f_file, "vector file, one value per line (default: random)");
    papply->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const Symbol sigma = make_symbol(so.spec(), s.space, s.sd);
            const CVec v = apply(sigma, s.sd, read_vector(f_file, s.space.size(), seed));
            out.emit([&](std::ostream& os) { print_vector(os, v, sigma.is_real()); });
        };
    });
    auto* pnorm = sub(psdo, "norm", "operator norm on L^p", true);
    pnorm->add_option("--p", p)->capture_default_str();
    pnorm->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const BlockNorm n = opnorm(make_symbol(so.spec(), s.space, s.sd), s.sd, p, seed);
            out.emit([&](std::ostream& os) {
                os << "p,norm,lower_bound\n" << g(p) << "," << g(n.value) << "," << (n.lower_bound ? 1 : 0) << "\n";
            });
        };
    });
    std::string ot_list = "0.25,1,4";
    int order = 4;
    bool bare = false;
    auto* poff = sub(psdo, "offdiag", "off-diagonal decay of T_sigma psi_t(L)", true);
    poff->add_option("--nu", nu)->capture_default_str();
    poff->add_option("--p", p)->capture_default_str();
    poff->add_option("--t", ot_list, "comma separated scales")->capture_default_str();
    poff->add_option("--order", order, "psi_t(xi) = (t xi)^order e^{-t xi}")->capture_default_str();
    poff->add_flag("--bare", bare, "bare T_sigma at scale 1");
    poff->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const PsdoKernel k = kernel_matrix(make_symbol(so.spec(), s.space, s.sd), s.sd);
            PsdoOffdiagOptions opt;
            opt.seed = seed;
            opt.n_growth = doubling_profile(s.space).n;
            std::vector<DecayReport> reps;
            if (bare)
                reps.push_back(psdo_offdiag_bare(k, s.sd, s.space, nu, p, opt));
            else
                for (double t : parse_list(ot_list))
                    reps.push_back(psdo_offdiag(k, s.sd, s.space, PsiTildeFamily{order}, t, nu, p, s.op.order_m, opt));
            out.emit([&](std::ostream& os) {
                for (std::size_t i = 0; i < reps.size(); ++i) {
                    std::ostringstream ss;
                    write_decay_csv(reps[i], ss);
                    const std::string body = ss.str();
                    os << (i == 0 ? body : body.substr(body.find('\n') + 1));
                }
            });
            for (const auto& r : reps)
                std::cerr << "fitted order " << r.exponent << ", max ratio " << r.max_ratio << "\n";
        };
    });
    auto* pdef = sub(psdo, "adjoint-defect", "norm of [sigma(x,L)]^* - conj(sigma)(x,L)", true);
    pdef->add_option("--p", p)->capture_default_str();
    pdef->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const BlockNorm n = adjoint_defect(make_symbol(so.spec(), s.space, s.sd), s.sd, p, seed);
            out.emit([&](std::ostream& os) {
                os << "p,defect,lower_bound\n" << g(p) << "," << g(n.value) << "," << (n.lower_bound ? 1 : 0) << "\n";
            });
        };
    });

    // bmo
    CLI::App* bmo = app.add_subcommand("bmo", "BMO_L, T(1) and paraproducts")->require_subcommand(1);
    int M = 0;
    auto order_M = [&](const MetricMeasureSpace& s) { return M > 0 ? M : default_bmo_M(doubling_profile(s).n); };
    auto* bnorm = sub(bmo, "norm", "BMO_L norm of a vector");
    bnorm->add_option("--M", M, "order (default ceil(n/4) + 1)");
    bnorm->add_option("--f", f_file, "vector file (default: random)");
    bnorm->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const BMOData d = bmo_norm(s.sd, s.space, read_vector(f_file, s.space.size(), seed), order_M(s.space),
                                       default_bmo_radii(s.space));
            out.emit([&](std::ostream& os) {
                os << "M,norm,center,radius\n"
                   << d.M << "," << g(d.norm) << "," << d.argmax_center << "," << g(d.argmax_radius) << "\n";
            });
        };
    });
    auto* bt1 = sub(bmo, "t1", "T(1) record for a symbol", true);
    bt1->add_option("--M", M, "order (default ceil(n/4) + 1)");
    bt1->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const SymbolSpec spec = so.spec();
            const T1Result r = t1_test(make_symbol(spec, s.space, s.sd), s.op, s.sd, s.space, order_M(s.space));
            out.emit([&](std::ostream& os) {
                write_correlation_csv({{symbol_label(spec), r.l2_norm, r.bmo_t1, r.seminorms.sum()}}, os);
            });
        };
    });
    auto* bpara = sub(bmo, "para", "paraproduct Pi_g f");
    bpara->add_option("--M", M, "order (default ceil(n/4) + 1)");
    bpara->add_option("--g", g_file, "vector file for g (default: random)");
    bpara->add_option("--f", f_file, "vector file for f (default: random)");
    bpara->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const Vec gv = read_vector(g_file, s.space.size(), seed);
            const Vec fv = read_vector(f_file, s.space.size(), seed + 1);
            const Vec v = paraproduct(s.sd, gv, fv, order_M(s.space), default_paraproduct_grid(s.sd));
            out.emit([&](std::ostream& os) { print_vector(os, v.cast<cdouble>(), true); });
        };
    });

    // sob
    CLI::App* sob = app.add_subcommand("sob", "Sobolev norms, mapping tests and assumption checks")->require_subcommand(1);
    double s_order = 1, shift = 0;
    auto* snorm = sub(sob, "norm", "||(1+L)^{s/m} f||_p");
    snorm->add_option("--s", s_order)->capture_default_str();
    snorm->add_option("--p", p)->capture_default_str();
    snorm->add_option("--f", f_file, "vector file (default: random)");
    snorm->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const double v = sobolev_norm(s.sd, read_vector(f_file, s.space.size(), seed),
                                          SobolevParams{s_order, p, OperatorTag::L, s.op.order_m});
            out.emit([&](std::ostream& os) { os << "s,p,norm\n" << g(s_order) << "," << g(p) << "," << g(v) << "\n"; });
        };
    });
    auto* smap = sub(sob, "map", "norm of (1+Delta)^{s/2} T_sigma (1+L)^{-(s+shift)/m}, Delta = L", true);
    smap->add_option("--s", s_order)->capture_default_str();
    smap->add_option("--shift", shift)->capture_default_str();
    smap->add_option("--p", p)->capture_default_str();
    smap->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            const BlockNorm n =
                mapping_test(make_symbol(so.spec(), s.space, s.sd), s.sd, s.sd, s_order, shift, p, s.op.order_m, seed);
            out.emit([&](std::ostream& os) {
                os << "s,shift,p,norm,lower_bound\n"
                   << g(s_order) << "," << g(shift) << "," << g(p) << "," << g(n.value) << "," << (n.lower_bound ? 1 : 0)
                   << "\n";
            });
        };
    });
    std::string mode = "sobolev";
    CheckOptions copt;
    std::string witness_csv;
    auto* scheck = sub(sob, "check", "Sobolev embedding and Poincare checks");
    scheck->add_option("--mode", mode, "sobolev, generalized_poincare, p2_poincare")->capture_default_str();
    scheck->add_option("--M0", copt.M0)->capture_default_str();
    scheck->add_option("--kappa", copt.kappa)->capture_default_str();
    scheck->add_option("--draws", copt.draws)->capture_default_str();
    scheck->add_option("--witness-csv", witness_csv, "write ball_center,radius,lhs,rhs,ratio here");
    scheck->callback([&] {
        action = [&] {
            const Setup s = sp.setup();
            copt.seed = seed;
            const auto res = embedding_poincare_check(s.sd, s.space, parse_check_mode(mode), copt);
            out.emit([&](std::ostream& os) {
                os << "mode,M,kappa,C\n";
                for (const auto& e : res)
                    os << to_string(e.mode) << "," << e.M << "," << g(e.kappa) << "," << g(e.C) << "\n";
            });
            if (!witness_csv.empty()) {
                std::vector<Witness> w;
                for (const auto& e : res)
                    w.push_back(e.witness);
                std::ofstream f(witness_csv, std::ios::binary);
                write_witness_csv(w, f);
            }
        };
    });

    // run / report
    std::string config_file, out_dir;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_file, "JSON config")->required();
    run->add_option("--out", out_dir, "artifact directory (default: config output)");
    run->callback([&] {
        action = [&] {
            const ExperimentConfig c = load_config(config_file);
            const RunResult r = run_experiment(c, out_dir);
            for (const auto& ck : r.checks)
                std::cout << (ck.pass ? "ok   " : "FAIL ") << ck.name << " = " << ck.value
                          << (ck.relation == "info" ? "" : " (" + ck.relation + " " + fmt_g(ck.bound) + ")")
                          << "\n";
            std::cout << "artifacts in " << r.dir.string() << "\n";
            if (!r.passed())
                status = kTolerance;
        };
    });
    std::string report_dir;
    auto* rep = app.add_subcommand("report", "summarize an artifact directory");
    rep->add_option("dir", report_dir, "artifact directory")->required();
    rep->callback([&] {
        action = [&] {
            const ReportResult r = report(report_dir);
            std::ifstream in(std::filesystem::path(report_dir) / "summary.txt");
            std::cout << in.rdbuf();
            if (!r.passed)
                status = kTolerance;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }
    try {
        if (action)
            action();
    } catch (const ArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kArtifact;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return status;
}
