// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "psdocalc/bmo.hpp"
#include "psdocalc/calculus.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/psido.hpp"
#include "psdocalc/sobolev.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace psdocalc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Env {
    MetricMeasureSpace space;
    SelfAdjointOperator op;
    SpectralData sd;
};

Env make_env(SpaceKind kind, int size, int size2 = 0) {
    MetricMeasureSpace space = build_space({kind, size, size2, MeasureChoice::counting});
    SelfAdjointOperator op = build_graph_laplacian(space);
    SpectralData sd = eigendecompose(op);
    return {std::move(space), std::move(op), std::move(sd)};
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

Outcome spectral_oracle() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    double worst = 0;
    for (const auto& env : {make_env(SpaceKind::cycle, 64), make_env(SpaceKind::grid_torus, 8, 8)}) {
        auto F = [](double lam) { return std::exp(-lam) / (1 + lam); };
        const Mat FM = multiplier_matrix(env.sd, F);
        const Symbol sigma = builtin_symbol("s10_test", env.space, env.sd);
        const CMat K = kernel_matrix(sigma, env.sd).K;
        for (int i = 0; i < 20; ++i) {
            Vec f(env.space.size());
            for (auto& v : f)
                v = g(rng);
            const Vec a = multiplier_apply(env.sd, F, f), b = FM * f;
            worst = std::max(worst, (a - b).norm() / b.norm());
            const CVec c = apply(sigma, env.sd, f), d = K * f.cast<cdouble>();
            worst = std::max(worst, (c - d).norm() / d.norm());
        }
    }
    return {worst <= 1e-10, "max relative error " + fmt("%.2e", worst)};
}

Outcome partition_identities() {
    const PartitionOfUnity pu(8, 16);
    double dyadic = 0;
    for (double xi : geometric_grid(std::ldexp(1.0, -7), std::ldexp(1.0, 7), 64))
        dyadic = std::max(dyadic, std::abs(pu.dyadic_sum(xi) - 1));
    const ScaleGrid grid = pu.grid(std::ldexp(1.0, -7));
    std::vector<double> probes = geometric_grid(2.0, std::ldexp(1.0, 7), 64);
    probes.insert(probes.end(), {2.0, 10.0, 100.0});
    double cont = 0, low = 0;
    for (double xi : probes)
        cont = std::max(cont, std::abs(pu.continuous_sum(xi, grid) - 1));
    for (double xi : geometric_grid(1.0, 2.0, 64))
        low = std::max(low, std::abs(pu.continuous_sum(xi, grid) - 1));
    return {dyadic <= 1e-12 && cont <= 1e-8, "dyadic " + fmt("%.2e", dyadic) + ", continuous (xi >= 2) " +
                                                 fmt("%.2e", cont) + ", continuous on (1,2) " + fmt("%.2e", low)};
}

Outcome heat_offdiag() {
    const Env env = make_env(SpaceKind::cycle, 512);
    const DecayReport r = heat_decay(env.sd, env.space, {1.0, 4.0, 16.0}, 2.0);
    return {r.c > 0.1 && r.r2 > 0.95 && r.fit_rows >= 30,
            "c = " + fmt("%.3f", r.c) + ", R2 = " + fmt("%.4f", r.r2) + ", pairs = " + fmt("%.0f", double(r.fit_rows))};
}

Outcome elementary_decomposition() {
    const Env env = make_env(SpaceKind::cycle, 64);
    const Symbol sigma = builtin_symbol("decompose_test", env.space, env.sd);
    const PartitionOfUnity pu(8, 32);
    const ScaleGrid grid = pu.grid(std::ldexp(1.0, -7));
    const int l_max = 32;
    const ElementaryDecomposition d = decompose(sigma, env.space.size(), pu, grid, l_max, 4 * (l_max + 1));
    const double res = reconstruct_residual(d, probe_grid(1e-2, d.band_hi(), 16));
    return {res < 1e-3 && -d.decay_M <= -4 && d.decay_r2 > 0.9,
            "residual " + fmt("%.2e", res) + ", slope " + fmt("%.3f", -d.decay_M) + ", R2 " + fmt("%.3f", d.decay_r2)};
}

Outcome uniform_boundedness() {
    std::vector<double> s10, s1d;
    for (int n : {64, 128, 256}) {
        const Env env = make_env(SpaceKind::cycle, n);
        s10.push_back(opnorm(builtin_symbol("s10_test", env.space, env.sd), env.sd, 2).value);
        s1d.push_back(opnorm(builtin_symbol("s1delta", env.space, env.sd, {0, 1, 0.5, 2}), env.sd, 2).value);
    }
    const double a = spread(s10), b = spread(s1d);
    return {a <= 1.5 && b <= 1.5, "S10 norms " + fmt("%.4f", s10[0]) + "/" + fmt("%.4f", s10[1]) + "/" +
                                      fmt("%.4f", s10[2]) + " (spread " + fmt("%.3f", a) + "), S1,1/2 norms " +
                                      fmt("%.4f", s1d[0]) + "/" + fmt("%.4f", s1d[1]) + "/" + fmt("%.4f", s1d[2]) +
                                      " (spread " + fmt("%.3f", b) + ")"};
}

Outcome psdo_offdiag_order() {
    const Env env = make_env(SpaceKind::cycle, 512);
    const PsdoKernel k = kernel_matrix(builtin_symbol("elementary", env.space, env.sd), env.sd);
    PsdoOffdiagOptions opt;
    opt.max_separation = 59;
    std::vector<double> orders, ratios;
    bool ok = true;
    for (double t : {0.25, 1.0, 4.0}) {
        const DecayReport r = psdo_offdiag(k, env.sd, env.space, PsiTildeFamily{4}, t, 3.0, 2.0, 2.0, opt);
        orders.push_back(r.exponent);
        ratios.push_back(r.max_ratio);
        ok = ok && r.exponent >= 3.0 && std::isfinite(r.max_ratio);
    }
    const double med = median(ratios);
    for (double r : ratios)
        ok = ok && r >= 0.5 * med && r <= 1.5 * med;
    std::string detail = "orders";
    for (double o : orders)
        detail += " " + fmt("%.2f", o);
    detail += ", max ratios";
    for (double r : ratios)
        detail += " " + fmt("%.2f", r);
    return {ok, detail};
}

Outcome adjoint_defect_slope() {
    const Env env = make_env(SpaceKind::cycle, 256);
    bool ok = true;
    std::string detail;
    for (double delta : {0.0, 0.5}) {
        const ScaleDefect s = per_scale_defect(
            [&](double t) { return bump_profile(env.space, 0, 32 * std::pow(t, delta / 2)); },
            [](double t, double lam) { return t * lam * t * lam * std::exp(-t * lam); }, env.sd, {1, 2, 4, 8}, 2.0);
        const double target = (1 - delta) / 2;
        ok = ok && std::abs(s.slope - target) <= 0.2;
        detail += (detail.empty() ? "" : ", ") + std::string("delta ") + fmt("%.1f", delta) + ": slope " +
                  fmt("%.3f", s.slope) + " (target " + fmt("%.2f", target) + ")";
    }
    return {ok, detail};
}

Outcome bmo_t1_sanity() {
    const MetricMeasureSpace torus = build_space({SpaceKind::grid_torus, 16, 16, MeasureChoice::counting});
    const SelfAdjointOperator op = build_sub_laplacian(torus, edge_difference_fields(torus));
    const SpectralData sd = eigendecompose(op);
    const int M = default_bmo_M(doubling_profile(torus).n);
    const double bmo_const = bmo_norm(sd, torus, Vec(Vec::Constant(torus.size(), 3.7)), M, default_bmo_radii(torus)).norm;
    double psi_one = 0;
    for (double t : {0.25, 1.0, 4.0})
        psi_one = std::max(psi_one, psi_semigroup_apply(sd, t, M, Vec::Ones(torus.size())).cwiseAbs().maxCoeff());

    const Env c64 = make_env(SpaceKind::cycle, 64);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    auto draw = [&](PointId n) {
        Vec v(n);
        for (auto& x : v)
            x = u(rng);
        return v;
    };
    const ScaleGrid grid64 = default_paraproduct_grid(c64.sd);
    double identity = 0;
    for (int i = 0; i < 5; ++i) {
        const Vec g = draw(64), f = draw(64);
        const Vec a = paraproduct(c64.sd, g, f, M, grid64);
        const CVec b = apply(symbol_of_paraproduct(c64.sd, g, M, grid64), c64.sd, f);
        identity = std::max(identity, (a.cast<cdouble>() - b).norm() / f.norm());
    }
    const ScaleGrid grid = default_paraproduct_grid(sd);
    std::vector<double> ratios;
    for (int i = 0; i < 20; ++i) {
        const Vec g = draw(torus.size());
        const Mat P = paraproduct_matrix(sd, g, M, grid);
        ratios.push_back(operator_norm(P, sd.measure, 2, 2).value / g.cwiseAbs().maxCoeff());
    }
    const double sp = spread(ratios);
    return {bmo_const <= 1e-12 && psi_one <= 1e-12 && identity <= 1e-6 && sp <= 5,
            "M = " + std::to_string(M) + ", BMO(const) " + fmt("%.1e", bmo_const) + ", Psi(tL)1 " +
                fmt("%.1e", psi_one) + ", paraproduct identity " + fmt("%.1e", identity) + ", norm/sup spread " +
                fmt("%.3f", sp)};
}

Outcome sobolev_mapping() {
    std::vector<double> norms;
    double identity = 0;
    for (int n : {64, 128, 256}) {
        const Env env = make_env(SpaceKind::cycle, n);
        norms.push_back(mapping_test(builtin_symbol("s10_test", env.space, env.sd), env.sd, env.sd, 1, 0, 2).value);
        const Symbol id = multiplier_symbol([](double xi) { return 1 + xi; });
        identity = std::max(identity, std::abs(mapping_test(id, env.sd, env.sd, 1, 2, 2).value - 1));
    }
    const double sp = spread(norms);
    return {sp <= 1.5 && identity <= 1e-10, "norms " + fmt("%.4f", norms[0]) + "/" + fmt("%.4f", norms[1]) + "/" +
                                                fmt("%.4f", norms[2]) + " (spread " + fmt("%.3f", sp) +
                                                "), identity case |norm - 1| " + fmt("%.1e", identity)};
}

Outcome assumption_checks() {
    const double nc = doubling_profile(build_space({SpaceKind::cycle, 256, 0, MeasureChoice::counting})).n;
    const double nt = doubling_profile(build_space({SpaceKind::grid_torus, 32, 32, MeasureChoice::counting})).n;
    const double ng = doubling_profile(build_space({SpaceKind::sierpinski, 6, 0, MeasureChoice::counting})).n;
    const double target_g = std::log(3.0) / std::log(2.0);
    bool ok = std::abs(nc - 1) <= 0.15 && std::abs(nt - 2) <= 0.15 && std::abs(ng - target_g) <= 0.15;
    std::vector<double> sob, poi;
    for (int level : {4, 5}) {
        const Env env = make_env(SpaceKind::sierpinski, level);
        sob.push_back(embedding_poincare_check(env.sd, env.space, CheckMode::sobolev)[0].C);
        poi.push_back(embedding_poincare_check(env.sd, env.space, CheckMode::p2_poincare)[0].C);
    }
    const double ss = spread(sob), sp = spread(poi);
    ok = ok && ss <= 2 && sp <= 2;
    return {ok, "n: cycle " + fmt("%.3f", nc) + ", torus " + fmt("%.3f", nt) + ", gasket " + fmt("%.3f", ng) +
                    "; gasket 4->5 Sobolev C " + fmt("%.3f", sob[0]) + "->" + fmt("%.3f", sob[1]) + ", Poincare C " +
                    fmt("%.3f", poi[0]) + "->" + fmt("%.3f", poi[1])};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "spectral calculus oracle", 10, spectral_oracle},
        {2, "partition identities", 1, partition_identities},
        {3, "heat off-diagonal decay", 60, heat_offdiag},
        {4, "elementary decomposition", 30, elementary_decomposition},
        {5, "uniform L2 bounds", 120, uniform_boundedness},
        {6, "T psi_t off-diagonal order", 120, psdo_offdiag_order},
        {7, "adjoint defect slope", 60, adjoint_defect_slope},
        {8, "BMO and paraproduct", 120, bmo_t1_sanity},
        {9, "Sobolev mapping", 60, sobolev_mapping},
        {10, "assumption checks", 180, assumption_checks},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s %2d %s: %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.budget_s);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
