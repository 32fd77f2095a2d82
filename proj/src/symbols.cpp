#include "psdocalc/symbols.hpp"

#include "psdocalc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

namespace psdocalc {

std::string to_string(SymbolSource s) {
    switch (s) {
    case SymbolSource::expression: return "expression";
    case SymbolSource::builtin: return "builtin";
    case SymbolSource::table: return "table";
    }
    return "?";
}

Symbol::Symbol(Fn fn, ClassParams params, SymbolSource source, std::string description, bool real)
    : fn_(std::move(fn)), params_(params), source_(source), description_(std::move(description)), real_(real) {
    if (!fn_)
        throw InvalidArgument("symbol without evaluation function");
    if (params_.s < 0 || params_.rho < 0 || params_.rho > 1 || params_.delta < 0 || params_.delta > 1 ||
        !(params_.m > 1))
        throw InvalidArgument("class parameters need s >= 0, rho and delta in [0,1], m > 1");
}

CMat Symbol::on_spectrum(const SpectralData& sd) const {
    const PointId n = sd.size();
    CMat S(n, n);
    parallel_for(std::size_t(n), [&](std::size_t xi) {
        const auto x = PointId(xi);
        for (PointId k = 0; k < n; ++k) {
            const cdouble v = fn_(x, sd.eigenvalues[k]);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("symbol is not finite at point " + std::to_string(x) + ", eigenvalue " +
                                     std::to_string(sd.eigenvalues[k]));
            S(x, k) = v;
        }
    });
    return S;
}

CVec Symbol::at(double xi, PointId npoints) const {
    CVec v(npoints);
    for (PointId x = 0; x < npoints; ++x)
        v[x] = fn_(x, xi);
    return v;
}

Symbol Symbol::conj() const {
    auto f = fn_;
    return Symbol([f](PointId x, double xi) { return std::conj(f(x, xi)); }, params_, source_,
                  "conj(" + description_ + ")", real_);
}

Symbol Symbol::operator+(const Symbol& other) const {
    auto f = fn_, g = other.fn_;
    ClassParams p = params_;
    p.s = std::max(params_.s, other.params_.s);
    p.rho = std::min(params_.rho, other.params_.rho);
    p.delta = std::max(params_.delta, other.params_.delta);
    return Symbol([f, g](PointId x, double xi) { return f(x, xi) + g(x, xi); }, p, SymbolSource::builtin,
                  "(" + description_ + ") + (" + other.description_ + ")", real_ && other.real_);
}

Symbol Symbol::scaled(cdouble c) const {
    auto f = fn_;
    return Symbol([f, c](PointId x, double xi) { return c * f(x, xi); }, params_, source_, description_,
                  real_ && c.imag() == 0);
}

Symbol symbol_from_expression(const SymbolExpr& expr, const MetricMeasureSpace& space, ClassParams params,
                              double probe_lo, double probe_hi) {
    if (std::size_t(expr.max_feature() + 1) > space.feature_dim())
        throw InvalidArgument("expression uses x" + std::to_string(expr.max_feature()) + " but the space has only " +
                              std::to_string(space.feature_dim()) + " feature(s)");
    std::vector<std::vector<double>> feats(std::size_t(space.size()));
    for (PointId x = 0; x < space.size(); ++x)
        feats[std::size_t(x)] = space.coords(x);
    const auto probes = geometric_grid(probe_lo, probe_hi, 4);
    for (PointId x = 0; x < space.size(); ++x)
        for (double xi : probes) {
            const double v = expr.eval(xi, feats[std::size_t(x)]);
            if (!std::isfinite(v))
                throw NumericalError("expression '" + expr.source() + "' is not finite at x = " + std::to_string(x) +
                                     ", xi = " + std::to_string(xi));
        }
    auto shared = std::make_shared<const SymbolExpr>(expr);
    auto fshared = std::make_shared<const std::vector<std::vector<double>>>(std::move(feats));
    return Symbol([shared, fshared](PointId x, double xi) { return cdouble(shared->eval(xi, (*fshared)[std::size_t(x)])); },
                  params, SymbolSource::expression, expr.source());
}

Symbol symbol_from_text(const std::string& text, const MetricMeasureSpace& space, ClassParams params) {
    return symbol_from_expression(SymbolExpr::parse(text), space, params);
}

Symbol multiplier_symbol(std::function<double(double)> F, ClassParams params, std::string description) {
    return Symbol([F = std::move(F)](PointId, double xi) { return cdouble(F(xi)); }, params, SymbolSource::builtin,
                  std::move(description));
}

Symbol constant_symbol(cdouble c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c.real());
    return Symbol([c](PointId, double) { return c; }, {}, SymbolSource::builtin, buf, c.imag() == 0);
}

Symbol separable_symbol(Vec a, std::function<double(double)> F, ClassParams params, std::string description) {
    return Symbol([a = std::move(a), F = std::move(F)](PointId x, double xi) { return cdouble(a[x] * F(xi)); },
                  params, SymbolSource::builtin, std::move(description));
}

Vec bump_profile(const MetricMeasureSpace& space, PointId center, double width) {
    space.check_point(center);
    if (!(width > 0))
        throw InvalidArgument("bump width must be positive");
    Vec g(space.size());
    const double n = double(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        double d = space.dist(center, x);
        if (space.kind() == SpaceKind::cycle)
            d = n / std::numbers::pi * std::sin(std::numbers::pi * d / n);
        g[x] = std::exp(-d * d / (2 * width * width));
    }
    return g;
}

std::vector<std::string> builtin_symbol_ids() { return {"one", "s10_test", "decompose_test", "elementary", "s1delta"}; }

namespace {

/// Σ_j w_j G(j, x) ψ(t_j ξ) plus an optional φ(ξ) term.
Symbol scale_sum_symbol(Mat G, ScaleGrid grid, std::shared_ptr<const PartitionOfUnity> pu, bool with_phi,
                        ClassParams params, SymbolSource source, std::string description) {
    return Symbol(
        [G = std::move(G), grid = std::move(grid), pu, with_phi](PointId x, double xi) {
            double s = with_phi ? pu->phi(xi) : 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j) {
                const double u = grid.t[j] * xi;
                if (u > 1 && u < 2)
                    s += grid.w[j] * G(Eigen::Index(j), x) * pu->psi(u);
            }
            return cdouble(s);
        },
        params, source, std::move(description));
}

}  // namespace

Symbol builtin_symbol(const std::string& id, const MetricMeasureSpace& space, const SpectralData& sd,
                      ClassParams params) {
    const PointId n = space.size();
    auto x0 = [&space](PointId x) { return space.coords(x).at(0); };
    if (id == "one")
        return Symbol([](PointId, double) { return cdouble(1.0); }, params, SymbolSource::builtin, "one");
    if (id == "s10_test") {
        Vec a(n), b(n);
        for (PointId x = 0; x < n; ++x) {
            a[x] = 1 + 0.5 * std::cos(2 * std::numbers::pi * x0(x));
            b[x] = 0.25 * std::sin(2 * std::numbers::pi * x0(x));
        }
        return Symbol([a, b](PointId x, double xi) { return cdouble(a[x] * xi / (1 + xi) + b[x] / (1 + xi)); },
                      params, SymbolSource::builtin, "s10_test");
    }
    if (id == "decompose_test") {
        Vec a(n);
        for (PointId x = 0; x < n; ++x)
            a[x] = std::cos(2 * std::numbers::pi * x0(x));
        return Symbol([a](PointId x, double xi) { return cdouble(a[x] * xi / (1 + xi)); }, params,
                      SymbolSource::builtin, "decompose_test");
    }
    if (id == "elementary" || id == "s1delta") {
        auto pu = std::make_shared<const PartitionOfUnity>();
        if (!(sd.lambda_max() > 1))
            throw InvalidArgument("builtin '" + id + "' needs lambda_max > 1");
        ScaleGrid grid = pu->grid(1.0 / sd.lambda_max());
        Mat G(Eigen::Index(grid.size()), n);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (id == "elementary") {
                for (PointId x = 0; x < n; ++x)
                    G(Eigen::Index(j), x) = std::cos(2 * std::numbers::pi * x0(x) + grid.t[j]);
            } else {
                G.row(Eigen::Index(j)) = bump_profile(space, 0, 8 * std::pow(grid.t[j], params.delta / 2)).transpose();
            }
        }
        return scale_sum_symbol(std::move(G), std::move(grid), pu, id == "s1delta", params, SymbolSource::builtin, id);
    }
    throw InvalidArgument("unknown builtin symbol '" + id + "'");
}

Symbol random_s11_symbol(const MetricMeasureSpace& space, const SpectralData& sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> amp(0.2, 1.5);
    auto pu = std::make_shared<const PartitionOfUnity>();
    if (!(sd.lambda_max() > 1))
        throw InvalidArgument("random symbol needs lambda_max > 1");
    ScaleGrid grid = pu->grid(1.0 / sd.lambda_max());
    const PointId n = space.size();
    auto band_limited = [&](double cutoff) {
        Vec c = Vec::Zero(n);
        for (PointId k = 0; k < n; ++k)
            if (sd.eigenvalues[k] <= cutoff || k == 0)
                c[k] = unif(rng);
        Vec a = sd.eigenvectors * c;
        const double sup = a.cwiseAbs().maxCoeff();
        return sup > 0 ? Vec(a / sup) : a;
    };
    const double scale = amp(rng);
    Mat G(Eigen::Index(grid.size()) + 1, n);
    for (std::size_t j = 0; j < grid.size(); ++j)
        G.row(Eigen::Index(j)) = scale * band_limited(1.0 / grid.t[j]).transpose();
    const Vec a0 = scale * band_limited(1.0);
    const std::size_t J = grid.size();
    return Symbol(
        [G, grid, pu, a0, J](PointId x, double xi) {
            double s = pu->phi(xi) * a0[x];
            for (std::size_t j = 0; j < J; ++j) {
                const double u = grid.t[j] * xi;
                if (u > 1 && u < 2)
                    s += grid.w[j] * G(Eigen::Index(j), x) * pu->psi(u);
            }
            return cdouble(s);
        },
        ClassParams{0.0, 1.0, 1.0, 2.0}, SymbolSource::builtin, "random_s11#" + std::to_string(seed));
}

CVec spectral_power(const SpectralData& sd, double alpha, const CVec& g) {
    if (alpha == 0)
        return g;
    Vec p(sd.size());
    for (PointId k = 0; k < sd.size(); ++k)
        p[k] = sd.eigenvalues[k] > 1e-9 ? std::pow(sd.eigenvalues[k], alpha) : 0.0;
    return sd.apply_values(p, g);
}

std::vector<double> probe_grid(double lo, double hi, int per_octave) { return geometric_grid(lo, hi, per_octave); }

SeminormTable seminorm(const Symbol& sigma, const SpectralData* delta_sd, const SeminormOptions& opt) {
    if (opt.beta_max < 0 || opt.beta_max > 4)
        throw InvalidArgument("beta_max must lie in 0..4");
    if (opt.alpha_max < 0 || std::abs(2 * opt.alpha_max - std::round(2 * opt.alpha_max)) > 1e-12)
        throw InvalidArgument("alpha_max must be a nonnegative multiple of 1/2");
    if (!delta_sd)
        throw InvalidArgument("seminorm needs the spectral data of the reference operator");
    const SpectralData& sd = *delta_sd;
    SeminormTable tab;
    for (int a2 = 0; a2 <= int(std::lround(2 * opt.alpha_max)); ++a2)
        tab.alphas.push_back(0.5 * a2);
    for (int b = 0; b <= opt.beta_max; ++b)
        tab.betas.push_back(b);
    const double lo = opt.band_lo > 0 ? opt.band_lo : sd.lambda_min_positive();
    const double hi = opt.band_hi > 0 ? opt.band_hi : sd.lambda_max();
    if (!(lo > 0) || !(hi >= lo))
        throw InvalidArgument("seminorm probe band is empty");
    const auto grid = probe_grid(lo, hi, opt.per_octave);
    const PointId n = sd.size();
    const ClassParams& cp = sigma.params();
    const auto na = tab.alphas.size(), nb = tab.betas.size();
    auto partial = parallel_map<Mat>(grid.size(), [&](std::size_t i) {
        const double xi = grid[i];
        Mat K = Mat::Zero(Eigen::Index(na), Eigen::Index(nb));
        for (std::size_t b = 0; b < nb; ++b) {
            const CVec d = xi_derivative([&](double z) { return sigma.at(z, n); }, xi, int(b));
            for (std::size_t a = 0; a < na; ++a) {
                const CVec v = spectral_power(sd, tab.alphas[a], d);
                const double w = std::pow(1 + xi, cp.rho * double(b) - cp.s / cp.m - 2 * cp.delta * tab.alphas[a] / cp.m);
                const double val = v.cwiseAbs().maxCoeff() * w;
                if (!std::isfinite(val))
                    throw NumericalError("seminorm probe produced a non-finite value");
                K(Eigen::Index(a), Eigen::Index(b)) = val;
            }
        }
        return K;
    });
    tab.K = Mat::Zero(Eigen::Index(na), Eigen::Index(nb));
    for (const auto& K : partial)
        tab.K = tab.K.cwiseMax(K);
    return tab;
}

cdouble ElementaryDecomposition::tau(PointId x, double xi) const {
    const double ph = partition->phi(xi);
    return ph == 0 ? cdouble(0) : ph * (*sigma)(x, xi);
}

cdouble ElementaryDecomposition::reconstruct(PointId x, double xi) const {
    cdouble s = tau(x, xi);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double u = grid.t[j] * xi;
        if (partition->psi_tilde(u) == 0)
            continue;
        cdouble inner = 0;
        for (int l = -l_max; l <= l_max; ++l)
            inner += gamma_at(l, j, x) * std::polar(1.0, 2 * std::numbers::pi * l * u);
        s += grid.w[j] * partition->psi_tilde(u) * inner;
    }
    return s;
}

ElementaryDecomposition decompose(const Symbol& sigma, PointId npoints, const PartitionOfUnity& partition,
                                  const ScaleGrid& grid, int l_max, int fourier_nodes) {
    if (l_max < 0)
        throw InvalidArgument("l_max must be nonnegative");
    if (fourier_nodes < 4 * (l_max + 1))
        throw InvalidArgument("fourier_nodes = " + std::to_string(fourier_nodes) + " is below the Nyquist count " +
                              std::to_string(4 * (l_max + 1)) + " for l_max = " + std::to_string(l_max));
    if (grid.size() == 0)
        throw InvalidArgument("empty scale grid");
    ElementaryDecomposition d;
    d.grid = grid;
    d.l_max = l_max;
    d.nodes = fourier_nodes;
    d.npoints = npoints;
    d.partition = std::make_shared<const PartitionOfUnity>(partition);
    d.sigma = std::make_shared<const Symbol>(sigma);
    const int K = fourier_nodes;
    std::vector<double> psi_u(std::size_t(K), 0.0);
    for (int k = 0; k < K; ++k)
        psi_u[std::size_t(k)] = partition.psi(1.0 + double(k) / K);
    // e^{-2πi l u_k} = e^{-2πi l k / K} for u_k = 1 + k/K
    CMat phase(2 * l_max + 1, K);
    for (int l = -l_max; l <= l_max; ++l)
        for (int k = 0; k < K; ++k)
            phase(l + l_max, k) = std::polar(1.0 / K, -2 * std::numbers::pi * double((long(l) * k) % K) / K);
    d.gamma = parallel_map<CMat>(grid.size(), [&](std::size_t j) {
        const double t = grid.t[j];
        CMat V(K, npoints);
        for (int k = 0; k < K; ++k) {
            const double u = 1.0 + double(k) / K;
            for (PointId x = 0; x < npoints; ++x)
                V(k, x) = psi_u[std::size_t(k)] == 0 ? cdouble(0) : sigma(x, u / t) * psi_u[std::size_t(k)];
        }
        return CMat(phase * V);
    });
    d.sup_gamma.assign(std::size_t(l_max) + 1, 0.0);
    for (const auto& G : d.gamma)
        for (int l = 0; l <= l_max; ++l) {
            const double a = G.row(l + l_max).cwiseAbs().maxCoeff();
            const double b = G.row(l_max - l).cwiseAbs().maxCoeff();
            d.sup_gamma[std::size_t(l)] = std::max({d.sup_gamma[std::size_t(l)], a, b});
        }
    std::vector<double> xs, ys;
    for (int l = 0; l <= l_max; ++l)
        if (d.sup_gamma[std::size_t(l)] > 1e-15) {
            xs.push_back(std::log1p(double(l)));
            ys.push_back(std::log(d.sup_gamma[std::size_t(l)]));
        }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        d.decay_M = -fit.slope;
        d.decay_r2 = fit.r2;
    }
    return d;
}

double reconstruct_residual(const ElementaryDecomposition& d, const std::vector<double>& probe_xi) {
    for (double xi : probe_xi)
        if (!(xi > 0) || xi > d.band_hi() * (1 + 1e-12))
            throw InvalidArgument("probe xi = " + std::to_string(xi) + " lies outside the band (0, " +
                                  std::to_string(d.band_hi()) + "]");
    const auto worst = parallel_map<double>(probe_xi.size(), [&](std::size_t i) {
        double w = 0;
        for (PointId x = 0; x < d.npoints; ++x)
            w = std::max(w, std::abs((*d.sigma)(x, probe_xi[i]) - d.reconstruct(x, probe_xi[i])));
        return w;
    });
    return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

void write_decomposition_csv(const ElementaryDecomposition& d, std::ostream& os) {
    os << "l,t,max_abs_gamma\n";
    char buf[128];
    for (int l = -d.l_max; l <= d.l_max; ++l)
        for (std::size_t j = 0; j < d.grid.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12e\n", l, d.grid.t[j],
                          d.gamma[j].row(l + d.l_max).cwiseAbs().maxCoeff());
            os << buf;
        }
}

}  // namespace psdocalc
