#include "psdocalc/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace psdocalc {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw InvalidArgument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2)
        throw InvalidArgument("fit_line: need at least two points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0)
        throw InvalidArgument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    fit.rms_residual = std::sqrt(ss_res / n);
    fit.count = n;
    return fit;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
            ++j;
        const double avg = 0.5 * (double(i) + double(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InvalidArgument("spearman: need two equally sized samples of length >= 2");
    const auto ra = ranks(a), rb = ranks(b);
    const double n = double(a.size());
    const double m = (n + 1) / 2;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - m) * (rb[i] - m);
        saa += (ra[i] - m) * (ra[i] - m);
        sbb += (rb[i] - m) * (rb[i] - m);
    }
    if (saa == 0 || sbb == 0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double median(std::vector<double> values) {
    if (values.empty())
        throw InvalidArgument("median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> geometric_grid(double lo, double hi, int per_octave) {
    if (!(lo > 0) || !(hi >= lo) || per_octave < 1)
        throw InvalidArgument("geometric_grid: need 0 < lo <= hi and per_octave >= 1");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double r = lo * std::exp2(double(k) / per_octave);
        if (r > hi * (1 + 1e-12))
            break;
        out.push_back(r);
    }
    return out;
}

bool is_inf(double p) { return std::isinf(p); }

double conjugate_exponent(double p) {
    if (p < 1)
        throw InvalidArgument("exponent must be >= 1");
    if (p == 1)
        return std::numeric_limits<double>::infinity();
    if (is_inf(p))
        return 1.0;
    return p / (p - 1);
}

namespace {

template <class V>
double lp_impl(const V& f, const Vec& mu, double p) {
    if (p < 1)
        throw InvalidArgument("lp_norm: p must be >= 1");
    if (is_inf(p))
        return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    double s = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        s += std::pow(std::abs(f[i]), p) * mu[i];
    return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const Vec& f, const Vec& mu, double p) { return lp_impl(f, mu, p); }
double lp_norm(const CVec& f, const Vec& mu, double p) { return lp_impl(f, mu, p); }

}  // namespace psdocalc
