#include "psdocalc/decay.hpp"

#include "psdocalc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace psdocalc {

namespace {

double inv(double p) { return is_inf(p) ? 0.0 : 1.0 / p; }

void finish_ratios(DecayReport& rep) {
    rep.max_ratio = 0;
    rep.max_ratio_unnormalized = 0;
    for (auto& row : rep.rows) {
        const double unit = row.model_bound / row.volume_factor;
        row.ratio = row.model_bound > 0 ? row.norm / row.model_bound : 0.0;
        row.ratio_unnormalized = unit > 0 ? row.norm / unit : 0.0;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.max_ratio_unnormalized = std::max(rep.max_ratio_unnormalized, row.ratio_unnormalized);
        rep.lower_bound = rep.lower_bound || row.lower_bound;
    }
    rep.C = rep.max_ratio;
}

}  // namespace

std::string to_string(DecayModel m) { return m == DecayModel::gaussian ? "gaussian" : "polynomial"; }

DecayReport finalize_gaussian(std::vector<DecayRow> rows, double m, std::uint64_t seed) {
    if (!(m > 1))
        throw InvalidArgument("operator order m must exceed 1");
    DecayReport rep;
    rep.model = DecayModel::gaussian;
    rep.rows = std::move(rows);
    rep.seed = seed;
    rep.exponent = m / (m - 1);
    std::vector<double> xs, ys;
    for (const auto& row : rep.rows)
        if (row.distance > 0 && row.norm > kNormFloor) {
            xs.push_back(std::pow(row.distance / std::pow(row.t, 1 / m), rep.exponent));
            ys.push_back(std::log(row.norm));
        }
    rep.fit_rows = xs.size();
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        rep.c = -fit.slope;
        rep.r2 = fit.r2;
    }
    for (auto& row : rep.rows) {
        const double x = std::pow(row.distance / std::pow(row.t, 1 / m), rep.exponent);
        row.model_bound = row.volume_factor * std::exp(-rep.c * x);
    }
    finish_ratios(rep);
    return rep;
}

DecayReport finalize_polynomial(std::vector<DecayRow> rows, double nu, double m, std::uint64_t seed) {
    if (!(m > 1))
        throw InvalidArgument("operator order m must exceed 1");
    DecayReport rep;
    rep.model = DecayModel::polynomial;
    rep.rows = std::move(rows);
    rep.seed = seed;
    rep.target_order = nu;
    std::vector<double> xs, ys;
    for (const auto& row : rep.rows)
        if (row.distance > 0 && row.norm > kNormFloor) {
            xs.push_back(std::log1p(row.distance / std::pow(row.t, 1 / m)));
            ys.push_back(std::log(row.norm));
        }
    rep.fit_rows = xs.size();
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        rep.exponent = -fit.slope;
        rep.r2 = fit.r2;
    }
    for (auto& row : rep.rows)
        row.model_bound = row.volume_factor * std::pow(1 + row.distance / std::pow(row.t, 1 / m), -nu);
    finish_ratios(rep);
    return rep;
}

namespace {

template <class M>
std::vector<DecayRow> measure_pairs_impl(const M& K, const Vec& mu, const std::vector<BallPair>& pairs, double t,
                                         double p, double q, std::uint64_t seed) {
    return parallel_map<DecayRow>(pairs.size(), [&](std::size_t i) {
        const auto& pr = pairs[i];
        const BlockNorm bn = block_norm(K, mu, mu, pr.b1.members, pr.b2.members, p, q, seed + i);
        double vol = 0;
        for (PointId y : pr.b1.members)
            vol += mu[y];
        DecayRow row;
        row.t = t;
        row.pair_id = int(i);
        row.distance = pr.distance;
        row.norm = bn.value;
        row.lower_bound = bn.lower_bound;
        row.volume_factor = std::pow(vol, inv(q) - inv(p));
        return row;
    });
}

}  // namespace

std::vector<DecayRow> measure_pairs(const Mat& K, const Vec& mu, const std::vector<BallPair>& pairs, double t,
                                    double p, double q, std::uint64_t seed) {
    return measure_pairs_impl(K, mu, pairs, t, p, q, seed);
}

std::vector<DecayRow> measure_pairs(const CMat& K, const Vec& mu, const std::vector<BallPair>& pairs, double t,
                                    double p, double q, std::uint64_t seed) {
    return measure_pairs_impl(K, mu, pairs, t, p, q, seed);
}

BlockNorm offdiag_norm(const Mat& K, const Vec& mu, const Ball& b1, const Ball& b2, double p, double q,
                       std::uint64_t seed) {
    return block_norm(K, mu, mu, b1.members, b2.members, p, q, seed);
}

DecayReport heat_decay(const SpectralData& sd, const MetricMeasureSpace& space, const std::vector<double>& t_grid,
                       double m, const HeatDecayOptions& opt) {
    if (t_grid.empty())
        throw InvalidArgument("empty t grid");
    std::vector<DecayRow> rows;
    int next_id = 0;
    for (double t : t_grid) {
        if (!(t > 0))
            throw InvalidArgument("heat-decay times must be positive");
        const double scale = std::pow(t, 1 / m);
        const int max_sep = int(std::ceil(opt.x_max * scale + 2 * scale));
        auto pairs = ball_pair_grid(space, opt.base, scale, max_sep);
        std::erase_if(pairs, [&](const BallPair& p) { return p.distance / scale > opt.x_max; });
        if (pairs.empty())
            throw InvalidArgument("empty pair grid");
        const Mat H = semigroup_matrix(sd, t);
        auto batch = measure_pairs(H, sd.measure, pairs, t, opt.p, opt.q, opt.seed);
        for (auto& row : batch) {
            row.pair_id = next_id++;
            rows.push_back(row);
        }
    }
    return finalize_gaussian(std::move(rows), m, opt.seed);
}

void write_decay_csv(const DecayReport& report, std::ostream& os) {
    os << "t,pair_id,distance,norm,model_bound,ratio\n";
    char buf[256];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%d,%.10g,%.12e,%.12e,%.12e\n", r.t, r.pair_id, r.distance, r.norm,
                      r.model_bound, r.ratio);
        os << buf;
    }
}

}  // namespace psdocalc
