#include "psdocalc/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <set>

namespace psdocalc {

std::string to_string(SpaceKind kind) {
    switch (kind) {
    case SpaceKind::cycle: return "cycle";
    case SpaceKind::grid_torus: return "grid_torus";
    case SpaceKind::path: return "path";
    case SpaceKind::binary_tree: return "binary_tree";
    case SpaceKind::sierpinski: return "sierpinski";
    }
    return "?";
}

std::string to_string(MeasureChoice m) { return m == MeasureChoice::counting ? "counting" : "degree"; }

SpaceKind parse_space_kind(const std::string& s) {
    if (s == "cycle") return SpaceKind::cycle;
    if (s == "grid_torus" || s == "torus") return SpaceKind::grid_torus;
    if (s == "path") return SpaceKind::path;
    if (s == "binary_tree" || s == "tree") return SpaceKind::binary_tree;
    if (s == "sierpinski" || s == "gasket") return SpaceKind::sierpinski;
    throw InvalidArgument("unknown space kind '" + s + "'");
}

MeasureChoice parse_measure_choice(const std::string& s) {
    if (s == "counting") return MeasureChoice::counting;
    if (s == "degree") return MeasureChoice::degree;
    throw InvalidArgument("unknown measure choice '" + s + "'");
}

MetricMeasureSpace::MetricMeasureSpace(SpaceSpec spec, std::vector<Edge> edges,
                                       std::vector<std::vector<double>> coords, Vec measure)
    : spec_(spec), n_(measure.size()), coords_(std::move(coords)), mu_(std::move(measure)) {
    if (n_ == 0)
        throw InvalidArgument("space has no points");
    if (std::size_t(n_) > kMaxPoints)
        throw InvalidArgument("space exceeds the point limit of " + std::to_string(kMaxPoints));
    if (coords_.size() != std::size_t(n_))
        throw InvalidArgument("coordinate count does not match point count");
    for (Eigen::Index i = 0; i < n_; ++i)
        if (!(mu_[i] > 0) || !std::isfinite(mu_[i]))
            throw InvalidArgument("measure must be positive and finite");

    std::set<Edge> uniq;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw InvalidArgument("edge endpoint out of range");
        if (u == v)
            continue;
        uniq.insert({std::min(u, v), std::max(u, v)});
    }
    edges_.assign(uniq.begin(), uniq.end());
    adj_.assign(n_, {});
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_)
        std::sort(a.begin(), a.end());

    const std::uint16_t unseen = std::numeric_limits<std::uint16_t>::max();
    dist_.assign(std::size_t(n_) * n_, unseen);
    std::vector<PointId> queue(n_);
    for (PointId s = 0; s < n_; ++s) {
        std::uint16_t* row = &dist_[std::size_t(s) * n_];
        row[s] = 0;
        std::size_t head = 0, tail = 0;
        queue[tail++] = s;
        while (head < tail) {
            const PointId u = queue[head++];
            for (PointId v : adj_[u])
                if (row[v] == unseen) {
                    row[v] = std::uint16_t(row[u] + 1);
                    queue[tail++] = v;
                }
        }
        if (tail != std::size_t(n_))
            throw InvalidArgument("space is not connected");
        for (PointId v = 0; v < n_; ++v)
            diameter_ = std::max(diameter_, int(row[v]));
    }

    const std::size_t w = std::size_t(diameter_) + 1;
    cumvol_.assign(std::size_t(n_) * w, 0.0);
    for (PointId x = 0; x < n_; ++x) {
        double* c = &cumvol_[std::size_t(x) * w];
        for (PointId y = 0; y < n_; ++y)
            c[dist(x, y)] += mu_[y];
        for (std::size_t k = 1; k < w; ++k)
            c[k] += c[k - 1];
    }
}

void MetricMeasureSpace::check_point(PointId x) const {
    if (x < 0 || x >= n_)
        throw InvalidArgument("point " + std::to_string(x) + " is not in the space");
}

double MetricMeasureSpace::ball_volume(PointId x, double r) const {
    check_point(x);
    if (!(r > 0))
        return 0.0;
    // d < r with integer d  <=>  d <= ceil(r) - 1
    const double k = std::ceil(r) - 1;
    const std::size_t w = std::size_t(diameter_) + 1;
    const std::size_t idx = k >= diameter_ ? std::size_t(diameter_) : std::size_t(k);
    return cumvol_[std::size_t(x) * w + idx];
}

namespace {

struct Graph {
    std::vector<Edge> edges;
    std::vector<std::vector<double>> coords;
};

Graph cycle_graph(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) {
        if (n > 1)
            g.edges.push_back({i, (i + 1) % n});
        g.coords.push_back({double(i) / n});
    }
    return g;
}

Graph path_graph(int n) {
    Graph g;
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n)
            g.edges.push_back({i, i + 1});
        g.coords.push_back({n > 1 ? double(i) / (n - 1) : 0.0});
    }
    return g;
}

Graph torus_graph(int w, int h) {
    Graph g;
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            const int id = i + j * w;
            g.edges.push_back({id, (i + 1) % w + j * w});
            g.edges.push_back({id, i + ((j + 1) % h) * w});
            g.coords.push_back({double(i) / w, double(j) / h});
        }
    return g;
}

Graph tree_graph(int levels) {
    Graph g;
    const long n = (1L << levels) - 1;
    for (long v = 0; v < n; ++v) {
        const int depth = int(std::floor(std::log2(double(v + 1))));
        const long first = (1L << depth) - 1;
        const long width = 1L << depth;
        g.coords.push_back({levels > 1 ? double(depth) / (levels - 1) : 0.0,
                            width > 1 ? double(v - first) / double(width - 1) : 0.0});
        if (v > 0)
            g.edges.push_back({(v - 1) / 2, v});
    }
    return g;
}

Graph gasket_graph(int level) {
    Graph g;
    const long side = 1L << level;
    std::map<std::pair<long, long>, PointId> ids;
    auto vid = [&](long a, long b) {
        auto [it, inserted] = ids.try_emplace({a, b}, PointId(ids.size()));
        if (inserted) {
            const double s = double(side);
            g.coords.push_back({(double(a) + 0.5 * double(b)) / s, (std::sqrt(3.0) / 2) * double(b) / s});
        }
        return it->second;
    };
    auto rec = [&](auto&& self, long a, long b, long s) -> void {
        if (s == 1) {
            const PointId p0 = vid(a, b), p1 = vid(a + 1, b), p2 = vid(a, b + 1);
            g.edges.push_back({p0, p1});
            g.edges.push_back({p1, p2});
            g.edges.push_back({p0, p2});
            return;
        }
        const long h = s / 2;
        self(self, a, b, h);
        self(self, a + h, b, h);
        self(self, a, b + h, h);
    };
    rec(rec, 0, 0, side);
    return g;
}

}  // namespace

MetricMeasureSpace build_space(const SpaceSpec& spec) {
    if (spec.size <= 0)
        throw InvalidArgument("space size/level must be positive");
    if (spec.size2 < 0)
        throw InvalidArgument("space size2 must be nonnegative");
    if (spec.kind == SpaceKind::cycle && spec.size < 3)
        throw InvalidArgument("cycle needs at least 3 points");
    if (spec.kind == SpaceKind::grid_torus && (spec.size < 3 || (spec.size2 > 0 && spec.size2 < 3)))
        throw InvalidArgument("grid_torus sides must be at least 3");
    Graph g;
    double points = 0;
    switch (spec.kind) {
    case SpaceKind::cycle:
        points = spec.size;
        if (points <= kMaxPoints) g = cycle_graph(spec.size);
        break;
    case SpaceKind::path:
        points = spec.size;
        if (points <= kMaxPoints) g = path_graph(spec.size);
        break;
    case SpaceKind::grid_torus: {
        const int h = spec.size2 > 0 ? spec.size2 : spec.size;
        points = double(spec.size) * h;
        if (points <= kMaxPoints) g = torus_graph(spec.size, h);
        break;
    }
    case SpaceKind::binary_tree:
        points = std::exp2(double(spec.size)) - 1;
        if (points <= kMaxPoints) g = tree_graph(spec.size);
        break;
    case SpaceKind::sierpinski:
        points = (std::pow(3.0, spec.size + 1) + 3) / 2;
        if (points <= kMaxPoints) g = gasket_graph(spec.size);
        break;
    }
    if (points > kMaxPoints)
        throw InvalidArgument(to_string(spec.kind) + " of size/level " + std::to_string(spec.size) + " has " +
                              std::to_string(long(points)) + " points, above the limit of " +
                              std::to_string(kMaxPoints));
    const auto n = Eigen::Index(g.coords.size());
    Vec mu = Vec::Ones(n);
    if (spec.measure == MeasureChoice::degree) {
        mu.setZero();
        for (auto [u, v] : g.edges) {
            if (u == v)
                continue;
            mu[u] += 1;
            mu[v] += 1;
        }
        // multi-edges collapse in the constructor; recount from the deduplicated set
        MetricMeasureSpace tmp(spec, g.edges, g.coords, Vec::Ones(n));
        for (PointId x = 0; x < n; ++x)
            mu[x] = double(std::max<std::size_t>(1, tmp.degree(x)));
    }
    return MetricMeasureSpace(spec, std::move(g.edges), std::move(g.coords), std::move(mu));
}

Ball make_ball(const MetricMeasureSpace& space, PointId center, double r) {
    space.check_point(center);
    if (!(r > 0))
        throw InvalidArgument("ball radius must be positive");
    Ball b{center, r, {}};
    for (PointId y = 0; y < space.size(); ++y)
        if (space.dist(center, y) < r)
            b.members.push_back(y);
    return b;
}

BallAnnuli ball_and_annuli(const MetricMeasureSpace& space, PointId center, double r, int j_max) {
    if (j_max < 0)
        throw InvalidArgument("j_max must be nonnegative");
    BallAnnuli out;
    out.ball = make_ball(space, center, r);
    out.annuli.push_back(out.ball.members);
    for (int j = 1; j <= j_max; ++j) {
        const double outer = std::ldexp(r, j), inner = std::ldexp(r, j - 1);
        std::vector<PointId> shell;
        for (PointId y = 0; y < space.size(); ++y) {
            const int d = space.dist(center, y);
            if (d < outer && !(d < inner))
                shell.push_back(y);
        }
        out.annuli.push_back(std::move(shell));
    }
    return out;
}

double ball_distance(const MetricMeasureSpace& space, const Ball& b1, const Ball& b2) {
    return std::max(0.0, double(space.dist(b1.center, b2.center)) - b1.radius - b2.radius);
}

std::vector<BallPair> ball_pair_grid(const MetricMeasureSpace& space, PointId base, double r, int max_separation) {
    space.check_point(base);
    std::vector<PointId> first(std::size_t(std::max(0, max_separation)) + 1, -1);
    for (PointId y = 0; y < space.size(); ++y) {
        const int d = space.dist(base, y);
        if (d <= max_separation && first[d] < 0)
            first[d] = y;
    }
    std::vector<BallPair> pairs;
    const Ball b1 = make_ball(space, base, r);
    for (PointId y : first) {
        if (y < 0)
            continue;
        BallPair p{b1, make_ball(space, y, r), 0.0};
        p.distance = ball_distance(space, p.b1, p.b2);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

DoublingGrid default_doubling_grid(const MetricMeasureSpace& space) {
    DoublingGrid g;
    const double diam = std::max(1, space.diameter());
    g.fit_radii = geometric_grid(diam / 16, diam / 2, 4);
    g.check_radii = geometric_grid(1.0, std::max(1.0, diam), 4);
    g.lambdas = {1.5, 2.0, 4.0};
    const PointId n = space.size();
    const PointId stride = std::max<PointId>(1, (n + 255) / 256);
    for (PointId x = 0; x < n; x += stride)
        g.centers.push_back(x);
    return g;
}

DoublingProfile doubling_profile(const MetricMeasureSpace& space, const DoublingGrid& grid) {
    if (grid.fit_radii.size() < 2 || grid.centers.empty())
        throw InvalidArgument("doubling grid needs >= 2 fit radii and >= 1 center");
    const double total = space.total_measure();
    std::vector<double> lx, ly;
    bool all_saturated = true;
    for (double r : grid.fit_radii) {
        if (!(r > 0))
            throw InvalidArgument("doubling grid radii must be positive");
        double acc = 0;
        for (PointId x : grid.centers) {
            const double v = space.ball_volume(x, r);
            acc += std::log(v);
            if (v < total * (1 - 1e-12))
                all_saturated = false;
        }
        lx.push_back(std::log(r));
        ly.push_back(acc / double(grid.centers.size()));
    }
    if (all_saturated)
        throw InvalidArgument("degenerate doubling grid: every ball saturates the space");
    const LineFit fit = fit_line(lx, ly);
    DoublingProfile prof;
    prof.n = std::max(0.0, fit.slope);
    prof.fit_residual = fit.rms_residual;

    double a2 = 1.0;
    for (PointId x : grid.centers)
        for (double r : grid.check_radii)
            for (double lam : grid.lambdas) {
                const double ratio =
                    space.ball_volume(x, lam * r) / (std::pow(lam, prof.n) * space.ball_volume(x, r));
                a2 = std::max(a2, ratio);
            }
    prof.A2 = a2;

    double dexp = 0.0;
    for (PointId x : grid.centers)
        for (PointId y : grid.centers) {
            if (x == y)
                continue;
            const double d = space.dist(x, y);
            for (double r : grid.check_radii) {
                const double ratio = space.ball_volume(y, r) / space.ball_volume(x, r);
                if (ratio > 1)
                    dexp = std::max(dexp, std::log(ratio) / std::log1p(d / r));
            }
        }
    prof.D = std::min(dexp, prof.n);
    return prof;
}

DoublingProfile doubling_profile(const MetricMeasureSpace& space) {
    return doubling_profile(space, default_doubling_grid(space));
}

nlohmann::json space_to_json(const MetricMeasureSpace& space) {
    nlohmann::json j;
    j["kind"] = to_string(space.kind());
    j["size"] = space.spec().size;
    j["size2"] = space.spec().size2;
    j["measure_choice"] = to_string(space.spec().measure);
    auto pts = nlohmann::json::array();
    for (PointId x = 0; x < space.size(); ++x)
        pts.push_back({{"id", x}, {"coords", space.coords(x)}});
    j["points"] = std::move(pts);
    auto edges = nlohmann::json::array();
    for (auto [u, v] : space.edges())
        edges.push_back({u, v});
    j["edges"] = std::move(edges);
    j["measure"] = std::vector<double>(space.measure().data(), space.measure().data() + space.size());
    return j;
}

MetricMeasureSpace space_from_json(const nlohmann::json& j) {
    try {
        SpaceSpec spec;
        spec.kind = parse_space_kind(j.at("kind").get<std::string>());
        spec.size = j.at("size").get<int>();
        spec.size2 = j.value("size2", 0);
        spec.measure = parse_measure_choice(j.value("measure_choice", std::string("counting")));
        const auto& pts = j.at("points");
        std::vector<std::vector<double>> coords(pts.size());
        for (const auto& p : pts) {
            const auto id = p.at("id").get<std::size_t>();
            if (id >= coords.size())
                throw InvalidArgument("point id out of range");
            coords[id] = p.at("coords").get<std::vector<double>>();
        }
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges"))
            edges.push_back({e.at(0).get<PointId>(), e.at(1).get<PointId>()});
        const auto mu = j.at("measure").get<std::vector<double>>();
        if (mu.size() != coords.size())
            throw InvalidArgument("measure length does not match point count");
        return MetricMeasureSpace(spec, std::move(edges), std::move(coords),
                                  Eigen::Map<const Vec>(mu.data(), Eigen::Index(mu.size())));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed space file: ") + e.what());
    }
}

void write_volume_stats_csv(const MetricMeasureSpace& space, std::ostream& os) {
    os << "r,min,median,max\n";
    os.precision(10);
    for (double r : geometric_grid(1.0, std::max(1, space.diameter()), 4)) {
        std::vector<double> v;
        v.reserve(std::size_t(space.size()));
        for (PointId x = 0; x < space.size(); ++x)
            v.push_back(space.ball_volume(x, r));
        os << r << ',' << *std::min_element(v.begin(), v.end()) << ',' << median(v) << ','
           << *std::max_element(v.begin(), v.end()) << '\n';
    }
}

}  // namespace psdocalc
