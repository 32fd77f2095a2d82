#pragma once

#include "psdocalc/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace psdocalc {

enum class SpaceKind { cycle, grid_torus, path, binary_tree, sierpinski };
enum class MeasureChoice { counting, degree };

std::string to_string(SpaceKind kind);
std::string to_string(MeasureChoice m);
SpaceKind parse_space_kind(const std::string& s);
MeasureChoice parse_measure_choice(const std::string& s);

inline constexpr std::size_t kMaxPoints = 5000;

/// `size` is N for cycle/path, width for grid_torus (height = size2, or
/// size when size2 is 0), number of levels for binary_tree, and the
/// refinement level for sierpinski.
struct SpaceSpec {
    SpaceKind kind = SpaceKind::cycle;
    int size = 0;
    int size2 = 0;
    MeasureChoice measure = MeasureChoice::counting;
};

using Edge = std::pair<PointId, PointId>;

class MetricMeasureSpace {
public:
    /// Builds the graph metric by BFS. Throws if the graph is disconnected.
    MetricMeasureSpace(SpaceSpec spec, std::vector<Edge> edges, std::vector<std::vector<double>> coords,
                       Vec measure);

    PointId size() const { return n_; }
    const SpaceSpec& spec() const { return spec_; }
    SpaceKind kind() const { return spec_.kind; }
    int level_or_size() const { return spec_.size; }

    int dist(PointId x, PointId y) const { return dist_[std::size_t(x) * n_ + y]; }
    int diameter() const { return diameter_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<PointId>& neighbors(PointId x) const { return adj_[x]; }
    std::size_t degree(PointId x) const { return adj_[x].size(); }

    const Vec& measure() const { return mu_; }
    double measure(PointId x) const { return mu_[x]; }
    double total_measure() const { return mu_.sum(); }

    /// Normalized point features x0, x1, ... used by symbol expressions.
    const std::vector<double>& coords(PointId x) const { return coords_[x]; }
    std::size_t feature_dim() const { return coords_.empty() ? 0 : coords_[0].size(); }

    /// μ(B(x, r)) for the open ball.
    double ball_volume(PointId x, double r) const;

    void check_point(PointId x) const;

private:
    SpaceSpec spec_;
    PointId n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<PointId>> adj_;
    std::vector<std::vector<double>> coords_;
    Vec mu_;
    std::vector<std::uint16_t> dist_;
    int diameter_ = 0;
    // cumvol_[x * (diameter_+1) + k] = μ({y : d(x,y) <= k})
    std::vector<double> cumvol_;
};

MetricMeasureSpace build_space(const SpaceSpec& spec);

struct Ball {
    PointId center = 0;
    double radius = 0.0;
    std::vector<PointId> members;  // sorted
};

/// Open ball {y : d(center, y) < r}.
Ball make_ball(const MetricMeasureSpace& space, PointId center, double r);

struct BallAnnuli {
    Ball ball;
    std::vector<std::vector<PointId>> annuli;  // S_0 .. S_jmax
};

BallAnnuli ball_and_annuli(const MetricMeasureSpace& space, PointId center, double r, int j_max);

/// max(0, d(c1,c2) - r1 - r2).
double ball_distance(const MetricMeasureSpace& space, const Ball& b1, const Ball& b2);

struct BallPair {
    Ball b1;
    Ball b2;
    double distance = 0.0;
};

/// B1 = B(base, r) and B2 = B(y_k, r) where y_k is the smallest point id at
/// graph distance k from base, for k = 0..max_separation (skipping k with no point).
std::vector<BallPair> ball_pair_grid(const MetricMeasureSpace& space, PointId base, double r, int max_separation);

struct DoublingGrid {
    std::vector<double> fit_radii;    // regression radii for n
    std::vector<double> check_radii;  // radii over which A2 and D are sampled
    std::vector<double> lambdas;
    std::vector<PointId> centers;
};

/// Fit radii: 4 per octave over [diam/16, diam/2]; check radii: 4 per octave
/// over [1, diam]; lambdas {1.5, 2, 4}; all centers (strided to <= 256).
DoublingGrid default_doubling_grid(const MetricMeasureSpace& space);

struct DoublingProfile {
    double A2 = 1.0;
    double n = 0.0;
    double D = 0.0;
    double fit_residual = 0.0;
};

DoublingProfile doubling_profile(const MetricMeasureSpace& space, const DoublingGrid& grid);
DoublingProfile doubling_profile(const MetricMeasureSpace& space);

nlohmann::json space_to_json(const MetricMeasureSpace& space);
MetricMeasureSpace space_from_json(const nlohmann::json& j);

/// CSV `r,min,median,max` of ball volumes over all centers, radii 4 per octave in [1, diam].
void write_volume_stats_csv(const MetricMeasureSpace& space, std::ostream& os);

}  // namespace psdocalc
