#pragma once

#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

namespace testing {

using namespace psdocalc;

struct Fixture {
    MetricMeasureSpace space;
    SelfAdjointOperator op;
    SpectralData sd;
};

inline Fixture make_fixture(SpaceKind kind, int size, int size2 = 0, MeasureChoice m = MeasureChoice::counting) {
    SpaceSpec spec;
    spec.kind = kind;
    spec.size = size;
    spec.size2 = size2;
    spec.measure = m;
    auto space = build_space(spec);
    auto op = build_graph_laplacian(space);
    auto sd = eigendecompose(op);
    return {std::move(space), std::move(op), std::move(sd)};
}

inline Fixture cycle(int n) { return make_fixture(SpaceKind::cycle, n); }

inline Vec random_vec(PointId n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline CVec random_cvec(PointId n, unsigned seed) {
    return random_vec(n, seed).cast<cdouble>() + cdouble(0, 1) * random_vec(n, seed + 1000).cast<cdouble>();
}

}  // namespace testing
