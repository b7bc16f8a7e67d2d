#pragma once

// Shared oracles and generators for the unit and acceptance suites. Everything
// here is deliberately independent of the implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <vector>

#include "uavplan/geometry.hpp"
#include "uavplan/rng.hpp"
#include "uavplan/tsp.hpp"

namespace testutil {

using uavplan::ObstacleAABB;
using uavplan::Rng;
using uavplan::Vec3;

// Dense-sampling collision oracle: walks the segment at the given spacing and
// reports whether any sample lies in the closed box.
inline bool sampled_segment_hit(const Vec3& a, const Vec3& b, const ObstacleAABB& box,
                                double spacing = 1e-3) {
    const double len = uavplan::distance(a, b);
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing)));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        if (box.contains(a + (b - a) * t)) return true;
    }
    return false;
}

// Chord length of the segment inside the box (slab interval re-derivation,
// used only to classify cases the sampling oracle cannot resolve).
inline double chord_length(const Vec3& a, const Vec3& b, const ObstacleAABB& box) {
    double t0 = 0.0, t1 = 1.0;
    const Vec3 d = b - a;
    for (std::size_t ax = 0; ax < 3; ++ax) {
        if (d[ax] == 0.0) {
            if (a[ax] < box.p_min[ax] || a[ax] > box.p_max[ax]) return 0.0;
            continue;
        }
        double lo = (box.p_min[ax] - a[ax]) / d[ax];
        double hi = (box.p_max[ax] - a[ax]) / d[ax];
        if (lo > hi) std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
        if (t0 > t1) return 0.0;
    }
    return (t1 - t0) * d.norm();
}

struct SegmentBoxCase {
    Vec3 a, b;
    ObstacleAABB box;
};

inline SegmentBoxCase random_segment_box(Rng& rng) {
    SegmentBoxCase c;
    auto pt = [&rng](double lo, double hi) {
        return Vec3{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
    };
    c.a = pt(-20.0, 120.0);
    c.b = pt(-20.0, 120.0);
    Vec3 corner = pt(0.0, 80.0);
    Vec3 edges{rng.uniform(5.0, 40.0), rng.uniform(5.0, 40.0), rng.uniform(5.0, 40.0)};
    c.box = {corner, corner + edges};
    return c;
}

// Exhaustive tour enumeration; the ground truth for small TSP instances.
inline double brute_force_optimum(const uavplan::tsp::DistanceMatrix& d) {
    std::vector<std::size_t> perm;
    for (std::size_t i = 1; i < d.n; ++i) perm.push_back(i);
    double best = std::numeric_limits<double>::infinity();
    do {
        double len = d.at(0, perm.front());
        for (std::size_t i = 0; i + 1 < perm.size(); ++i) len += d.at(perm[i], perm[i + 1]);
        len += d.at(perm.back(), 0);
        best = std::min(best, len);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Random Euclidean instance over the unit kilometer box.
inline uavplan::tsp::DistanceMatrix random_instance(std::size_t K, Rng& rng) {
    const Vec3 depot{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
    std::vector<Vec3> items;
    for (std::size_t i = 0; i < K; ++i)
        items.push_back({rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0),
                         rng.uniform(0.0, 1000.0)});
    return uavplan::tsp::distance_matrix(depot, items);
}

}  // namespace testutil
