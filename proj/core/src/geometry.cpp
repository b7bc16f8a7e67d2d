#include "uavplan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace uavplan::env {

bool segment_intersects_aabb(const Vec3& p_from, const Vec3& p_to, const ObstacleAABB& box) {
    // Parametrize p(t) = p_from + t * (p_to - p_from), t in [0, 1], and clip
    // the admissible t-interval against the three slabs. Bounds are inclusive:
    // touching a face already violates the OR-of-strict-inequalities condition.
    double t_enter = 0.0;
    double t_exit = 1.0;
    const Vec3 dir = p_to - p_from;

    for (std::size_t axis = 0; axis < 3; ++axis) {
        const double o = p_from[axis];
        const double d = dir[axis];
        const double lo = box.p_min[axis];
        const double hi = box.p_max[axis];

        if (d == 0.0) {
            if (o < lo || o > hi) return false;
            continue;  // inside this slab for all t
        }
        double t1 = (lo - o) / d;
        double t2 = (hi - o) / d;
        if (t1 > t2) std::swap(t1, t2);
        t_enter = std::max(t_enter, t1);
        t_exit = std::min(t_exit, t2);
        if (t_enter > t_exit) return false;
    }
    return true;
}

std::optional<std::size_t> check_collision(const Vec3& p_from, const Vec3& p_to,
                                           const std::vector<ObstacleAABB>& obstacles) {
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if (segment_intersects_aabb(p_from, p_to, obstacles[i])) return i;
    }
    return std::nullopt;
}

double min_clearance(const Vec3& p, const std::vector<ObstacleAABB>& obstacles) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& box : obstacles) best = std::min(best, box.clearance(p));
    return best;
}

}  // namespace uavplan::env
