#pragma once

#include <optional>
#include <vector>

#include "uavplan/vec3.hpp"

namespace uavplan {

// Rectangular-cuboid obstacle given by the two diagonal vertices.
// The collision region is the closed box: a point is safe only if it lies
// strictly outside along at least one axis.
struct ObstacleAABB {
    Vec3 p_min;
    Vec3 p_max;

    bool valid() const {
        return p_min.finite() && p_max.finite() &&
               p_min.x < p_max.x && p_min.y < p_max.y && p_min.z < p_max.z;
    }

    bool contains(const Vec3& p) const {
        return p.x >= p_min.x && p.x <= p_max.x &&
               p.y >= p_min.y && p.y <= p_max.y &&
               p.z >= p_min.z && p.z <= p_max.z;
    }

    Vec3 center() const { return (p_min + p_max) * 0.5; }
    Vec3 half_extents() const { return (p_max - p_min) * 0.5; }

    // Euclidean distance from p to the box surface; 0 for points inside.
    double clearance(const Vec3& p) const {
        auto axis = [](double v, double lo, double hi) {
            return v < lo ? lo - v : (v > hi ? v - hi : 0.0);
        };
        Vec3 d{axis(p.x, p_min.x, p_max.x), axis(p.y, p_min.y, p_max.y),
               axis(p.z, p_min.z, p_max.z)};
        return d.norm();
    }

    ObstacleAABB inflated(double margin) const {
        Vec3 m{margin, margin, margin};
        return {p_min - m, p_max + m};
    }
};

namespace env {

// Exact slab (parametric) intersection of the segment [p_from, p_to] against
// the closed box. Waypoint-only checks tunnel through obstacles thinner than
// one slot of travel, so the whole swept segment is tested.
bool segment_intersects_aabb(const Vec3& p_from, const Vec3& p_to, const ObstacleAABB& box);

// Index of the first obstacle whose closed interior the segment touches.
std::optional<std::size_t> check_collision(const Vec3& p_from, const Vec3& p_to,
                                           const std::vector<ObstacleAABB>& obstacles);

// Distance to the nearest obstacle surface; +inf when there are none.
double min_clearance(const Vec3& p, const std::vector<ObstacleAABB>& obstacles);

}  // namespace env
}  // namespace uavplan
