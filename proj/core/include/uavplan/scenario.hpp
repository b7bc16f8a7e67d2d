#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavplan/geometry.hpp"
#include "uavplan/vec3.hpp"

namespace uavplan {

// World description shared by every planner: geometry, kinematic limits and
// the collection threshold. Instances are immutable once validated.
struct Scenario {
    Vec3 world_min;
    Vec3 world_max;
    Vec3 depot;
    std::vector<Vec3> items;
    std::vector<ObstacleAABB> obstacles;
    double v_max = 50.0;            // m/s
    double a_max = 20.0;            // m/s^2
    double delta = 1.0;             // slot length, s
    double epsilon = 5.0;           // collecting threshold, m
    double hover_speed_tol = 0.1;   // speeds at or below this snap to zero, m/s
    std::uint64_t seed = 0;         // seed the scenario was generated from

    std::size_t item_count() const { return items.size(); }
    Vec3 world_extent() const { return world_max - world_min; }
    double world_diagonal() const { return world_extent().norm(); }

    bool point_in_bounds(const Vec3& p) const {
        return p.x >= world_min.x && p.x <= world_max.x &&
               p.y >= world_min.y && p.y <= world_max.y &&
               p.z >= world_min.z && p.z <= world_max.z;
    }

    // Every violated invariant, one message each, named by field.
    std::vector<std::string> validate() const;

    // Throws std::invalid_argument listing all violations.
    void validate_or_throw() const;
};

// FNV-1a over the raw field bytes; identifies which world a policy was
// trained for.
std::uint64_t scenario_fingerprint(const Scenario& scenario);

}  // namespace uavplan
