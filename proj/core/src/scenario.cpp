#include "uavplan/scenario.hpp"

#include <sstream>
#include <stdexcept>

namespace uavplan {

namespace {

bool strictly_outside(const Vec3& p, const ObstacleAABB& box) { return !box.contains(p); }

std::string vec_str(const Vec3& v) {
    std::ostringstream os;
    os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
    return os.str();
}

}  // namespace

std::vector<std::string> Scenario::validate() const {
    std::vector<std::string> problems;
    auto fail = [&problems](const std::string& msg) { problems.push_back(msg); };

    if (!(world_min.x < world_max.x && world_min.y < world_max.y && world_min.z < world_max.z))
        fail("world_bounds: min must be componentwise below max");
    if (items.empty()) fail("items: at least one item required (K >= 1)");
    if (!(v_max > 0.0)) fail("v_max: must be positive");
    if (!(a_max > 0.0)) fail("a_max: must be positive");
    if (!(delta > 0.0)) fail("delta: must be positive");
    if (!(epsilon > 0.0)) fail("epsilon: must be positive");
    if (!(hover_speed_tol >= 0.0)) fail("hover_speed_tol: must be nonnegative");
    if (hover_speed_tol >= v_max) fail("hover_speed_tol: must be below v_max");

    if (!point_in_bounds(depot)) fail("depot: outside world_bounds " + vec_str(depot));

    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const auto& box = obstacles[i];
        const std::string tag = "obstacles[" + std::to_string(i) + "]";
        if (!box.valid()) {
            fail(tag + ": p_min must be componentwise below p_max");
            continue;
        }
        if (!point_in_bounds(box.p_min) || !point_in_bounds(box.p_max))
            fail(tag + ": must lie within world_bounds");
        if (!strictly_outside(depot, box)) fail("depot: inside " + tag);
    }

    for (std::size_t k = 0; k < items.size(); ++k) {
        const std::string tag = "items[" + std::to_string(k) + "]";
        if (!items[k].finite()) {
            fail(tag + ": components must be finite");
            continue;
        }
        if (!point_in_bounds(items[k])) fail(tag + ": outside world_bounds " + vec_str(items[k]));
        for (std::size_t i = 0; i < obstacles.size(); ++i) {
            if (obstacles[i].valid() && !strictly_outside(items[k], obstacles[i]))
                fail(tag + ": inside obstacles[" + std::to_string(i) + "]");
        }
        for (std::size_t j = k + 1; j < items.size(); ++j) {
            if (distance(items[k], items[j]) <= epsilon)
                fail(tag + ": within epsilon of items[" + std::to_string(j) + "]");
        }
    }
    return problems;
}

void Scenario::validate_or_throw() const {
    const auto problems = validate();
    if (problems.empty()) return;
    std::ostringstream os;
    os << "invalid scenario:";
    for (const auto& p : problems) os << "\n  " << p;
    throw std::invalid_argument(os.str());
}

std::uint64_t scenario_fingerprint(const Scenario& scenario) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    auto mix_d = [&mix](double v) { mix(&v, sizeof(v)); };
    auto mix_v = [&mix_d](const Vec3& v) { mix_d(v.x); mix_d(v.y); mix_d(v.z); };

    mix_v(scenario.world_min);
    mix_v(scenario.world_max);
    mix_v(scenario.depot);
    for (const auto& item : scenario.items) mix_v(item);
    for (const auto& box : scenario.obstacles) {
        mix_v(box.p_min);
        mix_v(box.p_max);
    }
    mix_d(scenario.v_max);
    mix_d(scenario.a_max);
    mix_d(scenario.delta);
    mix_d(scenario.epsilon);
    mix_d(scenario.hover_speed_tol);
    return h;
}

}  // namespace uavplan
