#include "uavplan/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "uavplan/rng.hpp"

namespace uavplan::io {

using ordered_json = nlohmann::ordered_json;

ScenarioTemplate parse_template(const std::string& name) {
    if (name == "paper_default") return ScenarioTemplate::paper_default;
    if (name == "small_desk") return ScenarioTemplate::small_desk;
    throw std::invalid_argument("unknown template '" + name +
                                "' (expected paper_default or small_desk)");
}

const char* template_name(ScenarioTemplate tpl) {
    return tpl == ScenarioTemplate::paper_default ? "paper_default" : "small_desk";
}

Scenario template_defaults(ScenarioTemplate tpl) {
    Scenario s;
    if (tpl == ScenarioTemplate::paper_default) {
        s.world_min = {0.0, 0.0, 0.0};
        s.world_max = {1000.0, 1000.0, 1000.0};
        s.depot = {0.0, 0.0, 0.0};
        s.v_max = 50.0;
        s.a_max = 20.0;
        s.delta = 1.0;
        s.epsilon = 5.0;
        s.hover_speed_tol = 0.1;
    } else {
        // Desk-scale world: centered depot and a wider hover band keep short
        // training runs meaningful.
        s.world_min = {0.0, 0.0, 0.0};
        s.world_max = {200.0, 200.0, 200.0};
        s.depot = {100.0, 100.0, 100.0};
        s.v_max = 20.0;
        s.a_max = 10.0;
        s.delta = 1.0;
        s.epsilon = 5.0;
        s.hover_speed_tol = 0.5;
    }
    return s;
}

Scenario generate_scenario(std::size_t K, std::size_t n_obstacles, std::uint64_t seed,
                           ScenarioTemplate tpl) {
    if (K < 1) throw std::invalid_argument("generate_scenario: K must be at least 1");
    constexpr int kMaxAttempts = 10000;

    Scenario s = template_defaults(tpl);
    s.seed = seed;
    Rng rng(seed);

    const double edge_lo = tpl == ScenarioTemplate::paper_default ? 50.0 : 15.0;
    const double edge_hi = tpl == ScenarioTemplate::paper_default ? 300.0 : 60.0;
    const double margin = s.epsilon;

    for (std::size_t i = 0; i < n_obstacles; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            Vec3 edges{rng.uniform(edge_lo, edge_hi), rng.uniform(edge_lo, edge_hi),
                       rng.uniform(edge_lo, edge_hi)};
            Vec3 p_min;
            for (std::size_t ax = 0; ax < 3; ++ax)
                p_min[ax] = rng.uniform(s.world_min[ax], s.world_max[ax] - edges[ax]);
            const ObstacleAABB box{p_min, p_min + edges};
            if (box.clearance(s.depot) < margin) continue;
            s.obstacles.push_back(box);
            placed = true;
        }
        if (!placed)
            throw std::runtime_error(
                "generate_scenario: obstacle placement failed after 10^4 attempts "
                "(obstacle " + std::to_string(i) + ", seed " + std::to_string(seed) + ")");
    }

    for (std::size_t k = 0; k < K; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            Vec3 p{rng.uniform(s.world_min.x, s.world_max.x),
                   rng.uniform(s.world_min.y, s.world_max.y),
                   rng.uniform(s.world_min.z, s.world_max.z)};
            if (env::min_clearance(p, s.obstacles) < margin) continue;
            if (distance(p, s.depot) <= 2.0 * s.epsilon) continue;
            bool apart = true;
            for (const auto& other : s.items)
                if (distance(p, other) <= s.epsilon) apart = false;
            if (!apart) continue;
            s.items.push_back(p);
            placed = true;
        }
        if (!placed)
            throw std::runtime_error(
                "generate_scenario: item placement failed after 10^4 attempts "
                "(item " + std::to_string(k) + ", seed " + std::to_string(seed) + ")");
    }

    s.validate_or_throw();
    return s;
}

namespace {

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const ordered_json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument(field + ": expected an array of 3 numbers");
    for (const auto& c : j)
        if (!c.is_number()) throw std::invalid_argument(field + ": expected numeric components");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double number_field(const ordered_json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument(key + ": missing required field");
    if (!j[key].is_number()) throw std::invalid_argument(key + ": expected a number");
    return j[key].get<double>();
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["version"] = 1;
    j["world_bounds"] = {{"min", vec_json(s.world_min)}, {"max", vec_json(s.world_max)}};
    j["depot"] = vec_json(s.depot);
    ordered_json items = ordered_json::array();
    for (const auto& item : s.items) items.push_back(vec_json(item));
    j["items"] = items;
    ordered_json obstacles = ordered_json::array();
    for (const auto& box : s.obstacles)
        obstacles.push_back({{"p_min", vec_json(box.p_min)}, {"p_max", vec_json(box.p_max)}});
    j["obstacles"] = obstacles;
    j["v_max"] = s.v_max;
    j["a_max"] = s.a_max;
    j["delta"] = s.delta;
    j["epsilon"] = s.epsilon;
    j["hover_speed_tol"] = s.hover_speed_tol;
    j["seed"] = s.seed;
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");

    static const char* known[] = {"version", "world_bounds", "depot",   "items",
                                  "obstacles", "v_max",       "a_max",  "delta",
                                  "epsilon",  "hover_speed_tol", "seed"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw std::invalid_argument(key + ": unknown field");
    }

    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1)
        throw std::invalid_argument("version: expected the integer 1");

    Scenario s;
    if (!j.contains("world_bounds") || !j["world_bounds"].is_object())
        throw std::invalid_argument("world_bounds: missing or not an object");
    s.world_min = vec_from_json(j["world_bounds"].value("min", ordered_json()), "world_bounds.min");
    s.world_max = vec_from_json(j["world_bounds"].value("max", ordered_json()), "world_bounds.max");
    if (!j.contains("depot")) throw std::invalid_argument("depot: missing required field");
    s.depot = vec_from_json(j["depot"], "depot");

    if (!j.contains("items") || !j["items"].is_array())
        throw std::invalid_argument("items: missing or not an array");
    for (std::size_t i = 0; i < j["items"].size(); ++i)
        s.items.push_back(vec_from_json(j["items"][i], "items[" + std::to_string(i) + "]"));

    if (!j.contains("obstacles") || !j["obstacles"].is_array())
        throw std::invalid_argument("obstacles: missing or not an array");
    for (std::size_t i = 0; i < j["obstacles"].size(); ++i) {
        const auto& jo = j["obstacles"][i];
        const std::string tag = "obstacles[" + std::to_string(i) + "]";
        if (!jo.is_object()) throw std::invalid_argument(tag + ": expected an object");
        ObstacleAABB box;
        box.p_min = vec_from_json(jo.value("p_min", ordered_json()), tag + ".p_min");
        box.p_max = vec_from_json(jo.value("p_max", ordered_json()), tag + ".p_max");
        s.obstacles.push_back(box);
    }

    s.v_max = number_field(j, "v_max");
    s.a_max = number_field(j, "a_max");
    s.delta = number_field(j, "delta");
    s.epsilon = number_field(j, "epsilon");
    s.hover_speed_tol = number_field(j, "hover_speed_tol");
    if (!j.contains("seed") || !j["seed"].is_number_unsigned())
        throw std::invalid_argument("seed: expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();

    s.validate_or_throw();
    return s;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_scenario: cannot open " + path);
    os << scenario_to_json(scenario);
    if (!os) throw std::runtime_error("save_scenario: write failed for " + path);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_scenario: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace uavplan::io
