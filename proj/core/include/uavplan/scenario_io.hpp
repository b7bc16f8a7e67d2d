#pragma once

#include <cstdint>
#include <string>

#include "uavplan/scenario.hpp"

namespace uavplan::io {

enum class ScenarioTemplate { paper_default, small_desk };

// Throws std::invalid_argument for anything but "paper_default"/"small_desk".
ScenarioTemplate parse_template(const std::string& name);
const char* template_name(ScenarioTemplate tpl);

// World box, depot and kinematic limits of the template, with no items or
// obstacles yet. paper_default is the kilometer-scale configuration;
// small_desk is a 200 m world sized for fast runs.
Scenario template_defaults(ScenarioTemplate tpl);

// Rejection-samples obstacles and items until every scenario invariant holds
// (item/depot clearance of at least epsilon from every obstacle, items more
// than epsilon apart and away from the depot). Deterministic per seed; throws
// after 10^4 failed placement attempts.
Scenario generate_scenario(std::size_t K, std::size_t n_obstacles, std::uint64_t seed,
                           ScenarioTemplate tpl);

// Versioned JSON document; serialize(parse(x)) is the identity on canonical
// documents. Parsing rejects unknown keys and invariant violations with
// messages naming the offending field.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace uavplan::io
