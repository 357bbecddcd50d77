#pragma once

#include <string>

#include <json.hpp>

#include "rgl/distribution.hpp"
#include "rgl/format.hpp"

namespace rgl {

// Textual distribution specs, e.g.
//   bernoulli:p=0.5
//   uniform:a=0,b=1
//   gaussian:mu=0,sigma=1
//   discrete:values=0,1,2;masses=0.3,0.3,0.4
//   mixed:cont=uniform(0,1);w=0.5;atoms=0:0.25,1:0.25
// Numbers are printed in shortest round-trip form, so
// parse(to_string(d)) reproduces d exactly.
PayoffDistribution parse_dist_spec(const std::string& spec);
std::string dist_spec_string(const PayoffDistribution& d);

nlohmann::ordered_json dist_to_json(const PayoffDistribution& d);
PayoffDistribution dist_from_json(const nlohmann::json& j);

}  // namespace rgl
