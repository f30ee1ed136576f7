#pragma once

#include <string>

#include <json.hpp>

#include "lamcon/builders.hpp"
#include "lamcon/laurent.hpp"

namespace lamcon {

using json = nlohmann::ordered_json;

json domain_to_json(const Domain& dom);
Domain domain_from_json(const json& j);

// Self-describing container: magic "LCF1", a 4-byte little-endian header
// length, a JSON header, then raw row-major complex arrays stored as pairs
// of little-endian 64-bit floats.

void save_grid_field(const GridField& f, const std::string& path);
GridField load_grid_field(const std::string& path);

void save_family(const LambdaFamily& fam, const std::string& path);
LambdaFamily load_family(const std::string& path);

void save_solution(const SolutionData& sol, const std::string& path);
SolutionData load_solution(const std::string& path);

}  // namespace lamcon
