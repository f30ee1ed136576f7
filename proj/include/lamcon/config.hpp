#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lamcon/builders.hpp"

namespace lamcon {

/// Batch experiment description, parsed from a key-value text file.
/// Unknown keys are hard errors; the format round-trips losslessly.
struct ExperimentConfig {
    int schema_version = 1;
    std::string name = "experiment";
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    Domain domain = Domain::unit_torus(64, 64);

    Target target = Target::S3;
    std::string solver = "constant";  // constant | gordon_strip
    cplx q0{1.0, 0.0};
    double u0 = 0.0;   // strip initial value ("min" resolved before parse)
    double du0 = 0.0;  // strip initial slope
    bool u0_at_minimum = false;

    std::vector<std::string> pipeline;  // build, energy, twist, dual, residue, lightcone
    std::map<std::string, double> tolerances;
    std::vector<std::string> report_formats{"json"};
};

struct ConfigParseError : Error {
    using Error::Error;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);

cplx parse_complex(const std::string& s);
std::string format_complex(cplx v);

}  // namespace lamcon
