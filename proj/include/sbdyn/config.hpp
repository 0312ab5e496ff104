// Flat key-value run configuration ("section.key = value"). Only documented
// keys are accepted; anything unknown is a hard error so that typos cannot
// silently change a run. A RunSpec serializes back to the same text form,
// and parse(serialize(x)) == x.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "sbdyn/bath.hpp"
#include "sbdyn/inchworm.hpp"
#include "sbdyn/spin.hpp"

namespace sbdyn::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// complete description of a run
struct RunSpec {
    spin::SystemSpec system;
    std::string rho_name = "up";               // up | down | mixed
    std::string observable_name = "sigma_z";   // sigma_z | sigma_x | sigma_y
    bath::BathSpec bath;
    double bath_table_step = 1e-3;
    bool literal_difference = false;
    inchworm::SolveSpec solver;
    int dyson_truncation = 4;
    long long dyson_samples_per_order = 100000;
    double t_final = 2.0;
    int n_steps = 20;
    std::string out_path;
    std::string table_path;
    std::string reference_path;

    double dt() const { return t_final / n_steps; }
    void validate() const;  // throws ConfigError
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values_file(const std::string& path);

// throws ConfigError on unknown keys or malformed values
RunSpec spec_from_key_values(const KeyValues& kv);

std::string serialize(const RunSpec& spec);

inline RunSpec parse_config(const std::string& text) {
    return spec_from_key_values(parse_key_values(text));
}

}  // namespace sbdyn::cli
