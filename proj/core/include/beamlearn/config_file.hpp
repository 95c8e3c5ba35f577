// Flat key = value experiment configuration.
//
// One setting per line, '#' starts a comment, blank lines are ignored. Unknown keys
// and malformed values throw ConfigError naming the line. See config_keys() for the
// accepted keys.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamlearn/experiment.hpp"

namespace beamlearn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void load_config(std::istream& is, ExperimentConfig& cfg);
void load_config_file(const std::string& path, ExperimentConfig& cfg);

// Every accepted key, in the order write_config emits them.
std::vector<std::string> config_keys();

// Writes every key with its current value; load_config reads it back unchanged.
void write_config(std::ostream& os, const ExperimentConfig& cfg);
std::string config_to_json(const ExperimentConfig& cfg);

std::string to_string(RefinePolicy p);
std::string to_string(RefinerKind k);
std::string to_string(ChannelSource c);
RefinePolicy parse_policy(const std::string& s);

}  // namespace beamlearn
