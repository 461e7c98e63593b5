#pragma once

// JSON documents for specs, simulation settings and metrics. Parsing is
// strict: unknown keys are rejected, missing keys take their defaults.

#include "neurorhythm/analysis.hpp"
#include "neurorhythm/engine.hpp"
#include "neurorhythm/network.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>

namespace nr {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const NeuronParams& p);
Json to_json(const PopulationSpec& p);
Json to_json(const ConnectionSpec& c);
Json to_json(const NetworkSpec& spec); // carries schema_version
Json to_json(const SimulationConfig& c);
Json to_json(const OscillationMetrics& m);
Json to_json(const BurstParams& b);

NeuronParams neuron_params_from_json(const Json& j, const std::string& where = "neuron_params");
PopulationSpec population_from_json(const Json& j, const std::string& where = "population");
ConnectionSpec connection_from_json(const Json& j, const std::string& where = "connection");
NetworkSpec network_from_json(const Json& j);
SimulationConfig simulation_from_json(const Json& j);
OscillationMetrics metrics_from_json(const Json& j);
BurstParams burst_params_from_json(const Json& j, const std::string& where = "bursts");

std::string serialize(const NetworkSpec& spec); // pretty-printed document
NetworkSpec parse_network(std::string_view text);

// Error(Config) if `j` is not an object or holds a key outside `allowed`.
void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace nr
