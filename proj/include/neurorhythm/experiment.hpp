#pragma once

// Experiment documents: a network (preset + params, or inline spec), the
// simulation settings, the analysis to run and which files to write.
//
//   {
//     "schema_version": 1,
//     "network":    {"preset": "symmetric-1hz", "params": {...}}  |  {"spec": {...}},
//     "simulation": {"dt": 0.1, "duration": 36000, ...},
//     "analysis":   {"bursts": {...}, "phases": [...], "t_from": 0, ...},
//     "outputs":    {"directory": "out", "spikes": true, ...}
//   }

#include "neurorhythm/analysis.hpp"
#include "neurorhythm/config.hpp"
#include "neurorhythm/primitives.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nr {

inline constexpr const char* kToolName = "neurorhythm";
inline constexpr const char* kToolVersion = "0.1.0";

struct AnalysisConfig {
    BurstParams bursts{};
    std::vector<std::string> phases; // 1..3 labels, empty: no rhythm metrics
    double t_from = 0.0;             // ms, bursts before this are ignored
    double rate_bin = 5.0;           // ms
    double rate_smooth = 20.0;       // ms
    std::optional<std::array<std::string, 2>> portrait; // E, I populations
    bool cardiac = false;            // stimulation schedule from phases (RA, LA, V)

    bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    bool spikes = true;
    bool rates = true;
    bool trace = true;

    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    Json network; // normalized network section
    NetworkSpec spec;
    SimulationConfig simulation;
    AnalysisConfig analysis;
    OutputConfig outputs;

    Json to_json() const; // normalized document
};

// Strict: unknown keys anywhere raise Error(Config). Preset params are
// filled with their defaults and the network is built and validated.
ExperimentConfig parse_experiment(const Json& doc);
ExperimentConfig load_experiment(const std::string& path);

// Default parameter object for a preset name.
Json preset_params(const std::string& name);
NetworkSpec build_preset(const std::string& name, const Json& params);

// Sets a numeric field addressed by a dotted key ("network.params.drive",
// "simulation.duration", "network.spec.populations.0.I_const") and
// re-validates. Error(Config) if the key does not resolve to a number.
ExperimentConfig with_value(const ExperimentConfig& cfg, const std::string& dotted_key, double value);

// Network seed (preset params or inline spec) and simulation trial seed.
ExperimentConfig with_seed(const ExperimentConfig& cfg, std::uint64_t seed);
ExperimentConfig with_dt(const ExperimentConfig& cfg, double dt);

struct BurstStats {
    std::uint32_t n_bursts = 0;
    double median_duration = 0.0; // ms
    double median_interval = 0.0; // ms, end of one burst to start of the next

    bool operator==(const BurstStats&) const = default;
};

struct AnalysisResult {
    std::optional<OscillationMetrics> metrics;
    std::map<std::string, BurstStats> bursts;
    std::vector<std::pair<std::string, RateSeries>> rates;
    std::optional<PhasePortrait> portrait;
    std::optional<StimulationSchedule> schedule;
    std::optional<CardiacDelays> cardiac;
};

// Pure function of the record. Throws Error(Analysis) when rhythm metrics
// are requested but unavailable.
AnalysisResult analyze(const ExperimentConfig& cfg, const SpikeRecord& record);

struct ExperimentResult {
    RunResult run;
    AnalysisResult analysis;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes spikes.csv, metrics.json, bursts.json, rates.csv, portrait.csv,
// portrait.json, schedule.csv, trace.csv and manifest.json as applicable.
void write_run_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& result);
void write_analysis_outputs(const std::string& dir, const ExperimentConfig& cfg, const AnalysisResult& a);
void write_manifest(const std::string& dir, const ExperimentConfig& cfg);

// 16 hex digits, FNV-1a of the normalized document minus outputs.directory
std::string config_hash(const ExperimentConfig& cfg);

struct SweepRow {
    double value = 0.0;
    double freq = 0.0;
    double jitter_std = 0.0;
    std::uint32_t n_cycles = 0;
    std::string status; // "ok", "no oscillation" or "<ErrorClass>: message"
};

// One row per value, sorted by value. Rows run on up to `threads` threads
// (0: hardware concurrency); a failing row does not abort the others.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& dotted_key,
                                const std::vector<double>& values, unsigned threads = 0);
std::string sweep_to_csv(const std::string& dotted_key, const std::vector<SweepRow>& rows);

std::vector<std::string> demo_names();
Json demo_config(const std::string& name); // throws Error(Config) for unknown demos

} // namespace nr
