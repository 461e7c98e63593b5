#pragma once

// Clock-driven simulation of a NetworkInstance.
//
// Order of work inside one step [t, t + dt):
//   1. deliver spikes emitted `delay` earlier into each connection,
//   2. decay synapses and add the delivered jumps (noise included),
//   3. sum currents: I_const + noise + sum(sign * I_syn) in connection order,
//   4. advance every neuron, stamp crossings at t + dt,
//   5. store emitted spikes for later delivery.
// A spike emitted at time te reaches its targets in the step starting at
// te + delay.

#include "neurorhythm/kernels.hpp"
#include "neurorhythm/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nr {

struct TraceTarget {
    std::string population;
    std::uint32_t index = 0;

    bool operator==(const TraceTarget&) const = default;
};

struct SimulationConfig {
    double dt = 0.1;          // ms
    double duration = 1000.0; // ms
    bool record_spikes = true;
    std::vector<TraceTarget> trace_neurons;
    std::uint64_t trial_seed = 0; // seeds background noise streams

    bool operator==(const SimulationConfig&) const = default;
};

void validate(const SimulationConfig& config);

struct SpikeEvent {
    double t = 0.0; // ms
    std::uint32_t population = 0;
    std::uint32_t neuron = 0; // index within population

    bool operator==(const SpikeEvent&) const = default;
};

struct SpikeRecord {
    std::vector<std::string> populations; // labels, indexed by SpikeEvent::population
    std::vector<std::uint32_t> sizes;     // neurons per population
    std::vector<SpikeEvent> events;       // time-ordered
    double duration = 0.0;
    double dt = 0.0;

    std::optional<std::uint32_t> find(const std::string& label) const;
    std::uint32_t index_of(const std::string& label) const; // throws Error(Analysis)
    std::vector<double> times(std::uint32_t population) const;
    std::vector<double> times(std::uint32_t population, std::uint32_t neuron) const;

    bool operator==(const SpikeRecord&) const = default;
};

struct TraceSeries {
    TraceTarget target;
    std::vector<double> t, V, w;

    bool operator==(const TraceSeries&) const = default;
};

struct StateTrace {
    std::vector<TraceSeries> series;

    bool operator==(const StateTrace&) const = default;
};

struct RunResult {
    SpikeRecord spikes;
    std::optional<StateTrace> trace;
};

// Advances `instance` in place. Throws Error(Simulation) with time and
// neuron identity on any non-finite state.
RunResult run(NetworkInstance& instance, const SimulationConfig& config,
              const kernels::KernelTable& kernels = kernels::active_kernels());

// Trial k runs a fresh instance of `spec` with trial_seed =
// derive_trial_seed(seed_base, k). `threads` = 0 picks the hardware
// concurrency; 1 runs serially. Output order is by trial index.
std::vector<SpikeRecord> run_trials(const NetworkSpec& spec, const SimulationConfig& config, std::size_t n_trials,
                                    std::uint64_t seed_base, unsigned threads = 0);

} // namespace nr
