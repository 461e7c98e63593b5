#pragma once

// Declarative network description and its seeded instantiation.

#include "neurorhythm/neuron.hpp"
#include "neurorhythm/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nr {

struct PopulationSpec {
    std::string label;
    std::uint32_t n = 1;
    NeuronParams neuron_params{};
    double I_const = 0.0;     // constant drive (pA)
    double noise_rate = 0.0;  // background Poisson rate per neuron (Hz)
    double noise_weight = 0.0; // pA per noise spike
    double noise_tau_s = 2.0; // noise synapse time constant (ms)
    double drive_onset = 0.0; // I_const switched on from this time (ms)

    bool operator==(const PopulationSpec&) const = default;
};

struct ConnectionSpec {
    std::string src;
    std::string dst;
    int sign = 1;
    double weight = 0.0; // pA
    double tau_s = 5.0;  // ms
    std::optional<std::uint32_t> fan_in{}; // nullopt: all source neurons
    double delay = 0.0;  // ms, a multiple of dt

    bool operator==(const ConnectionSpec&) const = default;
};

struct NetworkSpec {
    std::vector<PopulationSpec> populations;
    std::vector<ConnectionSpec> connections;
    double mismatch_cv = 0.1;
    std::uint64_t seed = 0;

    const PopulationSpec* find(const std::string& label) const;
    std::size_t total_neurons() const;

    bool operator==(const NetworkSpec&) const = default;
};

// Throws Error(Config) naming the offending population or connection.
void validate(const NetworkSpec& spec);

// Multiplies C, gL, VT - EL, tau_w and b by independent N(1, cv) factors,
// each redrawn until it is positive, inside [1 - 4cv, 1 + 4cv] and keeps
// the parameter set valid.
NeuronParams apply_mismatch(const NeuronParams& params, double cv, Rng& rng);

struct PopulationInstance {
    std::string label;
    std::uint32_t offset = 0; // first global neuron index
    std::uint32_t n = 0;
    double I_const = 0.0;
    double drive_onset = 0.0;
    double noise_rate = 0.0;
    double noise_weight = 0.0;
    double noise_tau_s = 2.0;

    bool operator==(const PopulationInstance&) const = default;
};

struct ConnectionInstance {
    std::uint32_t src = 0; // population index
    std::uint32_t dst = 0;
    SynapseParams synapse{};
    double delay = 0.0;
    bool all_to_all = true;
    // sources[t] lists source-population-local indices feeding target t
    // (empty when all_to_all).
    std::vector<std::vector<std::uint32_t>> sources;
    std::vector<double> I_syn; // one accumulated synapse per target neuron

    bool operator==(const ConnectionInstance&) const = default;
};

// Structure-of-arrays neuron storage.
struct NeuronArrays {
    std::vector<double> C, gL, EL, VT, DeltaT, Vpeak, Vreset, t_ref, a, b, tau_w;
    std::vector<double> V, w, ref;

    std::size_t size() const { return V.size(); }
    NeuronParams params(std::size_t i) const;
    NeuronState state(std::size_t i) const { return {V[i], w[i], ref[i]}; }
    void push_back(const NeuronParams& p);

    bool operator==(const NeuronArrays&) const = default;
};

struct NetworkInstance {
    std::vector<PopulationInstance> populations;
    std::vector<ConnectionInstance> connections;
    NeuronArrays neurons;
    std::vector<double> I_noise;

    std::uint32_t population_index(const std::string& label) const;
    // Back to the freshly built state: neurons at (EL, 0), synapses at 0.
    void reset();

    bool operator==(const NetworkInstance&) const = default;
};

NetworkInstance build_network(const NetworkSpec& spec);

} // namespace nr
