#pragma once

// Reductions of a SpikeRecord to rates, bursts and rhythm metrics.

#include "neurorhythm/engine.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nr {

struct RateSeries {
    std::vector<double> t;    // bin centers (ms)
    std::vector<double> rate; // Hz per neuron
    double bin = 0.0;

    bool operator==(const RateSeries&) const = default;
};

// Histogram of spikes per bin divided by (n * bin), then convolved with a
// unit-mass triangular kernel of half-width smooth_width (0: no smoothing).
// Bins cover [0, duration); a spike at exactly `duration` lands in the last bin.
RateSeries population_rate(const SpikeRecord& record, const std::string& population, double bin,
                           double smooth_width);

struct Burst {
    double t_start = 0.0;
    double t_end = 0.0;
    std::uint32_t n_spikes = 0;
    std::uint32_t first = 0; // index of the first spike in the input sequence

    bool operator==(const Burst&) const = default;
};

// Maximal runs of consecutive spikes with gaps <= max_isi and at least
// min_spikes members. `spike_times` must be sorted.
std::vector<Burst> detect_bursts(const std::vector<double>& spike_times, double max_isi, std::uint32_t min_spikes);

struct BurstParams {
    double max_isi = 100.0;
    std::uint32_t min_spikes = 3;

    bool operator==(const BurstParams&) const = default;
};

struct OscillationMetrics {
    double freq = 0.0;                                       // Hz
    std::map<std::string, std::vector<double>> cycle_onsets; // per phase population (ms)
    std::array<double, 2> offsets{};                         // median P2 - P1, P3 - P1 (ms)
    double jitter_std = 0.0;                                 // sample std of P1 periods (ms)
    std::uint32_t n_cycles = 0;                              // complete cycles used for offsets
    std::uint32_t n_excluded = 0;                            // cycles missing a phase
    std::uint32_t order_violations = 0;                      // complete cycles not ordered P1 < P2 < P3
    double period = 0.0;                                     // median P1 inter-onset interval (ms)

    bool operator==(const OscillationMetrics&) const = default;
};

// Cycles are delimited by consecutive P1 burst onsets. Within cycle
// [s_k, s_k+1) the first burst onset of each other phase is taken; a cycle
// lacking one is excluded. freq = 1000 / median P1 period.
// One to three phase labels; offsets of absent phases stay 0.
// Bursts starting before t_from are ignored.
// Throws Error(Analysis) with fewer than two P1 bursts.
OscillationMetrics oscillation_metrics(const SpikeRecord& record, const std::vector<std::string>& phase_pops,
                                       const BurstParams& bursts, double t_from = 0.0);

struct PortraitPoint {
    double e = 0.0;
    double i = 0.0;

    bool operator==(const PortraitPoint&) const = default;
};

struct PhasePortrait {
    std::array<std::vector<PortraitPoint>, 2> loops; // raw (E rate, I rate) samples per cycle
    double similarity = 0.0; // mean distance between phase-resampled normalized loops
    double diameter = 0.0;   // largest point distance within the normalized loops

    bool operator==(const PhasePortrait&) const = default;
};

// Loops for the two adjacent cycles [t0, t1) and [t1, t2). For the score
// both rates are divided by their maximum over the two cycles, each loop
// is resampled at kPortraitSamples equally spaced cycle phases, and the
// pointwise Euclidean distances are averaged.
inline constexpr std::size_t kPortraitSamples = 200;
PhasePortrait phase_portrait(const RateSeries& rateE, const RateSeries& rateI, const std::array<double, 3>& bounds);

double median(std::vector<double> v);
double sample_std(const std::vector<double>& v);

} // namespace nr
