#pragma once

// CSV exports: spikes `t_ms,population,neuron`, traces
// `t_ms,population,neuron,V_mV,w_pA`, schedules `t_ms,channel`, plus
// rate/portrait tables for plotting. Numbers use the shortest text that
// parses back to the same double.

#include "neurorhythm/analysis.hpp"
#include "neurorhythm/engine.hpp"

#include <string>
#include <vector>

namespace nr {

std::string format_double(double x);

std::string spikes_to_csv(const SpikeRecord& record);
std::string trace_to_csv(const StateTrace& trace);
std::string rates_to_csv(const std::vector<std::string>& labels, const std::vector<RateSeries>& rates);
std::string portrait_to_csv(const PhasePortrait& portrait);

// Population order follows first appearance unless `known` lists labels
// (and sizes) up front; sizes of unknown populations are max index + 1.
// Malformed rows raise Error(Io) naming the 1-based line number.
struct KnownPopulation {
    std::string label;
    std::uint32_t n = 0;
};
SpikeRecord spikes_from_csv(const std::string& text, const std::vector<KnownPopulation>& known = {},
                            double duration = 0.0, double dt = 0.0);

std::string read_text_file(const std::string& path);

} // namespace nr
