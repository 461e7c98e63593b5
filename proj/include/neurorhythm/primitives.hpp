#pragma once

// Rhythm-generating circuits built from populations: half-center CPG,
// excitatory/inhibitory oscillator, three-phase arrangements and the
// cardiac stimulation schedule derived from a three-phase record.

#include "neurorhythm/analysis.hpp"
#include "neurorhythm/network.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nr {

enum class CpgMode { Release, Escape };

std::string_view to_string(CpgMode mode);
CpgMode cpg_mode_from_string(std::string_view s); // throws Error(Config)

// Two excitatory pools P1_E / P2_E with mutual inhibition.
// Spike-triggered adaptation follows the drive:
//   b_eff = max(0, b + adaptation_slope * (drive - drive_ref))
// so a sweep over `drive` alone is a joint drive/adaptation sweep.
// Escape adds subthreshold adaptation (a = kEscapeA), Release keeps a = 0.
struct HalfCenterParams {
    CpgMode mode = CpgMode::Escape;
    double drive = 500.0;           // pA
    double b = 5.0;                 // pA
    double tau_w = 600.0;           // ms
    double adaptation_slope = 0.18; // pA of b per pA of drive
    double drive_ref = 500.0;       // pA
    double inhibition_weight = 130.0;
    double inhibition_tau_s = 10.0;
    std::uint32_t n = 4;
    double p2_onset = 50.0; // ms, P2 drive delayed to break symmetry
    double mismatch_cv = 0.1;
    std::uint64_t seed = 2;

    bool operator==(const HalfCenterParams&) const = default;
};

inline constexpr double kEscapeA = 2.0; // nS

NetworkSpec build_half_center_cpg(const HalfCenterParams& p);

// One E population with recurrent excitation and drive, one I population
// fed by E and inhibiting E. Labels <prefix>_E, <prefix>_I.
struct OscillatorParams {
    std::uint32_t n_e = 16;
    std::uint32_t n_i = 4;
    double drive = 700.0; // pA, ~1 Hz
    double w_ee = 120.0, tau_ee = 5.0;
    double w_ei = 20.0, tau_ei = 5.0;
    double w_ie = 3000.0, tau_ie = 300.0;
    double drive_onset = 0.0;
    NeuronParams neuron{}; // b = 0: no adaptation
    double mismatch_cv = 0.1;
    std::uint64_t seed = 1;

    bool operator==(const OscillatorParams&) const = default;
};

NetworkSpec build_neural_oscillator(const OscillatorParams& p, const std::string& prefix = "P1");

// Measured cv = 0 drive -> frequency map of the default oscillator.
double oscillator_drive_for(double freq_hz); // throws Error(Config) out of range
double oscillator_freq_for(double drive_pA);

using Matrix = std::vector<std::vector<double>>;

struct CouplingOptions {
    Matrix ee_delay; // ms per E->E entry; empty: all zero
    double tau_ee = 5.0;
    double tau_ii = 10.0;
};

// Units must each hold exactly one *_E and one *_I population. They are
// relabelled P1..Pk; ee[s][d] > 0 adds Ps_E -> Pd_E (+), ii[s][d] > 0
// adds Ps_I -> Pd_I (-). Network-level mismatch and seed come from units[0].
NetworkSpec couple_oscillators(const std::vector<NetworkSpec>& units, const Matrix& ee, const Matrix& ii,
                               const CouplingOptions& opts = {});

enum class ThreePhaseKind { CpgUnit, NeuralOscillator };
enum class ThreePhaseLayout { Ring, Pacemaker };

std::string_view to_string(ThreePhaseKind k);
std::string_view to_string(ThreePhaseLayout l);
ThreePhaseKind three_phase_kind_from_string(std::string_view s);
ThreePhaseLayout three_phase_layout_from_string(std::string_view s);

// Ring: three units in a loop, each launching the next (oscillator kind:
// delayed E->E excitation; CPG kind: asymmetric cross-inhibition).
// Pacemaker (oscillator kind only): P1 free-running at target_freq, P2 and
// P3 excitable and triggered feed-forward; the P3 -> next P1 interval is
// whatever remains of the cycle.
struct ThreePhaseSpec {
    ThreePhaseKind kind = ThreePhaseKind::NeuralOscillator;
    ThreePhaseLayout layout = ThreePhaseLayout::Ring;
    double target_freq = 1.0;                            // Hz
    std::vector<double> phase_offsets{1000.0 / 3.0, 2000.0 / 3.0}; // ms after P1 onset
    std::uint32_t n_e = 16;
    std::uint32_t n_i = 4;
    std::optional<double> drive{};           // pA, preset when empty
    std::optional<double> coupling_weight{}; // pA, preset when empty
    double noise_rate = 0.0;               // Hz per E neuron
    double noise_weight = 50.0;            // pA
    double mismatch_cv = 0.1;
    std::uint64_t seed = 2;

    bool operator==(const ThreePhaseSpec&) const = default;
};

// Response latency from an arriving kick to the burst onset it triggers.
inline constexpr double kRingLatency = 12.0;     // ms, ring E->E weight 50
inline constexpr double kTriggerLatency12 = 8.6; // ms, pacemaker P1 -> P2 weight 300
inline constexpr double kTriggerLatency23 = 5.4; // ms, pacemaker P2 -> P3 weight 300
inline constexpr double kBurstWidth = 60.0;      // ms, oscillator E burst

NetworkSpec build_three_phase(const ThreePhaseSpec& spec);

// Fig. 4 style CPG: measured cv = 0 forward-inhibition -> frequency map.
double cpg_ring_inhibition_for(double freq_hz); // throws Error(Config) out of range

enum class Channel { RA, LA, V };
std::string_view to_string(Channel c);

struct StimulationEvent {
    double t = 0.0;
    Channel channel = Channel::RA;

    bool operator==(const StimulationEvent&) const = default;
};

struct StimulationSchedule {
    std::vector<StimulationEvent> events; // time-ordered
    std::uint32_t n_cycles = 0;           // cycles emitted
    std::uint32_t skipped_cycles = 0;     // cycles lacking a phase or out of order

    bool operator==(const StimulationSchedule&) const = default;
};

// mapping[c] is the population whose burst onsets stimulate channel c
// (RA, LA, V). A cycle runs from one RA onset to the next; the final RA
// onset closes at the record end and is dropped if incomplete.
StimulationSchedule cardiac_schedule(const SpikeRecord& record,
                                     const std::array<std::string, 3>& mapping = {"P1_E", "P2_E", "P3_E"},
                                     const BurstParams& bursts = {}, double t_from = 0.0);

std::string schedule_to_csv(const StimulationSchedule& schedule); // header t_ms,channel

struct CardiacDelays {
    double la_ra = 0.0;    // median LA - RA (ms)
    double v_ra = 0.0;     // median V - RA (ms)
    double long_gap = 0.0; // median next RA - V (ms)
    std::uint32_t n_cycles = 0;

    bool operator==(const CardiacDelays&) const = default;
};

CardiacDelays cardiac_delays(const StimulationSchedule& schedule);

// drive = I_min + physio * (I_max - I_min).
double modulate_frequency(double physio, double I_min, double I_max);
// Sets I_const of every population whose label ends in "_E" and has drive.
void apply_drive(NetworkSpec& spec, double drive);

// Named presets.
std::vector<std::string> preset_names();
NetworkSpec preset(const std::string& name); // throws Error(Config) for unknown names

} // namespace nr
