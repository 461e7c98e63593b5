#include "neurorhythm/primitives.hpp"

#include "neurorhythm/csv.hpp"
#include "neurorhythm/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace nr {

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

// Piecewise-linear lookup in a table sorted by `x`.
double interpolate(const std::vector<std::pair<double, double>>& table, double x) {
    for (std::size_t k = 0; k + 1 < table.size(); ++k) {
        const auto [x0, y0] = table[k];
        const auto [x1, y1] = table[k + 1];
        if (x >= x0 && x <= x1) return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    return x < table.front().first ? table.front().second : table.back().second;
}

// cv = 0, default OscillatorParams, drive (pA) -> Hz.
const std::vector<std::pair<double, double>> kOscillatorTable = {
    {200, 0.4810}, {250, 0.6043}, {300, 0.6760}, {400, 0.7777}, {500, 0.8557},  {600, 0.9219},  {700, 0.9808},
    {800, 1.0347}, {1000, 1.1324}, {1200, 1.2204}, {1600, 1.3799}, {2000, 1.5244}, {2500, 1.6935}, {3000, 1.8527}};

// cv = 0 three-phase CPG ring, forward inhibition (pA) -> Hz (decreasing).
const std::vector<std::pair<double, double>> kCpgRingTable = {
    {80, 1.80}, {100, 1.27}, {120, 0.98}, {130, 0.89}, {150, 0.77}, {180, 0.64}, {200, 0.59}, {250, 0.48}};

constexpr double kRingUnitDrive = 250.0;
constexpr double kRingWeight = 50.0;
constexpr double kTriggerWeight = 300.0;
constexpr double kCpgUnitDrive = 500.0;
constexpr double kCpgBackInhibition = 1000.0;

} // namespace

std::string_view to_string(CpgMode mode) { return mode == CpgMode::Escape ? "escape" : "release"; }

CpgMode cpg_mode_from_string(std::string_view s) {
    if (s == "escape") return CpgMode::Escape;
    if (s == "release") return CpgMode::Release;
    fail(ErrorKind::Config, "unknown cpg mode '" + std::string(s) + "' (escape|release)");
}

NetworkSpec build_half_center_cpg(const HalfCenterParams& p) {
    if (p.n < 1) fail(ErrorKind::Config, "half-center: n must be >= 1");
    if (!(p.inhibition_weight >= 0)) fail(ErrorKind::Config, "half-center: inhibition weight must be >= 0");
    if (!(p.drive >= 0)) fail(ErrorKind::Config, "half-center: drive must be >= 0");
    NeuronParams np;
    np.tau_w = p.tau_w;
    np.b = std::max(0.0, p.b + p.adaptation_slope * (p.drive - p.drive_ref));
    np.a = p.mode == CpgMode::Escape ? kEscapeA : 0.0;

    NetworkSpec s;
    s.mismatch_cv = p.mismatch_cv;
    s.seed = p.seed;
    PopulationSpec a{"P1_E", p.n, np, p.drive};
    PopulationSpec b{"P2_E", p.n, np, p.drive};
    b.drive_onset = p.p2_onset;
    s.populations = {a, b};
    if (p.inhibition_weight > 0) {
        s.connections.push_back({"P1_E", "P2_E", -1, p.inhibition_weight, p.inhibition_tau_s});
        s.connections.push_back({"P2_E", "P1_E", -1, p.inhibition_weight, p.inhibition_tau_s});
    }
    validate(s);
    return s;
}

NetworkSpec build_neural_oscillator(const OscillatorParams& p, const std::string& prefix) {
    if (p.n_e < 1 || p.n_i < 1) fail(ErrorKind::Config, "oscillator: n_e and n_i must be >= 1");
    NetworkSpec s;
    s.mismatch_cv = p.mismatch_cv;
    s.seed = p.seed;
    const std::string E = prefix + "_E", I = prefix + "_I";
    PopulationSpec e{E, p.n_e, p.neuron, p.drive};
    e.drive_onset = p.drive_onset;
    s.populations = {e, PopulationSpec{I, p.n_i, p.neuron, 0.0}};
    s.connections = {{E, E, 1, p.w_ee, p.tau_ee}, {E, I, 1, p.w_ei, p.tau_ei}, {I, E, -1, p.w_ie, p.tau_ie}};
    validate(s);
    return s;
}

double oscillator_drive_for(double freq_hz) {
    std::vector<std::pair<double, double>> inv;
    for (auto [d, f] : kOscillatorTable) inv.emplace_back(f, d);
    if (!(freq_hz >= inv.front().first && freq_hz <= inv.back().first))
        fail(ErrorKind::Config, "oscillator: target frequency " + fmt(freq_hz) + " Hz outside calibrated [" +
                                    fmt(inv.front().first) + ", " + fmt(inv.back().first) + "] Hz");
    return interpolate(inv, freq_hz);
}

double oscillator_freq_for(double drive_pA) { return interpolate(kOscillatorTable, drive_pA); }

double cpg_ring_inhibition_for(double freq_hz) {
    std::vector<std::pair<double, double>> inv;
    for (auto [w, f] : kCpgRingTable) inv.emplace_back(f, w);
    std::sort(inv.begin(), inv.end());
    if (!(freq_hz >= inv.front().first && freq_hz <= inv.back().first))
        fail(ErrorKind::Config, "three-phase cpg: target frequency " + fmt(freq_hz) + " Hz outside calibrated [" +
                                    fmt(inv.front().first) + ", " + fmt(inv.back().first) + "] Hz");
    return interpolate(inv, freq_hz);
}

NetworkSpec couple_oscillators(const std::vector<NetworkSpec>& units, const Matrix& ee, const Matrix& ii,
                               const CouplingOptions& opts) {
    const std::size_t k = units.size();
    if (k == 0) fail(ErrorKind::Config, "couple_oscillators: no units");
    auto check_matrix = [&](const Matrix& m, const char* name) {
        if (m.size() != k) fail(ErrorKind::Config, std::string("couple_oscillators: ") + name + " must be " +
                                                       std::to_string(k) + "x" + std::to_string(k));
        for (std::size_t r = 0; r < k; ++r) {
            if (m[r].size() != k)
                fail(ErrorKind::Config, std::string("couple_oscillators: ") + name + " row " + std::to_string(r) +
                                            " has " + std::to_string(m[r].size()) + " entries, expected " +
                                            std::to_string(k));
            if (m[r][r] != 0) fail(ErrorKind::Config, std::string("couple_oscillators: ") + name + " diagonal must be zero");
            for (double x : m[r])
                if (!(x >= 0) || !std::isfinite(x))
                    fail(ErrorKind::Config, std::string("couple_oscillators: ") + name + " entries must be >= 0");
        }
    };
    check_matrix(ee, "ee_weights");
    check_matrix(ii, "ii_weights");
    if (!opts.ee_delay.empty()) check_matrix(opts.ee_delay, "ee_delay");

    NetworkSpec out;
    out.mismatch_cv = units[0].mismatch_cv;
    out.seed = units[0].seed;
    for (std::size_t u = 0; u < k; ++u) {
        const auto& unit = units[u];
        if (unit.populations.size() != 2)
            fail(ErrorKind::Config, "couple_oscillators: unit " + std::to_string(u) + " is not oscillator-shaped");
        const std::string prefix = "P" + std::to_string(u + 1);
        std::map<std::string, std::string> rename;
        for (const auto& p : unit.populations) {
            std::string to;
            if (ends_with(p.label, "_E")) to = prefix + "_E";
            else if (ends_with(p.label, "_I")) to = prefix + "_I";
            else fail(ErrorKind::Config, "couple_oscillators: unit " + std::to_string(u) + " population '" + p.label +
                                             "' is neither *_E nor *_I");
            if (!rename.emplace(p.label, to).second)
                fail(ErrorKind::Config, "couple_oscillators: label collision on '" + p.label + "'");
            for (const auto& [from, other] : rename)
                if (from != p.label && other == to)
                    fail(ErrorKind::Config, "couple_oscillators: unit " + std::to_string(u) + " has two " +
                                                to.substr(to.size() - 2) + " populations");
            PopulationSpec q = p;
            q.label = to;
            out.populations.push_back(q);
        }
        for (const auto& c : unit.connections) {
            ConnectionSpec q = c;
            q.src = rename.at(c.src);
            q.dst = rename.at(c.dst);
            out.connections.push_back(q);
        }
    }
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t d = 0; d < k; ++d) {
            const std::string ps = "P" + std::to_string(s + 1), pd = "P" + std::to_string(d + 1);
            if (ee[s][d] > 0) {
                ConnectionSpec c{ps + "_E", pd + "_E", 1, ee[s][d], opts.tau_ee};
                if (!opts.ee_delay.empty()) c.delay = opts.ee_delay[s][d];
                out.connections.push_back(c);
            }
            if (ii[s][d] > 0) out.connections.push_back({ps + "_I", pd + "_I", -1, ii[s][d], opts.tau_ii});
        }
    validate(out);
    return out;
}

std::string_view to_string(ThreePhaseKind k) { return k == ThreePhaseKind::CpgUnit ? "cpg" : "oscillator"; }
std::string_view to_string(ThreePhaseLayout l) { return l == ThreePhaseLayout::Ring ? "ring" : "pacemaker"; }

ThreePhaseKind three_phase_kind_from_string(std::string_view s) {
    if (s == "cpg") return ThreePhaseKind::CpgUnit;
    if (s == "oscillator") return ThreePhaseKind::NeuralOscillator;
    fail(ErrorKind::Config, "unknown three-phase kind '" + std::string(s) + "' (cpg|oscillator)");
}

ThreePhaseLayout three_phase_layout_from_string(std::string_view s) {
    if (s == "ring") return ThreePhaseLayout::Ring;
    if (s == "pacemaker") return ThreePhaseLayout::Pacemaker;
    fail(ErrorKind::Config, "unknown three-phase layout '" + std::string(s) + "' (ring|pacemaker)");
}

namespace {

void add_noise(NetworkSpec& s, double rate, double weight) {
    if (rate <= 0) return;
    for (auto& p : s.populations)
        if (ends_with(p.label, "_E")) {
            p.noise_rate = rate;
            p.noise_weight = weight;
        }
}

NetworkSpec three_phase_cpg(const ThreePhaseSpec& sp, double T) {
    if (sp.layout != ThreePhaseLayout::Ring) fail(ErrorKind::Config, "three-phase cpg: only the ring layout exists");
    const double o2 = sp.phase_offsets[0], o3 = sp.phase_offsets[1];
    if (std::abs(o2 - T / 3) > 0.1 * T || std::abs(o3 - 2 * T / 3) > 0.1 * T)
        fail(ErrorKind::Config, "three-phase cpg: offsets (" + fmt(o2) + ", " + fmt(o3) +
                                    ") ms unreachable; the cpg ring gives (T/3, 2T/3) +- 10% of T with T = " +
                                    fmt(T) + " ms");
    const double wf = sp.coupling_weight ? *sp.coupling_weight : cpg_ring_inhibition_for(sp.target_freq);
    NeuronParams np;
    np.b = 10.0;
    np.tau_w = 1200.0;
    const double drive = sp.drive ? *sp.drive : kCpgUnitDrive;
    NetworkSpec s;
    s.mismatch_cv = sp.mismatch_cv;
    s.seed = sp.seed;
    const std::array<std::string, 3> L{"P1_E", "P2_E", "P3_E"};
    for (int k = 0; k < 3; ++k) {
        PopulationSpec p{L[k], sp.n_e, np, drive};
        p.drive_onset = 100.0 * k;
        s.populations.push_back(p);
    }
    for (int k = 0; k < 3; ++k) {
        s.connections.push_back({L[k], L[(k + 1) % 3], -1, wf, 10.0});
        s.connections.push_back({L[k], L[(k + 2) % 3], -1, kCpgBackInhibition, 10.0});
    }
    add_noise(s, sp.noise_rate, sp.noise_weight);
    validate(s);
    return s;
}

NetworkSpec three_phase_ring(const ThreePhaseSpec& sp, double T) {
    const double o2 = sp.phase_offsets[0], o3 = sp.phase_offsets[1];
    const std::array<double, 3> gaps{o2, o3 - o2, T - o3};
    for (double g : gaps)
        if (g < kBurstWidth)
            fail(ErrorKind::Config, "three-phase ring: offsets (" + fmt(o2) + ", " + fmt(o3) +
                                        ") ms unreachable at " + fmt(sp.target_freq) +
                                        " Hz; every inter-phase gap must be >= " + fmt(kBurstWidth) + " ms");
    const double drive = sp.drive ? *sp.drive : kRingUnitDrive;
    const double intrinsic = oscillator_freq_for(drive);
    if (intrinsic > 0.9 * sp.target_freq)
        fail(ErrorKind::Config, "three-phase ring: units at " + fmt(drive) + " pA run at ~" + fmt(intrinsic) +
                                    " Hz; target must exceed " + fmt(intrinsic / 0.9) + " Hz");
    std::vector<NetworkSpec> units;
    for (int k = 0; k < 3; ++k) {
        OscillatorParams op;
        op.n_e = sp.n_e;
        op.n_i = sp.n_i;
        op.drive = drive;
        op.drive_onset = k == 0 ? 0.0 : 0.9 * sp.phase_offsets[k - 1];
        op.mismatch_cv = sp.mismatch_cv;
        op.seed = sp.seed;
        units.push_back(build_neural_oscillator(op));
    }
    const double w = sp.coupling_weight ? *sp.coupling_weight : kRingWeight;
    Matrix ee(3, std::vector<double>(3, 0.0)), ii = ee, delay = ee;
    for (int k = 0; k < 3; ++k) {
        ee[k][(k + 1) % 3] = w;
        delay[k][(k + 1) % 3] = std::max(0.0, std::round(gaps[k] - kRingLatency));
    }
    CouplingOptions opts;
    opts.ee_delay = delay;
    auto s = couple_oscillators(units, ee, ii, opts);
    add_noise(s, sp.noise_rate, sp.noise_weight);
    return s;
}

NetworkSpec three_phase_pacemaker(const ThreePhaseSpec& sp, double T) {
    const double o2 = sp.phase_offsets[0], o3 = sp.phase_offsets[1];
    if (o2 < kTriggerLatency12 || o3 - o2 < kTriggerLatency23)
        fail(ErrorKind::Config, "three-phase pacemaker: offsets (" + fmt(o2) + ", " + fmt(o3) +
                                    ") ms unreachable; need P2 >= " + fmt(kTriggerLatency12) + " ms and P3 - P2 >= " +
                                    fmt(kTriggerLatency23) + " ms");
    if (T - o3 < kBurstWidth)
        fail(ErrorKind::Config, "three-phase pacemaker: P3 offset " + fmt(o3) + " ms leaves less than " +
                                    fmt(kBurstWidth) + " ms of the " + fmt(T) + " ms cycle");
    std::vector<NetworkSpec> units;
    for (int k = 0; k < 3; ++k) {
        OscillatorParams op;
        op.n_e = sp.n_e;
        op.n_i = sp.n_i;
        op.drive = k == 0 ? (sp.drive ? *sp.drive : oscillator_drive_for(sp.target_freq)) : 0.0;
        op.mismatch_cv = sp.mismatch_cv;
        op.seed = sp.seed;
        units.push_back(build_neural_oscillator(op));
    }
    const double w = sp.coupling_weight ? *sp.coupling_weight : kTriggerWeight;
    Matrix ee(3, std::vector<double>(3, 0.0)), ii = ee, delay = ee;
    ee[0][1] = w;
    ee[1][2] = w;
    delay[0][1] = std::max(0.0, std::round(o2 - kTriggerLatency12));
    delay[1][2] = std::max(0.0, std::round(o3 - o2 - kTriggerLatency23));
    CouplingOptions opts;
    opts.ee_delay = delay;
    auto s = couple_oscillators(units, ee, ii, opts);
    add_noise(s, sp.noise_rate, sp.noise_weight);
    return s;
}

} // namespace

NetworkSpec build_three_phase(const ThreePhaseSpec& sp) {
    if (sp.phase_offsets.size() != 2)
        fail(ErrorKind::Config, "three-phase: expected offsets for P2 and P3 (three phases required), got " +
                                    std::to_string(sp.phase_offsets.size()));
    if (!(sp.target_freq > 0)) fail(ErrorKind::Config, "three-phase: target_freq must be > 0");
    const double T = 1000.0 / sp.target_freq;
    const double o2 = sp.phase_offsets[0], o3 = sp.phase_offsets[1];
    if (!(0 < o2 && o2 < o3 && o3 < T))
        fail(ErrorKind::Config, "three-phase: offsets must satisfy 0 < P2 < P3 < " + fmt(T) + " ms, got (" + fmt(o2) +
                                    ", " + fmt(o3) + ")");
    if (sp.n_e < 1 || sp.n_i < 1) fail(ErrorKind::Config, "three-phase: population sizes must be >= 1");
    if (sp.kind == ThreePhaseKind::CpgUnit) return three_phase_cpg(sp, T);
    if (sp.layout == ThreePhaseLayout::Ring) return three_phase_ring(sp, T);
    return three_phase_pacemaker(sp, T);
}

std::string_view to_string(Channel c) {
    switch (c) {
    case Channel::RA: return "RA";
    case Channel::LA: return "LA";
    case Channel::V: return "V";
    }
    return "?";
}

StimulationSchedule cardiac_schedule(const SpikeRecord& record, const std::array<std::string, 3>& mapping,
                                     const BurstParams& bp, double t_from) {
    StimulationSchedule out;
    std::array<std::vector<double>, 3> on;
    for (int c = 0; c < 3; ++c) {
        const auto p = record.index_of(mapping[c]);
        for (const auto& b : detect_bursts(record.times(p), bp.max_isi, bp.min_spikes))
            if (b.t_start >= t_from) on[c].push_back(b.t_start);
    }
    const auto& ra = on[0];
    for (std::size_t k = 0; k < ra.size(); ++k) {
        const double s0 = ra[k];
        const bool last = k + 1 == ra.size();
        const double s1 = last ? record.duration + 1.0 : ra[k + 1];
        std::array<std::optional<double>, 2> t;
        for (int c = 1; c < 3; ++c) {
            auto it = std::lower_bound(on[c].begin(), on[c].end(), s0);
            if (it != on[c].end() && *it < s1) t[c - 1] = *it;
        }
        if (!t[0] || !t[1] || !(*t[0] <= *t[1])) {
            if (!last) ++out.skipped_cycles;
            continue;
        }
        out.events.push_back({s0, Channel::RA});
        out.events.push_back({*t[0], Channel::LA});
        out.events.push_back({*t[1], Channel::V});
        ++out.n_cycles;
    }
    return out;
}

std::string schedule_to_csv(const StimulationSchedule& schedule) {
    std::string s = "t_ms,channel\n";
    for (const auto& e : schedule.events) {
        s += format_double(e.t);
        s += ',';
        s += to_string(e.channel);
        s += '\n';
    }
    return s;
}

CardiacDelays cardiac_delays(const StimulationSchedule& schedule) {
    CardiacDelays d;
    std::vector<double> la, v, gap;
    const auto& ev = schedule.events;
    for (std::size_t k = 0; k + 2 < ev.size(); k += 3) {
        la.push_back(ev[k + 1].t - ev[k].t);
        v.push_back(ev[k + 2].t - ev[k].t);
        if (k + 3 < ev.size()) gap.push_back(ev[k + 3].t - ev[k + 2].t);
    }
    d.la_ra = median(la);
    d.v_ra = median(v);
    d.long_gap = median(gap);
    d.n_cycles = static_cast<std::uint32_t>(la.size());
    return d;
}

double modulate_frequency(double physio, double I_min, double I_max) {
    if (!(physio >= 0 && physio <= 1)) fail(ErrorKind::Config, "modulate_frequency: physio must be in [0, 1]");
    if (!(I_min < I_max)) fail(ErrorKind::Config, "modulate_frequency: I_min must be < I_max");
    return I_min + physio * (I_max - I_min);
}

void apply_drive(NetworkSpec& spec, double drive) {
    for (auto& p : spec.populations)
        if (ends_with(p.label, "_E") && p.I_const != 0) p.I_const = drive;
}

std::vector<std::string> preset_names() {
    return {"burst-neuron", "cpg-escape-0.5hz", "oscillator-1hz", "three-phase-cpg-1hz", "symmetric-1hz",
            "cardiac-1hz"};
}

NetworkSpec preset(const std::string& name) {
    if (name == "burst-neuron") {
        NeuronParams np;
        np.Vreset = -45.0;
        np.t_ref = 10.0;
        np.b = 12.0;
        np.tau_w = 700.0;
        NetworkSpec s;
        s.populations = {PopulationSpec{"N", 1, np, 380.0}};
        s.mismatch_cv = 0.0;
        s.seed = 1;
        return s;
    }
    if (name == "cpg-escape-0.5hz") return build_half_center_cpg({});
    if (name == "oscillator-1hz") return build_neural_oscillator({});
    if (name == "three-phase-cpg-1hz") {
        ThreePhaseSpec sp;
        sp.kind = ThreePhaseKind::CpgUnit;
        sp.n_e = 4;
        return build_three_phase(sp);
    }
    if (name == "symmetric-1hz") return build_three_phase({});
    if (name == "cardiac-1hz") {
        ThreePhaseSpec sp;
        sp.layout = ThreePhaseLayout::Pacemaker;
        sp.phase_offsets = {27.5, 140.0};
        return build_three_phase(sp);
    }
    fail(ErrorKind::Config, "unknown preset '" + name + "'");
}

} // namespace nr
