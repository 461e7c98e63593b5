#include "neurorhythm/experiment.hpp"

#include "neurorhythm/csv.hpp"
#include "neurorhythm/error.hpp"
#include "neurorhythm/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

namespace nr {

namespace {

const Json& at(const Json& j, const char* key) { return j.at(key); }

double num(const Json& j, const char* key, const std::string& where) {
    const auto& v = at(j, key);
    if (!v.is_number()) fail(ErrorKind::Config, where + "." + key + ": expected a number");
    return v.get<double>();
}

std::optional<double> opt_num(const Json& j, const char* key, const std::string& where) {
    const auto& v = at(j, key);
    if (v.is_null()) return std::nullopt;
    return num(j, key, where);
}

std::uint64_t uint(const Json& j, const char* key, const std::string& where) {
    const auto& v = at(j, key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        fail(ErrorKind::Config, where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::uint32_t u32(const Json& j, const char* key, const std::string& where) {
    const auto x = uint(j, key, where);
    if (x > 0xffffffffull) fail(ErrorKind::Config, where + "." + key + ": too large");
    return static_cast<std::uint32_t>(x);
}

std::string str(const Json& j, const char* key, const std::string& where) {
    const auto& v = at(j, key);
    if (!v.is_string()) fail(ErrorKind::Config, where + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool boolean(const Json& j, const char* key, const std::string& where) {
    const auto& v = at(j, key);
    if (!v.is_boolean()) fail(ErrorKind::Config, where + "." + key + ": expected true or false");
    return v.get<bool>();
}

// Overlay `user` on `defaults`; keys must already exist in `defaults`.
Json merge_strict(const Json& defaults, const Json& user, const std::string& where) {
    if (!user.is_object()) fail(ErrorKind::Config, where + ": expected an object");
    Json out = defaults;
    for (const auto& [k, v] : user.items()) {
        if (!out.contains(k)) fail(ErrorKind::Config, where + ": unknown key '" + k + "'");
        if (out[k].is_object() && !v.is_null())
            out[k] = merge_strict(out[k], v, where + "." + k);
        else
            out[k] = v;
    }
    return out;
}

enum class Family { Burst, HalfCenter, Oscillator, ThreePhase };

Family family_of(const std::string& name) {
    if (name == "burst-neuron") return Family::Burst;
    if (name == "cpg-escape-0.5hz") return Family::HalfCenter;
    if (name == "oscillator-1hz") return Family::Oscillator;
    if (name == "three-phase-cpg-1hz" || name == "symmetric-1hz" || name == "cardiac-1hz") return Family::ThreePhase;
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    fail(ErrorKind::Config, "network.preset: unknown preset '" + name + "' (" + names + ")");
}

Json three_phase_params(const ThreePhaseSpec& s) {
    return Json{{"kind", std::string(to_string(s.kind))},
                {"layout", std::string(to_string(s.layout))},
                {"target_freq", s.target_freq},
                {"phase_offsets", s.phase_offsets},
                {"n_e", s.n_e},
                {"n_i", s.n_i},
                {"drive", s.drive ? Json(*s.drive) : Json(nullptr)},
                {"coupling_weight", s.coupling_weight ? Json(*s.coupling_weight) : Json(nullptr)},
                {"noise_rate", s.noise_rate},
                {"noise_weight", s.noise_weight},
                {"mismatch_cv", s.mismatch_cv},
                {"seed", s.seed}};
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json analysis_to_json(const AnalysisConfig& a) {
    return Json{{"bursts", to_json(a.bursts)},
                {"phases", a.phases},
                {"t_from", a.t_from},
                {"rate_bin", a.rate_bin},
                {"rate_smooth", a.rate_smooth},
                {"portrait", a.portrait ? Json::array({(*a.portrait)[0], (*a.portrait)[1]}) : Json(nullptr)},
                {"cardiac", a.cardiac}};
}

std::vector<std::string> default_phases(const NetworkSpec& s) {
    if (s.find("P1_E") && s.find("P2_E")) {
        if (s.find("P3_E")) return {"P1_E", "P2_E", "P3_E"};
        return {"P1_E", "P2_E"};
    }
    if (s.populations.size() == 1) return {s.populations[0].label};
    return {};
}

AnalysisConfig analysis_from_json(const Json& j, const NetworkSpec& spec) {
    const std::string where = "analysis";
    require_keys(j, {"bursts", "phases", "t_from", "rate_bin", "rate_smooth", "portrait", "cardiac"}, where);
    AnalysisConfig a;
    a.phases = default_phases(spec);
    if (j.contains("bursts")) a.bursts = burst_params_from_json(j["bursts"], where + ".bursts");
    if (j.contains("phases")) {
        const auto& p = j["phases"];
        if (!p.is_array()) fail(ErrorKind::Config, where + ".phases: expected an array of labels");
        a.phases.clear();
        for (const auto& e : p) {
            if (!e.is_string()) fail(ErrorKind::Config, where + ".phases: expected an array of labels");
            a.phases.push_back(e.get<std::string>());
        }
    }
    if (j.contains("t_from")) a.t_from = num(j, "t_from", where);
    if (j.contains("rate_bin")) a.rate_bin = num(j, "rate_bin", where);
    if (j.contains("rate_smooth")) a.rate_smooth = num(j, "rate_smooth", where);
    if (j.contains("portrait") && !j["portrait"].is_null()) {
        const auto& p = j["portrait"];
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            fail(ErrorKind::Config, where + ".portrait: expected [E label, I label]");
        a.portrait = std::array<std::string, 2>{p[0].get<std::string>(), p[1].get<std::string>()};
    }
    if (j.contains("cardiac")) a.cardiac = boolean(j, "cardiac", where);

    if (!(a.bursts.max_isi > 0)) fail(ErrorKind::Config, where + ".bursts.max_isi must be > 0");
    if (a.bursts.min_spikes < 2) fail(ErrorKind::Config, where + ".bursts.min_spikes must be >= 2");
    if (a.phases.size() > 3) fail(ErrorKind::Config, where + ".phases: at most three labels");
    for (const auto& l : a.phases)
        if (!spec.find(l)) fail(ErrorKind::Config, where + ".phases: unknown population '" + l + "'");
    if (!(a.t_from >= 0)) fail(ErrorKind::Config, where + ".t_from must be >= 0");
    if (!(a.rate_bin > 0)) fail(ErrorKind::Config, where + ".rate_bin must be > 0");
    if (!(a.rate_smooth >= 0)) fail(ErrorKind::Config, where + ".rate_smooth must be >= 0");
    if (a.portrait) {
        if (a.phases.empty()) fail(ErrorKind::Config, where + ".portrait needs phases to delimit cycles");
        for (const auto& l : *a.portrait)
            if (!spec.find(l)) fail(ErrorKind::Config, where + ".portrait: unknown population '" + l + "'");
    }
    if (a.cardiac && a.phases.size() != 3) fail(ErrorKind::Config, where + ".cardiac needs three phases (RA, LA, V)");
    return a;
}

OutputConfig outputs_from_json(const Json& j) {
    const std::string where = "outputs";
    require_keys(j, {"directory", "spikes", "rates", "trace"}, where);
    OutputConfig o;
    if (j.contains("directory")) o.directory = str(j, "directory", where);
    if (j.contains("spikes")) o.spikes = boolean(j, "spikes", where);
    if (j.contains("rates")) o.rates = boolean(j, "rates", where);
    if (j.contains("trace")) o.trace = boolean(j, "trace", where);
    return o;
}

} // namespace

Json preset_params(const std::string& name) {
    switch (family_of(name)) {
    case Family::Burst: {
        const auto s = preset(name);
        const auto& p = s.populations[0];
        return Json{{"drive", p.I_const},
                    {"neuron_params", to_json(p.neuron_params)},
                    {"mismatch_cv", s.mismatch_cv},
                    {"seed", s.seed}};
    }
    case Family::HalfCenter: {
        const HalfCenterParams p;
        return Json{{"mode", std::string(to_string(p.mode))},
                    {"drive", p.drive},
                    {"b", p.b},
                    {"tau_w", p.tau_w},
                    {"adaptation_slope", p.adaptation_slope},
                    {"drive_ref", p.drive_ref},
                    {"inhibition_weight", p.inhibition_weight},
                    {"inhibition_tau_s", p.inhibition_tau_s},
                    {"n", p.n},
                    {"p2_onset", p.p2_onset},
                    {"mismatch_cv", p.mismatch_cv},
                    {"seed", p.seed}};
    }
    case Family::Oscillator: {
        const OscillatorParams p;
        return Json{{"n_e", p.n_e},       {"n_i", p.n_i},       {"drive", p.drive},   {"w_ee", p.w_ee},
                    {"tau_ee", p.tau_ee}, {"w_ei", p.w_ei},     {"tau_ei", p.tau_ei}, {"w_ie", p.w_ie},
                    {"tau_ie", p.tau_ie}, {"drive_onset", p.drive_onset},
                    {"neuron_params", to_json(p.neuron)},   {"mismatch_cv", p.mismatch_cv},
                    {"seed", p.seed}};
    }
    case Family::ThreePhase: {
        ThreePhaseSpec s;
        if (name == "three-phase-cpg-1hz") {
            s.kind = ThreePhaseKind::CpgUnit;
            s.n_e = 4;
        } else if (name == "cardiac-1hz") {
            s.layout = ThreePhaseLayout::Pacemaker;
            s.phase_offsets = {27.5, 140.0};
        }
        return three_phase_params(s);
    }
    }
    return {};
}

NetworkSpec build_preset(const std::string& name, const Json& params) {
    const std::string w = "network.params";
    const Json p = merge_strict(preset_params(name), params, w);
    switch (family_of(name)) {
    case Family::Burst: {
        NetworkSpec s;
        s.populations = {PopulationSpec{"N", 1, neuron_params_from_json(p["neuron_params"], w + ".neuron_params"),
                                        num(p, "drive", w)}};
        s.mismatch_cv = num(p, "mismatch_cv", w);
        s.seed = uint(p, "seed", w);
        validate(s);
        return s;
    }
    case Family::HalfCenter: {
        HalfCenterParams h;
        h.mode = cpg_mode_from_string(str(p, "mode", w));
        h.drive = num(p, "drive", w);
        h.b = num(p, "b", w);
        h.tau_w = num(p, "tau_w", w);
        h.adaptation_slope = num(p, "adaptation_slope", w);
        h.drive_ref = num(p, "drive_ref", w);
        h.inhibition_weight = num(p, "inhibition_weight", w);
        h.inhibition_tau_s = num(p, "inhibition_tau_s", w);
        h.n = u32(p, "n", w);
        h.p2_onset = num(p, "p2_onset", w);
        h.mismatch_cv = num(p, "mismatch_cv", w);
        h.seed = uint(p, "seed", w);
        return build_half_center_cpg(h);
    }
    case Family::Oscillator: {
        OscillatorParams o;
        o.n_e = u32(p, "n_e", w);
        o.n_i = u32(p, "n_i", w);
        o.drive = num(p, "drive", w);
        o.w_ee = num(p, "w_ee", w);
        o.tau_ee = num(p, "tau_ee", w);
        o.w_ei = num(p, "w_ei", w);
        o.tau_ei = num(p, "tau_ei", w);
        o.w_ie = num(p, "w_ie", w);
        o.tau_ie = num(p, "tau_ie", w);
        o.drive_onset = num(p, "drive_onset", w);
        o.neuron = neuron_params_from_json(p["neuron_params"], w + ".neuron_params");
        o.mismatch_cv = num(p, "mismatch_cv", w);
        o.seed = uint(p, "seed", w);
        return build_neural_oscillator(o);
    }
    case Family::ThreePhase: {
        ThreePhaseSpec s;
        s.kind = three_phase_kind_from_string(str(p, "kind", w));
        s.layout = three_phase_layout_from_string(str(p, "layout", w));
        s.target_freq = num(p, "target_freq", w);
        const auto& off = p["phase_offsets"];
        if (!off.is_array()) fail(ErrorKind::Config, w + ".phase_offsets: expected an array");
        s.phase_offsets.clear();
        for (const auto& x : off) {
            if (!x.is_number()) fail(ErrorKind::Config, w + ".phase_offsets: expected numbers");
            s.phase_offsets.push_back(x.get<double>());
        }
        s.n_e = u32(p, "n_e", w);
        s.n_i = u32(p, "n_i", w);
        s.drive = opt_num(p, "drive", w);
        s.coupling_weight = opt_num(p, "coupling_weight", w);
        s.noise_rate = num(p, "noise_rate", w);
        s.noise_weight = num(p, "noise_weight", w);
        s.mismatch_cv = num(p, "mismatch_cv", w);
        s.seed = uint(p, "seed", w);
        return build_three_phase(s);
    }
    }
    return {};
}

Json ExperimentConfig::to_json() const {
    return Json{{"schema_version", kSchemaVersion},
                {"network", network},
                {"simulation", nr::to_json(simulation)},
                {"analysis", analysis_to_json(analysis)},
                {"outputs", Json{{"directory", outputs.directory},
                                 {"spikes", outputs.spikes},
                                 {"rates", outputs.rates},
                                 {"trace", outputs.trace}}}};
}

ExperimentConfig parse_experiment(const Json& doc) {
    require_keys(doc, {"schema_version", "network", "simulation", "analysis", "outputs"}, "config");
    if (doc.contains("schema_version")) {
        const auto& v = doc["schema_version"];
        if (!v.is_number_integer() || v.get<std::int64_t>() != kSchemaVersion)
            fail(ErrorKind::Config, "config.schema_version: expected " + std::to_string(kSchemaVersion));
    }
    if (!doc.contains("network")) fail(ErrorKind::Config, "config: missing 'network'");

    ExperimentConfig cfg;
    const Json& net = doc["network"];
    require_keys(net, {"preset", "params", "spec"}, "network");
    if (net.contains("spec") == net.contains("preset"))
        fail(ErrorKind::Config, "network: give exactly one of 'preset' or 'spec'");
    if (net.contains("preset")) {
        const std::string name = str(net, "preset", "network");
        const Json params = net.contains("params") ? net["params"] : Json::object();
        cfg.spec = build_preset(name, params);
        cfg.network = Json{{"preset", name}, {"params", merge_strict(preset_params(name), params, "network.params")}};
    } else {
        if (net.contains("params")) fail(ErrorKind::Config, "network.params: only valid with a preset");
        cfg.spec = network_from_json(net["spec"]);
        validate(cfg.spec);
        cfg.network = Json{{"spec", nr::to_json(cfg.spec)}};
    }

    if (doc.contains("simulation")) cfg.simulation = simulation_from_json(doc["simulation"]);
    validate(cfg.simulation);
    for (const auto& t : cfg.simulation.trace_neurons) {
        const auto* p = cfg.spec.find(t.population);
        if (!p) fail(ErrorKind::Config, "simulation.trace_neurons: unknown population '" + t.population + "'");
        if (t.index >= p->n)
            fail(ErrorKind::Config, "simulation.trace_neurons: index " + std::to_string(t.index) + " outside " +
                                        t.population + " (n=" + std::to_string(p->n) + ")");
    }
    cfg.analysis = analysis_from_json(doc.contains("analysis") ? doc["analysis"] : Json::object(), cfg.spec);
    cfg.outputs = outputs_from_json(doc.contains("outputs") ? doc["outputs"] : Json::object());
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) { return parse_experiment(read_json_file(path)); }

ExperimentConfig with_value(const ExperimentConfig& cfg, const std::string& dotted_key, double value) {
    Json doc = cfg.to_json();
    Json* node = &doc;
    std::size_t pos = 0;
    const auto bad = [&](const std::string& why) -> void {
        fail(ErrorKind::Config, "parameter '" + dotted_key + "': " + why);
    };
    if (dotted_key.empty()) bad("empty key");
    while (true) {
        const auto dot = dotted_key.find('.', pos);
        const std::string tok = dotted_key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (node->is_object()) {
            auto it = node->find(tok);
            if (it == node->end()) bad("no field '" + tok + "'");
            node = &*it;
        } else if (node->is_array()) {
            std::size_t idx = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
            if (ec != std::errc{} || p != tok.data() + tok.size() || idx >= node->size())
                bad("bad index '" + tok + "'");
            node = &(*node)[idx];
        } else {
            bad("'" + tok + "' is below a scalar");
        }
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (!(node->is_number() || node->is_null())) bad("not a numeric field");
    if (node->is_number_integer() && value == std::floor(value) && value >= 0)
        *node = static_cast<std::uint64_t>(value);
    else
        *node = value;
    return parse_experiment(doc);
}

ExperimentConfig with_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    Json doc = cfg.to_json();
    if (doc["network"].contains("preset"))
        doc["network"]["params"]["seed"] = seed;
    else
        doc["network"]["spec"]["seed"] = seed;
    doc["simulation"]["trial_seed"] = seed;
    return parse_experiment(doc);
}

ExperimentConfig with_dt(const ExperimentConfig& cfg, double dt) {
    Json doc = cfg.to_json();
    doc["simulation"]["dt"] = dt;
    return parse_experiment(doc);
}

std::string config_hash(const ExperimentConfig& cfg) {
    Json doc = cfg.to_json();
    doc["outputs"].erase("directory");
    return fnv1a_hex(doc.dump());
}

AnalysisResult analyze(const ExperimentConfig& cfg, const SpikeRecord& record) {
    const auto& a = cfg.analysis;
    AnalysisResult out;
    for (std::uint32_t p = 0; p < record.populations.size(); ++p) {
        BurstStats bs;
        std::vector<double> dur, gap;
        const Burst* prev = nullptr;
        const auto bursts = detect_bursts(record.times(p), a.bursts.max_isi, a.bursts.min_spikes);
        for (const auto& b : bursts) {
            if (b.t_start < a.t_from) continue;
            ++bs.n_bursts;
            dur.push_back(b.t_end - b.t_start);
            if (prev) gap.push_back(b.t_start - prev->t_end);
            prev = &b;
        }
        bs.median_duration = median(dur);
        bs.median_interval = median(gap);
        out.bursts[record.populations[p]] = bs;
    }

    std::vector<std::string> rate_pops = a.phases;
    if (a.portrait)
        for (const auto& l : *a.portrait)
            if (std::find(rate_pops.begin(), rate_pops.end(), l) == rate_pops.end()) rate_pops.push_back(l);
    for (const auto& l : rate_pops) out.rates.emplace_back(l, population_rate(record, l, a.rate_bin, a.rate_smooth));

    if (a.phases.empty()) return out;
    out.metrics = oscillation_metrics(record, a.phases, a.bursts, a.t_from);

    if (a.portrait) {
        const auto& on = out.metrics->cycle_onsets.at(a.phases[0]);
        if (on.size() < 3)
            fail(ErrorKind::Analysis, "portrait needs two complete cycles of " + a.phases[0] + ", found " +
                                          std::to_string(on.size() < 1 ? 0 : on.size() - 1));
        const auto find = [&](const std::string& l) -> const RateSeries& {
            for (const auto& [k, r] : out.rates)
                if (k == l) return r;
            fail(ErrorKind::Analysis, "no rate series for " + l);
        };
        out.portrait = phase_portrait(find((*a.portrait)[0]), find((*a.portrait)[1]), {on[0], on[1], on[2]});
    }
    if (a.cardiac) {
        out.schedule = cardiac_schedule(record, {a.phases[0], a.phases[1], a.phases[2]}, a.bursts, a.t_from);
        out.cardiac = cardiac_delays(*out.schedule);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    auto inst = build_network(cfg.spec);
    ExperimentResult r;
    r.run = run(inst, cfg.simulation);
    r.analysis = analyze(cfg, r.run.spikes);
    return r;
}

namespace {

std::string join(const std::string& dir, const char* file) { return (std::filesystem::path(dir) / file).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir + "': " + ec.message());
}

Json bursts_json(const std::map<std::string, BurstStats>& m) {
    Json j = Json::object();
    for (const auto& [k, b] : m)
        j[k] = Json{{"n_bursts", b.n_bursts}, {"median_duration", b.median_duration}, {"median_interval", b.median_interval}};
    return j;
}

} // namespace

void write_manifest(const std::string& dir, const ExperimentConfig& cfg) {
    ensure_dir(dir);
    const Json m{{"tool", kToolName},
                 {"version", kToolVersion},
                 {"config_hash", config_hash(cfg)},
                 {"seed", cfg.spec.seed},
                 {"trial_seed", cfg.simulation.trial_seed},
                 {"kernel", kernels::active_kernels().isa == kernels::Isa::Avx2 ? "avx2" : "scalar"},
                 {"config", cfg.to_json()}};
    write_text_file(join(dir, "manifest.json"), m.dump(2) + "\n");
}

void write_analysis_outputs(const std::string& dir, const ExperimentConfig& cfg, const AnalysisResult& a) {
    ensure_dir(dir);
    if (a.metrics) write_text_file(join(dir, "metrics.json"), to_json(*a.metrics).dump(2) + "\n");
    write_text_file(join(dir, "bursts.json"), bursts_json(a.bursts).dump(2) + "\n");
    if (cfg.outputs.rates && !a.rates.empty()) {
        std::vector<std::string> labels;
        std::vector<RateSeries> series;
        for (const auto& [l, r] : a.rates) {
            labels.push_back(l);
            series.push_back(r);
        }
        write_text_file(join(dir, "rates.csv"), rates_to_csv(labels, series));
    }
    if (a.portrait) {
        write_text_file(join(dir, "portrait.csv"), portrait_to_csv(*a.portrait));
        write_text_file(join(dir, "portrait.json"),
                        Json{{"similarity", a.portrait->similarity}, {"diameter", a.portrait->diameter}}.dump(2) + "\n");
    }
    if (a.schedule) {
        write_text_file(join(dir, "schedule.csv"), schedule_to_csv(*a.schedule));
        const auto& d = *a.cardiac;
        write_text_file(join(dir, "cardiac.json"), Json{{"la_ra", d.la_ra},
                                                        {"v_ra", d.v_ra},
                                                        {"long_gap", d.long_gap},
                                                        {"n_cycles", d.n_cycles},
                                                        {"skipped_cycles", a.schedule->skipped_cycles}}
                                                           .dump(2) + "\n");
    }
}

void write_run_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& r) {
    ensure_dir(dir);
    if (cfg.outputs.spikes) write_text_file(join(dir, "spikes.csv"), spikes_to_csv(r.run.spikes));
    if (cfg.outputs.trace && r.run.trace) write_text_file(join(dir, "trace.csv"), trace_to_csv(*r.run.trace));
    write_analysis_outputs(dir, cfg, r.analysis);
    write_manifest(dir, cfg);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& key, const std::vector<double>& values,
                                unsigned threads) {
    with_value(cfg, key, values.empty() ? 0.0 : values.front()); // key must resolve
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<SweepRow> rows(sorted.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            SweepRow& row = rows[k];
            row.value = sorted[k];
            try {
                auto c = with_value(cfg, key, sorted[k]);
                c.analysis.portrait.reset();
                c.analysis.cardiac = false;
                auto inst = build_network(c.spec);
                const auto res = run(inst, c.simulation);
                if (c.analysis.phases.empty()) fail(ErrorKind::Config, "sweep needs analysis.phases");
                const auto m = oscillation_metrics(res.spikes, c.analysis.phases, c.analysis.bursts, c.analysis.t_from);
                row.freq = m.freq;
                row.jitter_std = m.jitter_std;
                row.n_cycles = static_cast<std::uint32_t>(m.cycle_onsets.at(c.analysis.phases[0]).size() - 1);
                row.status = "ok";
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Analysis && std::string(e.what()).starts_with("insufficient cycles"))
                    row.status = "no oscillation";
                else
                    row.status = std::string(to_string(e.kind())) + ": " + e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(rows.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

std::string sweep_to_csv(const std::string& key, const std::vector<SweepRow>& rows) {
    std::string s = key + ",freq_hz,jitter_std_ms,n_cycles,status\n";
    for (const auto& r : rows) {
        s += format_double(r.value) + "," + format_double(r.freq) + "," + format_double(r.jitter_std) + "," +
             std::to_string(r.n_cycles) + ",";
        std::string st = r.status;
        if (st.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : st) q += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
            st = q + "\"";
        }
        s += st + "\n";
    }
    return s;
}

std::vector<std::string> demo_names() {
    return {"burst-neuron", "half-center-cpg", "three-phase-cpg", "three-phase-oscillator", "cardiac-pacing"};
}

Json demo_config(const std::string& name) {
    auto doc = [](const char* preset, double duration, Json analysis) {
        return Json{{"schema_version", kSchemaVersion},
                    {"network", Json{{"preset", preset}}},
                    {"simulation", Json{{"dt", 0.1}, {"duration", duration}}},
                    {"analysis", std::move(analysis)}};
    };
    const Json b50{{"max_isi", 50.0}, {"min_spikes", 3}};
    const Json b100{{"max_isi", 100.0}, {"min_spikes", 3}};
    const Json b40{{"max_isi", 40.0}, {"min_spikes", 3}};
    if (name == "burst-neuron") return doc("burst-neuron", 15000.0, Json{{"bursts", b50}, {"phases", Json::array({"N"})}});
    if (name == "half-center-cpg")
        return doc("cpg-escape-0.5hz", 20000.0, Json{{"bursts", b40}, {"phases", Json::array({"P1_E", "P2_E"})}});
    if (name == "three-phase-cpg")
        return doc("three-phase-cpg-1hz", 10000.0, Json{{"bursts", b100}, {"phases", Json::array({"P1_E", "P2_E", "P3_E"})}});
    if (name == "three-phase-oscillator")
        return doc("symmetric-1hz", 36000.0,
                   Json{{"bursts", b50},
                        {"phases", Json::array({"P1_E", "P2_E", "P3_E"})},
                        {"t_from", 3000.0},
                        {"portrait", Json::array({"P1_E", "P1_I"})}});
    if (name == "cardiac-pacing")
        return doc("cardiac-1hz", 12000.0,
                   Json{{"bursts", b50}, {"phases", Json::array({"P1_E", "P2_E", "P3_E"})}, {"cardiac", true}});
    std::string names;
    for (const auto& n : demo_names()) names += (names.empty() ? "" : ", ") + n;
    fail(ErrorKind::Config, "unknown demo '" + name + "' (" + names + ")");
}

} // namespace nr
