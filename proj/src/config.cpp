#include "neurorhythm/config.hpp"

#include "neurorhythm/error.hpp"

#include <fstream>
#include <sstream>

namespace nr {

void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) fail(ErrorKind::Config, where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(ErrorKind::Config, where + ": unknown key '" + key + "'");
    }
}

namespace {

template <typename T>
void get_to(const Json& j, const char* key, T& out, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) throw std::invalid_argument("not a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw std::invalid_argument("not a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw std::invalid_argument("not an integer");
            if (it->is_number_unsigned()) {
                out = static_cast<T>(it->template get<std::uint64_t>());
                return;
            }
            if (it->template get<std::int64_t>() < 0 && std::is_unsigned_v<T>) throw std::invalid_argument("negative");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw std::invalid_argument("not a string");
        }
        out = it->template get<T>();
    } catch (const std::exception& e) {
        fail(ErrorKind::Config, where + "." + key + ": " + e.what());
    }
}

} // namespace

Json to_json(const NeuronParams& p) {
    return Json{{"C", p.C},         {"gL", p.gL},   {"EL", p.EL},       {"VT", p.VT},
                {"DeltaT", p.DeltaT}, {"Vpeak", p.Vpeak}, {"Vreset", p.Vreset}, {"t_ref", p.t_ref},
                {"a", p.a},         {"b", p.b},     {"tau_w", p.tau_w}};
}

NeuronParams neuron_params_from_json(const Json& j, const std::string& where) {
    require_keys(j, {"C", "gL", "EL", "VT", "DeltaT", "Vpeak", "Vreset", "t_ref", "a", "b", "tau_w"}, where);
    NeuronParams p;
    get_to(j, "C", p.C, where);
    get_to(j, "gL", p.gL, where);
    get_to(j, "EL", p.EL, where);
    get_to(j, "VT", p.VT, where);
    get_to(j, "DeltaT", p.DeltaT, where);
    get_to(j, "Vpeak", p.Vpeak, where);
    get_to(j, "Vreset", p.Vreset, where);
    get_to(j, "t_ref", p.t_ref, where);
    get_to(j, "a", p.a, where);
    get_to(j, "b", p.b, where);
    get_to(j, "tau_w", p.tau_w, where);
    return p;
}

Json to_json(const PopulationSpec& p) {
    return Json{{"label", p.label},
                {"n", p.n},
                {"neuron_params", to_json(p.neuron_params)},
                {"I_const", p.I_const},
                {"noise_rate", p.noise_rate},
                {"noise_weight", p.noise_weight},
                {"noise_tau_s", p.noise_tau_s},
                {"drive_onset", p.drive_onset}};
}

PopulationSpec population_from_json(const Json& j, const std::string& where) {
    require_keys(j, {"label", "n", "neuron_params", "I_const", "noise_rate", "noise_weight", "noise_tau_s", "drive_onset"},
                 where);
    PopulationSpec p;
    get_to(j, "label", p.label, where);
    get_to(j, "n", p.n, where);
    if (j.contains("neuron_params")) p.neuron_params = neuron_params_from_json(j["neuron_params"], where + ".neuron_params");
    get_to(j, "I_const", p.I_const, where);
    get_to(j, "noise_rate", p.noise_rate, where);
    get_to(j, "noise_weight", p.noise_weight, where);
    get_to(j, "noise_tau_s", p.noise_tau_s, where);
    get_to(j, "drive_onset", p.drive_onset, where);
    return p;
}

Json to_json(const ConnectionSpec& c) {
    Json j{{"src", c.src}, {"dst", c.dst}, {"sign", c.sign}, {"weight", c.weight}, {"tau_s", c.tau_s}};
    if (c.fan_in)
        j["fan_in"] = *c.fan_in;
    else
        j["fan_in"] = "all";
    j["delay"] = c.delay;
    return j;
}

ConnectionSpec connection_from_json(const Json& j, const std::string& where) {
    require_keys(j, {"src", "dst", "sign", "weight", "tau_s", "fan_in", "delay"}, where);
    ConnectionSpec c;
    get_to(j, "src", c.src, where);
    get_to(j, "dst", c.dst, where);
    get_to(j, "sign", c.sign, where);
    get_to(j, "weight", c.weight, where);
    get_to(j, "tau_s", c.tau_s, where);
    if (auto it = j.find("fan_in"); it != j.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "all") fail(ErrorKind::Config, where + ".fan_in: expected \"all\" or a count");
        } else {
            std::uint32_t f = 0;
            get_to(j, "fan_in", f, where);
            c.fan_in = f;
        }
    }
    get_to(j, "delay", c.delay, where);
    return c;
}

Json to_json(const NetworkSpec& spec) {
    Json pops = Json::array(), conns = Json::array();
    for (const auto& p : spec.populations) pops.push_back(to_json(p));
    for (const auto& c : spec.connections) conns.push_back(to_json(c));
    return Json{{"schema_version", kSchemaVersion},
                {"populations", pops},
                {"connections", conns},
                {"mismatch_cv", spec.mismatch_cv},
                {"seed", spec.seed}};
}

NetworkSpec network_from_json(const Json& j) {
    const std::string where = "network";
    require_keys(j, {"schema_version", "populations", "connections", "mismatch_cv", "seed"}, where);
    int version = kSchemaVersion;
    get_to(j, "schema_version", version, where);
    if (version != kSchemaVersion)
        fail(ErrorKind::Config, where + ": unsupported schema_version " + std::to_string(version));
    NetworkSpec spec;
    if (auto it = j.find("populations"); it != j.end()) {
        if (!it->is_array()) fail(ErrorKind::Config, where + ".populations: expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            spec.populations.push_back(population_from_json((*it)[i], where + ".populations[" + std::to_string(i) + "]"));
    }
    if (auto it = j.find("connections"); it != j.end()) {
        if (!it->is_array()) fail(ErrorKind::Config, where + ".connections: expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            spec.connections.push_back(connection_from_json((*it)[i], where + ".connections[" + std::to_string(i) + "]"));
    }
    get_to(j, "mismatch_cv", spec.mismatch_cv, where);
    get_to(j, "seed", spec.seed, where);
    return spec;
}

Json to_json(const SimulationConfig& c) {
    Json trace = Json::array();
    for (const auto& t : c.trace_neurons) trace.push_back(Json::array({t.population, t.index}));
    return Json{{"dt", c.dt},
                {"duration", c.duration},
                {"record_spikes", c.record_spikes},
                {"trace_neurons", trace},
                {"trial_seed", c.trial_seed}};
}

SimulationConfig simulation_from_json(const Json& j) {
    const std::string where = "simulation";
    require_keys(j, {"dt", "duration", "record_spikes", "trace_neurons", "trial_seed"}, where);
    SimulationConfig c;
    get_to(j, "dt", c.dt, where);
    get_to(j, "duration", c.duration, where);
    get_to(j, "record_spikes", c.record_spikes, where);
    get_to(j, "trial_seed", c.trial_seed, where);
    if (auto it = j.find("trace_neurons"); it != j.end()) {
        if (!it->is_array()) fail(ErrorKind::Config, where + ".trace_neurons: expected an array");
        for (const auto& e : *it) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_unsigned())
                fail(ErrorKind::Config, where + ".trace_neurons: entries must be [label, index]");
            c.trace_neurons.push_back({e[0].get<std::string>(), e[1].get<std::uint32_t>()});
        }
    }
    return c;
}

Json to_json(const OscillationMetrics& m) {
    Json onsets = Json::object();
    for (const auto& [k, v] : m.cycle_onsets) onsets[k] = v;
    return Json{{"freq", m.freq},
                {"cycle_onsets", onsets},
                {"offsets", Json::array({m.offsets[0], m.offsets[1]})},
                {"jitter_std", m.jitter_std},
                {"n_cycles", m.n_cycles},
                {"n_excluded", m.n_excluded},
                {"order_violations", m.order_violations},
                {"period", m.period}};
}

OscillationMetrics metrics_from_json(const Json& j) {
    const std::string where = "metrics";
    require_keys(j, {"freq", "cycle_onsets", "offsets", "jitter_std", "n_cycles", "n_excluded", "order_violations", "period"},
                 where);
    OscillationMetrics m;
    get_to(j, "freq", m.freq, where);
    get_to(j, "jitter_std", m.jitter_std, where);
    get_to(j, "n_cycles", m.n_cycles, where);
    get_to(j, "n_excluded", m.n_excluded, where);
    get_to(j, "order_violations", m.order_violations, where);
    get_to(j, "period", m.period, where);
    if (j.contains("cycle_onsets"))
        for (const auto& [k, v] : j["cycle_onsets"].items()) m.cycle_onsets[k] = v.get<std::vector<double>>();
    if (j.contains("offsets")) {
        const auto& o = j["offsets"];
        if (!o.is_array() || o.size() != 2) fail(ErrorKind::Config, where + ".offsets: expected two numbers");
        m.offsets = {o[0].get<double>(), o[1].get<double>()};
    }
    return m;
}

Json to_json(const BurstParams& b) { return Json{{"max_isi", b.max_isi}, {"min_spikes", b.min_spikes}}; }

BurstParams burst_params_from_json(const Json& j, const std::string& where) {
    require_keys(j, {"max_isi", "min_spikes"}, where);
    BurstParams b;
    get_to(j, "max_isi", b.max_isi, where);
    get_to(j, "min_spikes", b.min_spikes, where);
    return b;
}

std::string serialize(const NetworkSpec& spec) { return to_json(spec).dump(2) + "\n"; }

NetworkSpec parse_network(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorKind::Config, std::string("malformed network document: ") + e.what());
    }
    return network_from_json(j);
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail(ErrorKind::Config, "'" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

} // namespace nr
