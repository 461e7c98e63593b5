#include "neurorhythm/csv.hpp"

#include "neurorhythm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nr {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string spikes_to_csv(const SpikeRecord& r) {
    std::string out = "t_ms,population,neuron\n";
    out.reserve(out.size() + r.events.size() * 20);
    for (const auto& e : r.events) {
        out += format_double(e.t);
        out += ',';
        out += r.populations.at(e.population);
        out += ',';
        out += std::to_string(e.neuron);
        out += '\n';
    }
    return out;
}

std::string trace_to_csv(const StateTrace& trace) {
    std::string out = "t_ms,population,neuron,V_mV,w_pA\n";
    for (const auto& s : trace.series)
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            out += format_double(s.t[k]) + ',' + s.target.population + ',' + std::to_string(s.target.index) + ',' +
                   format_double(s.V[k]) + ',' + format_double(s.w[k]) + '\n';
        }
    return out;
}

std::string rates_to_csv(const std::vector<std::string>& labels, const std::vector<RateSeries>& rates) {
    std::string out = "t_ms";
    for (const auto& l : labels) out += "," + l;
    out += '\n';
    if (rates.empty()) return out;
    for (std::size_t k = 0; k < rates.front().t.size(); ++k) {
        out += format_double(rates.front().t[k]);
        for (const auto& r : rates) out += "," + format_double(r.rate[k]);
        out += '\n';
    }
    return out;
}

std::string portrait_to_csv(const PhasePortrait& p) {
    std::string out = "cycle,e_rate_hz,i_rate_hz\n";
    for (std::size_t c = 0; c < 2; ++c)
        for (const auto& pt : p.loops[c])
            out += std::to_string(c + 1) + ',' + format_double(pt.e) + ',' + format_double(pt.i) + '\n';
    return out;
}

namespace {

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
    fail(ErrorKind::Io, "spikes CSV line " + std::to_string(line) + ": " + why);
}

} // namespace

SpikeRecord spikes_from_csv(const std::string& text, const std::vector<KnownPopulation>& known, double duration,
                            double dt) {
    SpikeRecord r;
    r.duration = duration;
    r.dt = dt;
    for (const auto& k : known) {
        r.populations.push_back(k.label);
        r.sizes.push_back(k.n);
    }
    std::vector<bool> fixed(known.size(), true);

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != "t_ms,population,neuron") bad_row(1, "expected header 't_ms,population,neuron'");
            continue;
        }
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) bad_row(lineno, "expected 3 fields");
        double t = 0;
        const char* b = line.data();
        auto rt = std::from_chars(b, b + c1, t);
        if (rt.ec != std::errc{} || rt.ptr != b + c1 || !std::isfinite(t)) bad_row(lineno, "bad time");
        const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
        if (label.empty()) bad_row(lineno, "empty population label");
        std::uint32_t idx = 0;
        auto ri = std::from_chars(b + c2 + 1, b + line.size(), idx);
        if (ri.ec != std::errc{} || ri.ptr != b + line.size()) bad_row(lineno, "bad neuron index");
        if (!r.events.empty() && t < r.events.back().t) bad_row(lineno, "times must be non-decreasing");

        auto pos = r.find(label);
        if (!pos) {
            r.populations.push_back(label);
            r.sizes.push_back(0);
            fixed.push_back(false);
            pos = static_cast<std::uint32_t>(r.populations.size() - 1);
        }
        if (fixed[*pos]) {
            if (idx >= r.sizes[*pos]) bad_row(lineno, "neuron index out of range for " + label);
        } else {
            r.sizes[*pos] = std::max(r.sizes[*pos], idx + 1);
        }
        r.events.push_back({t, *pos, idx});
    }
    if (lineno == 0) bad_row(1, "missing header");
    if (r.duration <= 0 && !r.events.empty()) r.duration = r.events.back().t;
    return r;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace nr
