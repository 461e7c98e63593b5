#include "neurorhythm/network.hpp"

#include "neurorhythm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace nr {

namespace {

std::string conn_name(const ConnectionSpec& c, std::size_t idx) {
    return "connection #" + std::to_string(idx) + " (" + c.src + " -> " + c.dst + ")";
}

} // namespace

const PopulationSpec* NetworkSpec::find(const std::string& label) const {
    for (const auto& p : populations)
        if (p.label == label) return &p;
    return nullptr;
}

std::size_t NetworkSpec::total_neurons() const {
    std::size_t n = 0;
    for (const auto& p : populations) n += p.n;
    return n;
}

void validate(const NetworkSpec& spec) {
    if (!(std::isfinite(spec.mismatch_cv) && spec.mismatch_cv >= 0))
        fail(ErrorKind::Config, "mismatch_cv must be >= 0");
    std::set<std::string> labels;
    for (const auto& p : spec.populations) {
        const std::string ctx = "population '" + p.label + "'";
        if (p.label.empty()) fail(ErrorKind::Config, "population label must not be empty");
        if (!labels.insert(p.label).second) fail(ErrorKind::Config, "duplicate " + ctx);
        if (p.n < 1) fail(ErrorKind::Config, ctx + ": n must be >= 1");
        validate(p.neuron_params, ctx);
        if (!std::isfinite(p.I_const)) fail(ErrorKind::Config, ctx + ": I_const must be finite");
        if (!(std::isfinite(p.noise_rate) && p.noise_rate >= 0))
            fail(ErrorKind::Config, ctx + ": noise_rate must be >= 0");
        if (!(std::isfinite(p.noise_weight) && p.noise_weight >= 0))
            fail(ErrorKind::Config, ctx + ": noise_weight must be >= 0");
        if (!(std::isfinite(p.noise_tau_s) && p.noise_tau_s > 0))
            fail(ErrorKind::Config, ctx + ": noise_tau_s must be > 0");
        if (!(std::isfinite(p.drive_onset) && p.drive_onset >= 0))
            fail(ErrorKind::Config, ctx + ": drive_onset must be >= 0");
    }
    for (std::size_t i = 0; i < spec.connections.size(); ++i) {
        const auto& c = spec.connections[i];
        const std::string ctx = conn_name(c, i);
        const auto* src = spec.find(c.src);
        if (src == nullptr) fail(ErrorKind::Config, ctx + ": unknown source population '" + c.src + "'");
        if (spec.find(c.dst) == nullptr) fail(ErrorKind::Config, ctx + ": unknown target population '" + c.dst + "'");
        validate(SynapseParams{c.tau_s, c.weight, c.sign}, ctx);
        if (c.fan_in && (*c.fan_in < 1 || *c.fan_in > src->n))
            fail(ErrorKind::Config, ctx + ": fan_in " + std::to_string(*c.fan_in) + " outside [1, " +
                                        std::to_string(src->n) + "]");
        if (!(std::isfinite(c.delay) && c.delay >= 0)) fail(ErrorKind::Config, ctx + ": delay must be >= 0");
    }
}

NeuronParams apply_mismatch(const NeuronParams& params, double cv, Rng& rng) {
    if (!(cv >= 0)) fail(ErrorKind::Config, "mismatch cv must be >= 0");
    if (cv == 0) return params;
    NeuronParams out = params;
    const double lo = 1.0 - 4.0 * cv, hi = 1.0 + 4.0 * cv;
    auto draw = [&](auto accept) {
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const double f = 1.0 + cv * rng.normal();
            if (f > 0 && f >= lo && f <= hi && accept(f)) return f;
        }
        fail(ErrorKind::Config, "apply_mismatch: could not draw a valid factor");
    };
    auto any = [](double) { return true; };
    out.C = params.C * draw(any);
    out.gL = params.gL * draw(any);
    // threshold distance above rest
    const double span = params.VT - params.EL;
    out.VT = params.EL + span * draw([&](double f) { return params.EL + span * f < params.Vpeak; });
    out.tau_w = params.tau_w * draw(any);
    out.b = params.b * draw(any);
    return out;
}

NeuronParams NeuronArrays::params(std::size_t i) const {
    return {C[i], gL[i], EL[i], VT[i], DeltaT[i], Vpeak[i], Vreset[i], t_ref[i], a[i], b[i], tau_w[i]};
}

void NeuronArrays::push_back(const NeuronParams& p) {
    C.push_back(p.C);
    gL.push_back(p.gL);
    EL.push_back(p.EL);
    VT.push_back(p.VT);
    DeltaT.push_back(p.DeltaT);
    Vpeak.push_back(p.Vpeak);
    Vreset.push_back(p.Vreset);
    t_ref.push_back(p.t_ref);
    a.push_back(p.a);
    b.push_back(p.b);
    tau_w.push_back(p.tau_w);
    V.push_back(p.EL);
    w.push_back(0.0);
    ref.push_back(0.0);
}

std::uint32_t NetworkInstance::population_index(const std::string& label) const {
    for (std::uint32_t i = 0; i < populations.size(); ++i)
        if (populations[i].label == label) return i;
    fail(ErrorKind::Config, "unknown population '" + label + "'");
}

void NetworkInstance::reset() {
    std::copy(neurons.EL.begin(), neurons.EL.end(), neurons.V.begin());
    std::fill(neurons.w.begin(), neurons.w.end(), 0.0);
    std::fill(neurons.ref.begin(), neurons.ref.end(), 0.0);
    std::fill(I_noise.begin(), I_noise.end(), 0.0);
    for (auto& c : connections) std::fill(c.I_syn.begin(), c.I_syn.end(), 0.0);
}

NetworkInstance build_network(const NetworkSpec& spec) {
    validate(spec);
    NetworkInstance net;
    std::uint32_t offset = 0;
    for (const auto& p : spec.populations) {
        net.populations.push_back(
            {p.label, offset, p.n, p.I_const, p.drive_onset, p.noise_rate, p.noise_weight, p.noise_tau_s});
        for (std::uint32_t i = 0; i < p.n; ++i) {
            Rng rng(stream_seed(spec.seed, kMismatchDomain, offset + i));
            const NeuronParams q = apply_mismatch(p.neuron_params, spec.mismatch_cv, rng);
            validate(q, "population '" + p.label + "' after mismatch");
            net.neurons.push_back(q);
        }
        offset += p.n;
    }
    net.I_noise.assign(offset, 0.0);

    for (std::size_t ci = 0; ci < spec.connections.size(); ++ci) {
        const auto& c = spec.connections[ci];
        ConnectionInstance inst;
        inst.src = net.population_index(c.src);
        inst.dst = net.population_index(c.dst);
        inst.synapse = {c.tau_s, c.weight, c.sign};
        inst.delay = c.delay;
        const std::uint32_t n_src = net.populations[inst.src].n;
        const std::uint32_t n_dst = net.populations[inst.dst].n;
        inst.all_to_all = !c.fan_in || *c.fan_in == n_src;
        if (!inst.all_to_all) {
            Rng rng(stream_seed(spec.seed, kConnectDomain, ci));
            std::vector<std::uint32_t> pool(n_src);
            inst.sources.resize(n_dst);
            for (auto& chosen : inst.sources) {
                // Partial Fisher-Yates: the first fan_in entries form the sample.
                std::iota(pool.begin(), pool.end(), 0u);
                for (std::uint32_t k = 0; k < *c.fan_in; ++k) {
                    const auto j = k + static_cast<std::uint32_t>(rng.below(n_src - k));
                    std::swap(pool[k], pool[j]);
                }
                chosen.assign(pool.begin(), pool.begin() + *c.fan_in);
                std::sort(chosen.begin(), chosen.end());
            }
        }
        inst.I_syn.assign(n_dst, 0.0);
        net.connections.push_back(std::move(inst));
    }
    return net;
}

} // namespace nr
