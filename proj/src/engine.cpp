#include "neurorhythm/engine.hpp"

#include "neurorhythm/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace nr {

void validate(const SimulationConfig& c) {
    if (!(std::isfinite(c.dt) && c.dt > 0 && c.dt <= 1.0)) fail(ErrorKind::Config, "simulation dt must be in (0, 1] ms");
    if (!(std::isfinite(c.duration) && c.duration >= c.dt))
        fail(ErrorKind::Config, "simulation duration must be >= dt");
}

std::optional<std::uint32_t> SpikeRecord::find(const std::string& label) const {
    for (std::uint32_t i = 0; i < populations.size(); ++i)
        if (populations[i] == label) return i;
    return std::nullopt;
}

std::uint32_t SpikeRecord::index_of(const std::string& label) const {
    if (auto i = find(label)) return *i;
    fail(ErrorKind::Analysis, "unknown population '" + label + "'");
}

std::vector<double> SpikeRecord::times(std::uint32_t population) const {
    std::vector<double> out;
    for (const auto& e : events)
        if (e.population == population) out.push_back(e.t);
    return out;
}

std::vector<double> SpikeRecord::times(std::uint32_t population, std::uint32_t neuron) const {
    std::vector<double> out;
    for (const auto& e : events)
        if (e.population == population && e.neuron == neuron) out.push_back(e.t);
    return out;
}

namespace {

std::size_t delay_steps(double delay, double dt, std::size_t conn) {
    const double q = delay / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-6 * std::max(1.0, q))
        fail(ErrorKind::Config, "connection #" + std::to_string(conn) + ": delay " + std::to_string(delay) +
                                    " ms is not a multiple of dt");
    return static_cast<std::size_t>(r);
}

} // namespace

RunResult run(NetworkInstance& net, const SimulationConfig& config, const kernels::KernelTable& kernels) {
    validate(config);
    const double dt = config.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(std::floor(config.duration / dt + 1e-9)));
    const std::size_t N = net.neurons.size();
    const std::size_t n_pops = net.populations.size();

    std::vector<std::uint32_t> pop_of(N);
    for (std::uint32_t p = 0; p < n_pops; ++p)
        for (std::uint32_t i = 0; i < net.populations[p].n; ++i) pop_of[net.populations[p].offset + i] = p;

    // Spike history ring: per step, per-neuron flags and per-population counts.
    std::size_t max_delay = 0;
    std::vector<std::size_t> delays(net.connections.size());
    std::vector<double> factors(net.connections.size());
    for (std::size_t c = 0; c < net.connections.size(); ++c) {
        delays[c] = delay_steps(net.connections[c].delay, dt, c);
        max_delay = std::max(max_delay, delays[c]);
        factors[c] = std::exp(-dt / net.connections[c].synapse.tau_s);
    }
    const std::size_t ring = max_delay + 1;
    std::vector<std::uint8_t> flag_hist(ring * N, 0);
    std::vector<std::uint32_t> count_hist(ring * n_pops, 0);

    std::vector<double> noise_factor(n_pops), noise_lambda(n_pops);
    for (std::size_t p = 0; p < n_pops; ++p) {
        noise_factor[p] = std::exp(-dt / net.populations[p].noise_tau_s);
        noise_lambda[p] = net.populations[p].noise_rate * dt * 1e-3;
    }
    std::vector<Rng> noise_rng;
    noise_rng.reserve(N);
    for (std::size_t i = 0; i < N; ++i) noise_rng.emplace_back(stream_seed(config.trial_seed, kNoiseDomain, i));

    std::vector<std::pair<std::uint32_t, std::uint32_t>> traced; // (global index, series index)
    RunResult result;
    if (!config.trace_neurons.empty()) {
        result.trace.emplace();
        for (const auto& tgt : config.trace_neurons) {
            const auto p = net.population_index(tgt.population);
            if (tgt.index >= net.populations[p].n)
                fail(ErrorKind::Config, "trace target " + tgt.population + "[" + std::to_string(tgt.index) +
                                            "] out of range");
            traced.emplace_back(net.populations[p].offset + tgt.index,
                                static_cast<std::uint32_t>(result.trace->series.size()));
            TraceSeries s;
            s.target = tgt;
            s.t.reserve(n_steps + 1);
            s.V.reserve(n_steps + 1);
            s.w.reserve(n_steps + 1);
            result.trace->series.push_back(std::move(s));
        }
    }
    auto sample_trace = [&](double t) {
        for (auto [g, s] : traced) {
            auto& ser = result.trace->series[s];
            ser.t.push_back(t);
            ser.V.push_back(net.neurons.V[g]);
            ser.w.push_back(net.neurons.w[g]);
        }
    };
    sample_trace(0.0);

    auto& spikes = result.spikes;
    spikes.duration = config.duration;
    spikes.dt = dt;
    for (const auto& p : net.populations) {
        spikes.populations.push_back(p.label);
        spikes.sizes.push_back(p.n);
    }

    auto& nr_ = net.neurons;
    const kernels::NeuronBlock block{nr_.V, nr_.w, nr_.ref, nr_.C, nr_.gL, nr_.EL, nr_.VT, nr_.DeltaT,
                                     nr_.Vpeak, nr_.Vreset, nr_.t_ref, nr_.a, nr_.b, nr_.tau_w};
    std::vector<double> input(N), counts, noise_counts(N);
    std::vector<std::uint8_t> spiked(N);

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t0 = static_cast<double>(step) * dt;

        // Synapses: decay + delivered jumps.
        for (std::size_t c = 0; c < net.connections.size(); ++c) {
            auto& conn = net.connections[c];
            const std::size_t d = delays[c];
            std::uint32_t pop_count = 0;
            std::size_t slot = 0;
            if (step >= d + 1) {
                slot = (step - 1 - d) % ring;
                pop_count = count_hist[slot * n_pops + conn.src];
            }
            if (conn.all_to_all || pop_count == 0) {
                kernels.decay_add(conn.I_syn, factors[c], static_cast<double>(pop_count) * conn.synapse.weight);
            } else {
                const std::uint8_t* flags = &flag_hist[slot * N + net.populations[conn.src].offset];
                counts.assign(conn.I_syn.size(), 0.0);
                for (std::size_t t = 0; t < conn.sources.size(); ++t) {
                    unsigned k = 0;
                    for (auto s : conn.sources[t]) k += flags[s];
                    counts[t] = k;
                }
                kernels.decay_accumulate(conn.I_syn, factors[c], counts, conn.synapse.weight);
            }
        }
        for (std::uint32_t p = 0; p < n_pops; ++p) {
            const auto& pop = net.populations[p];
            std::span<double> noise(net.I_noise.data() + pop.offset, pop.n);
            if (pop.noise_rate > 0) {
                std::span<double> nc(noise_counts.data() + pop.offset, pop.n);
                for (std::uint32_t i = 0; i < pop.n; ++i) nc[i] = noise_rng[pop.offset + i].poisson(noise_lambda[p]);
                kernels.decay_accumulate(noise, noise_factor[p], nc, pop.noise_weight);
            } else {
                kernels.decay_add(noise, noise_factor[p], 0.0);
            }
        }

        // Currents.
        for (std::uint32_t p = 0; p < n_pops; ++p) {
            const auto& pop = net.populations[p];
            const double drive = t0 >= pop.drive_onset ? pop.I_const : 0.0;
            for (std::uint32_t i = 0; i < pop.n; ++i) input[pop.offset + i] = drive + net.I_noise[pop.offset + i];
        }
        for (const auto& conn : net.connections) {
            double* in = input.data() + net.populations[conn.dst].offset;
            if (conn.synapse.sign > 0)
                for (std::size_t t = 0; t < conn.I_syn.size(); ++t) in[t] += conn.I_syn[t];
            else
                for (std::size_t t = 0; t < conn.I_syn.size(); ++t) in[t] -= conn.I_syn[t];
        }

        kernels.adex_step(block, input, dt, spiked);

        const double t1 = static_cast<double>(step + 1) * dt;
        const std::size_t slot = step % ring;
        std::uint8_t* flags = &flag_hist[slot * N];
        std::uint32_t* pc = &count_hist[slot * n_pops];
        std::fill(pc, pc + n_pops, 0u);
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(nr_.V[i]) || !std::isfinite(nr_.w[i])) {
                const auto& pop = net.populations[pop_of[i]];
                std::ostringstream os;
                os << "state diverged at t=" << t1 << " ms in " << pop.label << "[" << (i - pop.offset) << "]";
                fail(ErrorKind::Simulation, os.str());
            }
            flags[i] = spiked[i];
            if (spiked[i]) {
                ++pc[pop_of[i]];
                if (config.record_spikes)
                    spikes.events.push_back({t1, pop_of[i], static_cast<std::uint32_t>(i - net.populations[pop_of[i]].offset)});
            }
        }
        if (!traced.empty()) sample_trace(t1);
    }
    return result;
}

std::vector<SpikeRecord> run_trials(const NetworkSpec& spec, const SimulationConfig& config, std::size_t n_trials,
                                    std::uint64_t seed_base, unsigned threads) {
    if (n_trials < 1) fail(ErrorKind::Config, "run_trials: n_trials must be >= 1");
    validate(spec);
    validate(config);
    std::vector<SpikeRecord> out(n_trials);
    std::vector<std::exception_ptr> errors(n_trials);

    auto one = [&](std::size_t k) {
        try {
            SimulationConfig c = config;
            c.trial_seed = derive_trial_seed(seed_base, k);
            NetworkInstance inst = build_network(spec);
            out[k] = run(inst, c).spikes;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_trials));
    if (threads <= 1) {
        for (std::size_t k = 0; k < n_trials; ++k) one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < n_trials; k = next++) one(k);
            });
    }

    for (std::size_t k = 0; k < n_trials; ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const Error& e) {
            throw Error(e.kind(), "trial " + std::to_string(k) + ": " + e.what());
        }
    }
    return out;
}

} // namespace nr
