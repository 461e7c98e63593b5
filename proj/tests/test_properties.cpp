// Randomized property suites. Every case is seeded from its index, so a
// failure prints a reproducible case number.

#include "neurorhythm/analysis.hpp"
#include "neurorhythm/config.hpp"
#include "neurorhythm/engine.hpp"
#include "neurorhythm/error.hpp"
#include "neurorhythm/network.hpp"
#include "neurorhythm/neuron.hpp"
#include "neurorhythm/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace nr;

namespace {

constexpr int kCases = 200;

double in(Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

NeuronParams random_params(Rng& r) {
    NeuronParams p;
    p.C = in(r, 50, 400);
    p.gL = in(r, 2, 20);
    p.EL = in(r, -80, -60);
    p.VT = p.EL + in(r, 8, 25);
    p.DeltaT = in(r, 0.5, 3);
    p.Vpeak = in(r, -10, 20);
    p.Vreset = in(r, -70, -40);
    p.t_ref = in(r, 0, 10);
    p.a = r.uniform() < 0.5 ? 0.0 : in(r, 0, 6);
    p.b = r.uniform() < 0.3 ? 0.0 : in(r, 0, 80);
    p.tau_w = in(r, 10, 1000);
    return p;
}

double pick(Rng& r, std::initializer_list<double> xs) { return *(xs.begin() + r.below(xs.size())); }

SpikeRecord three_phase_record(Rng& r, double& duration) {
    SpikeRecord rec;
    rec.populations = {"P1_E", "P2_E", "P3_E"};
    rec.sizes = {4, 4, 4};
    rec.dt = 0.1;
    const double period = in(r, 300, 2000);
    const double o2 = in(r, 0.2, 0.4) * period, o3 = in(r, 0.55, 0.8) * period;
    const int cycles = 3 + static_cast<int>(r.below(10));
    double t = in(r, 0, 200);
    for (int c = 0; c < cycles; ++c) {
        const std::array<double, 3> starts{t, t + o2 + in(r, -10, 10), t + o3 + in(r, -10, 10)};
        for (std::uint32_t p = 0; p < 3; ++p) {
            const int n = 3 + static_cast<int>(r.below(5));
            for (int k = 0; k < n; ++k)
                rec.events.push_back({starts[p] + k * in(r, 2, 20), p, static_cast<std::uint32_t>(r.below(4))});
        }
        t += period + in(r, -30, 30);
    }
    std::stable_sort(rec.events.begin(), rec.events.end(), [](auto& a, auto& b) { return a.t < b.t; });
    duration = t + 100;
    rec.duration = duration;
    return rec;
}

} // namespace

// Rest-state fixed point: at zero input a neuron placed at its equilibrium
// stays there; started at (EL, 0) it stays subthreshold and settles onto it.
TEST(Property, RestStateFixedPoint) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(1000 + c);
        const auto p = random_params(r);
        const double dt = pick(r, {0.05, 0.1, 0.5, 1.0});
        const auto eq = equilibrium_state(p);
        NeuronState s = eq;
        for (int k = 0; k < 5000; ++k) {
            const auto a = step_neuron(s, p, 0.0, dt);
            ASSERT_FALSE(a.spiked);
            s = a.state;
        }
        EXPECT_EQ(s, eq);

        NeuronState from_el = rest_state(p);
        const double slow = std::max(p.C / p.gL, p.tau_w);
        const auto steps = static_cast<long>(std::ceil(10 * slow / dt));
        for (long k = 0; k < steps; ++k) {
            const auto b = step_neuron(from_el, p, 0.0, dt);
            ASSERT_FALSE(b.spiked);
            ASSERT_LT(b.state.V, p.VT);
            from_el = b.state;
        }
        EXPECT_LE(std::abs(from_el.V - eq.V), 0.01 * std::abs(p.EL - eq.V) + 1e-9);
    }
}

// Synapse linearity: two spikes = sum of the two shifted single responses.
TEST(Property, SynapseLinearity) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(2000 + c);
        const SynapseParams sp{in(r, 0.5, 100), in(r, 0, 2000), r.uniform() < 0.5 ? 1 : -1};
        const double dt = pick(r, {0.01, 0.1, 0.25, 1.0});
        const int k1 = static_cast<int>(r.below(200)), k2 = k1 + static_cast<int>(r.below(200));
        const unsigned n1 = 1 + static_cast<unsigned>(r.below(3)), n2 = 1 + static_cast<unsigned>(r.below(3));
        SynapseState both{}, one{}, two{};
        for (int k = 0; k < 600; ++k) {
            const unsigned a = k == k1 ? n1 : 0, b = k == k2 ? n2 : 0;
            both = step_synapse(both, sp, dt, a + b);
            one = step_synapse(one, sp, dt, a);
            two = step_synapse(two, sp, dt, b);
            const double sum = one.I_syn + two.I_syn;
            ASSERT_NEAR(both.I_syn, sum, 1e-12 * std::max(1.0, sum)) << "step " << k;
            ASSERT_GE(both.I_syn, 0.0);
        }
    }
}

// Refractoriness over whole simulated records of random networks.
TEST(Property, RefractoryRespected) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(3000 + c);
        NetworkSpec s;
        s.seed = r.next();
        s.mismatch_cv = in(r, 0, 0.2);
        const int n_pops = 1 + static_cast<int>(r.below(3));
        for (int p = 0; p < n_pops; ++p) {
            PopulationSpec ps;
            ps.label = "Q" + std::to_string(p);
            ps.n = 1 + static_cast<std::uint32_t>(r.below(6));
            ps.neuron_params = random_params(r);
            ps.I_const = in(r, 0, 3000);
            ps.noise_rate = r.uniform() < 0.5 ? 0.0 : in(r, 0, 2000);
            ps.noise_weight = in(r, 0, 300);
            s.populations.push_back(ps);
        }
        for (int k = 0; k < 2; ++k)
            s.connections.push_back({"Q" + std::to_string(r.below(n_pops)), "Q" + std::to_string(r.below(n_pops)),
                                     r.uniform() < 0.5 ? 1 : -1, in(r, 0, 500), in(r, 1, 20), std::nullopt,
                                     pick(r, {0.0, 1.0, 5.0})});
        SimulationConfig cfg;
        cfg.dt = pick(r, {0.05, 0.1, 0.2});
        cfg.duration = 400;
        cfg.trial_seed = r.next();
        auto net = build_network(s);
        const auto rec = run(net, cfg).spikes;
        std::map<std::pair<std::uint32_t, std::uint32_t>, double> last;
        for (const auto& e : rec.events) {
            const auto key = std::make_pair(e.population, e.neuron);
            const double t_ref = s.populations[e.population].neuron_params.t_ref;
            if (auto it = last.find(key); it != last.end()) {
                ASSERT_GE(e.t - it->second, t_ref - 1e-9) << rec.populations[e.population] << "[" << e.neuron << "]";
            }
            last[key] = e.t;
        }
    }
}

// Rate mass conservation for unsmoothed bins.
TEST(Property, RateMassConservation) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(4000 + c);
        SpikeRecord rec;
        rec.populations = {"A", "B"};
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(r.below(20));
        rec.sizes = {n, 3};
        rec.duration = in(r, 10, 5000);
        const auto count = static_cast<std::size_t>(r.below(2000));
        for (std::size_t k = 0; k < count; ++k) {
            const double t = r.uniform() < 0.02 ? rec.duration : in(r, 0, rec.duration);
            rec.events.push_back({t, 0, static_cast<std::uint32_t>(r.below(n))});
            if (r.uniform() < 0.3) rec.events.push_back({t, 1, 0});
        }
        std::stable_sort(rec.events.begin(), rec.events.end(), [](auto& a, auto& b) { return a.t < b.t; });
        const double bin = pick(r, {0.1, 1.0, 5.0, 7.3, 20.0, 100.0});
        const auto rate = population_rate(rec, "A", bin, 0.0);
        double mass = 0;
        for (double x : rate.rate) {
            ASSERT_GE(x, 0.0);
            mass += x * bin * n / 1000.0;
        }
        EXPECT_EQ(std::llround(mass), static_cast<long long>(count));
        EXPECT_NEAR(mass, static_cast<double>(count), 1e-9 * std::max<double>(1, count));
    }
}

// Shifting every spike by a constant shifts onsets and nothing else.
TEST(Property, MetricsShiftInvariance) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(5000 + c);
        double duration = 0;
        const auto rec = three_phase_record(r, duration);
        const double shift = in(r, 0, 5000);
        auto moved = rec;
        for (auto& e : moved.events) e.t += shift;
        moved.duration += shift;
        const BurstParams bp{25, 3};
        const auto a = oscillation_metrics(rec, {"P1_E", "P2_E", "P3_E"}, bp);
        const auto b = oscillation_metrics(moved, {"P1_E", "P2_E", "P3_E"}, bp);
        const double tol = 1e-9 * (duration + shift);
        EXPECT_NEAR(a.freq, b.freq, 1e-9 * a.freq);
        EXPECT_NEAR(a.offsets[0], b.offsets[0], tol);
        EXPECT_NEAR(a.offsets[1], b.offsets[1], tol);
        EXPECT_NEAR(a.jitter_std, b.jitter_std, tol);
        EXPECT_EQ(a.n_cycles, b.n_cycles);
        for (const auto& [label, on] : a.cycle_onsets) {
            const auto& mv = b.cycle_onsets.at(label);
            ASSERT_EQ(on.size(), mv.size());
            for (std::size_t k = 0; k < on.size(); ++k) EXPECT_NEAR(mv[k], on[k] + shift, tol);
        }
    }
}

// parse(serialize(spec)) == spec, field for field.
TEST(Property, ConfigRoundTrip) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(6000 + c);
        NetworkSpec s;
        s.seed = r.next();
        s.mismatch_cv = r.uniform() * 0.3;
        const int n_pops = 1 + static_cast<int>(r.below(5));
        for (int p = 0; p < n_pops; ++p) {
            PopulationSpec ps;
            ps.label = "pop_" + std::to_string(p) + (r.uniform() < 0.5 ? "_E" : "_I");
            ps.n = 1 + static_cast<std::uint32_t>(r.below(100));
            ps.neuron_params = random_params(r);
            ps.I_const = in(r, -1000, 1000);
            ps.noise_rate = r.uniform() * 1000;
            ps.noise_weight = r.uniform() * 100;
            ps.noise_tau_s = in(r, 0.1, 10);
            ps.drive_onset = r.uniform() < 0.5 ? 0.0 : r.uniform() * 1000;
            s.populations.push_back(ps);
        }
        const int n_conn = static_cast<int>(r.below(6));
        for (int k = 0; k < n_conn; ++k) {
            ConnectionSpec cs;
            const auto& src = s.populations[r.below(n_pops)];
            cs.src = src.label;
            cs.dst = s.populations[r.below(n_pops)].label;
            cs.sign = r.uniform() < 0.5 ? 1 : -1;
            cs.weight = r.uniform() * 3000;
            cs.tau_s = in(r, 0.5, 300);
            if (r.uniform() < 0.5) cs.fan_in = 1 + static_cast<std::uint32_t>(r.below(src.n));
            cs.delay = r.uniform() * 100;
            s.connections.push_back(cs);
        }
        const auto text = serialize(s);
        const auto back = parse_network(text);
        EXPECT_EQ(back, s);
        EXPECT_EQ(serialize(back), text);
    }
}

// Mismatch keeps every parameter set valid for cv <= 0.3.
TEST(Property, MismatchValidity) {
    for (int c = 0; c < 5 * kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(7000 + c);
        const auto p = random_params(r);
        const double cv = c % 10 == 0 ? 0.3 : r.uniform() * 0.3;
        Rng m(r.next());
        const auto q = apply_mismatch(p, cv, m);
        EXPECT_NO_THROW(validate(q));
        const double lo = 1 - 4 * cv - 1e-12, hi = 1 + 4 * cv + 1e-12;
        EXPECT_GE(q.C / p.C, lo);
        EXPECT_LE(q.C / p.C, hi);
        EXPECT_GE(q.gL / p.gL, lo);
        EXPECT_LE(q.gL / p.gL, hi);
        EXPECT_GE((q.VT - q.EL) / (p.VT - p.EL), lo);
        EXPECT_LE((q.VT - q.EL) / (p.VT - p.EL), hi);
        EXPECT_GT(q.tau_w, 0);
        EXPECT_GE(q.b, 0);
    }
}

// Bursts are disjoint runs; bursts plus rejected spikes partition the input.
TEST(Property, BurstPartition) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(8000 + c);
        std::vector<double> t;
        double x = 0;
        const auto n = r.below(300);
        for (std::size_t k = 0; k < n; ++k) t.push_back(x += (r.uniform() < 0.2 ? in(r, 50, 500) : in(r, 0, 30)));
        const double max_isi = in(r, 5, 60);
        const auto min_spikes = 2 + static_cast<std::uint32_t>(r.below(5));
        const auto bursts = detect_bursts(t, max_isi, min_spikes);
        std::vector<int> owner(t.size(), -1);
        for (std::size_t b = 0; b < bursts.size(); ++b) {
            const auto& bu = bursts[b];
            ASSERT_GE(bu.n_spikes, min_spikes);
            ASSERT_LE(bu.t_start, bu.t_end);
            ASSERT_EQ(bu.t_start, t[bu.first]);
            ASSERT_EQ(bu.t_end, t[bu.first + bu.n_spikes - 1]);
            for (std::uint32_t k = bu.first; k < bu.first + bu.n_spikes; ++k) {
                ASSERT_EQ(owner[k], -1);
                owner[k] = static_cast<int>(b);
                if (k > bu.first) {
                    ASSERT_LE(t[k] - t[k - 1], max_isi);
                }
            }
            if (bu.first > 0) {
                ASSERT_GT(t[bu.first] - t[bu.first - 1], max_isi);
            }
        }
        // burst spikes plus rejected spikes reproduce the input
        std::vector<double> rebuilt;
        for (const auto& bu : bursts)
            for (std::uint32_t k = bu.first; k < bu.first + bu.n_spikes; ++k) rebuilt.push_back(t[k]);
        for (std::size_t k = 0; k < t.size(); ++k)
            if (owner[k] == -1) rebuilt.push_back(t[k]);
        std::sort(rebuilt.begin(), rebuilt.end());
        EXPECT_EQ(rebuilt, t);
        // rejected spikes sit in maximal runs shorter than min_spikes
        for (std::size_t k = 0; k < t.size();) {
            std::size_t e = k + 1;
            while (e < t.size() && t[e] - t[e - 1] <= max_isi) ++e;
            if (e - k < min_spikes) {
                for (std::size_t j = k; j < e; ++j) EXPECT_EQ(owner[j], -1);
            }
            k = e;
        }
        EXPECT_EQ(detect_bursts(t, max_isi, min_spikes), bursts); // idempotent
    }
}

// A perfectly periodic record has zero jitter.
TEST(Property, PeriodicJitterZero) {
    for (int c = 0; c < kCases; ++c) {
        SCOPED_TRACE("case " + std::to_string(c));
        Rng r(9000 + c);
        SpikeRecord rec;
        rec.populations = {"P1_E"};
        rec.sizes = {1};
        const double period = static_cast<double>(200 + r.below(2000));
        const double t0 = static_cast<double>(r.below(500));
        const int cycles = 2 + static_cast<int>(r.below(20));
        for (int k = 0; k < cycles; ++k)
            for (int j = 0; j < 3; ++j) rec.events.push_back({t0 + k * period + j * 4.0, 0, 0});
        rec.duration = t0 + cycles * period;
        const auto m = oscillation_metrics(rec, {"P1_E"}, {10, 3});
        EXPECT_EQ(m.jitter_std, 0.0);
        EXPECT_EQ(m.period, period);
    }
}
