// scalar vs avx2: bitwise equality on random blocks and on whole runs

#include "neurorhythm/engine.hpp"
#include "neurorhythm/kernels.hpp"
#include "neurorhythm/primitives.hpp"
#include "neurorhythm/rng.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <vector>

using namespace nr;
using namespace nr::kernels;

namespace {

struct Block {
    std::vector<double> V, w, ref, C, gL, EL, VT, DT, Vpeak, Vreset, tref, a, b, tau_w;

    explicit Block(std::size_t n, Rng& rng) {
        for (std::size_t i = 0; i < n; ++i) {
            C.push_back(100 + 200 * rng.uniform());
            gL.push_back(5 + 10 * rng.uniform());
            EL.push_back(-75 + 10 * rng.uniform());
            VT.push_back(-55 + 10 * rng.uniform());
            DT.push_back(0.5 + 3 * rng.uniform());
            Vpeak.push_back(rng.uniform() < 0.5 ? 0.0 : 20.0);
            Vreset.push_back(-60 + 15 * rng.uniform());
            tref.push_back(5 * rng.uniform());
            a.push_back(4 * rng.uniform());
            b.push_back(50 * rng.uniform());
            tau_w.push_back(20 + 800 * rng.uniform());
            // states straddling threshold, peak and refractory boundaries
            V.push_back(-80 + 110 * rng.uniform());
            w.push_back(-50 + 200 * rng.uniform());
            ref.push_back(rng.uniform() < 0.3 ? 3 * rng.uniform() : 0.0);
        }
    }

    NeuronBlock view() { return {V, w, ref, C, gL, EL, VT, DT, Vpeak, Vreset, tref, a, b, tau_w}; }
};

bool bits_equal(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) return false;
    return true;
}

} // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
    EXPECT_TRUE(cpu_supports(Isa::Scalar));
    EXPECT_EQ(kernels_for(Isa::Scalar).isa, Isa::Scalar);
    EXPECT_EQ(to_string(Isa::Avx2), "avx2");
}

TEST(Kernels, AdexStepAvx2MatchesScalar) {
    if (!cpu_supports(Isa::Avx2)) GTEST_SKIP() << "no AVX2";
    const auto& s = scalar_kernels();
    const auto& v = kernels_for(Isa::Avx2);
    Rng rng(42);
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 61u}) {
        for (int rep = 0; rep < 50; ++rep) {
            Block A(n, rng);
            Block B = A;
            std::vector<double> input(n);
            for (auto& x : input) x = -500 + 3000 * rng.uniform();
            std::vector<std::uint8_t> sa(n), sb(n);
            for (int step = 0; step < 20; ++step) {
                s.adex_step(A.view(), input, 0.1, sa);
                v.adex_step(B.view(), input, 0.1, sb);
                ASSERT_TRUE(bits_equal(A.V, B.V)) << "n=" << n;
                ASSERT_TRUE(bits_equal(A.w, B.w));
                ASSERT_TRUE(bits_equal(A.ref, B.ref));
                ASSERT_EQ(sa, sb);
            }
        }
    }
}

TEST(Kernels, SynapseKernelsAvx2MatchScalar) {
    if (!cpu_supports(Isa::Avx2)) GTEST_SKIP() << "no AVX2";
    const auto& s = scalar_kernels();
    const auto& v = kernels_for(Isa::Avx2);
    Rng rng(7);
    for (std::size_t n : {1u, 4u, 5u, 33u}) {
        std::vector<double> a(n), counts(n);
        for (auto& x : a) x = 1000 * rng.uniform();
        auto b = a;
        for (int step = 0; step < 100; ++step) {
            for (auto& c : counts) c = static_cast<double>(rng.below(4));
            const double f = rng.uniform();
            s.decay_accumulate(a, f, counts, 37.5);
            v.decay_accumulate(b, f, counts, 37.5);
            s.decay_add(a, f, 12.25 * step);
            v.decay_add(b, f, 12.25 * step);
            ASSERT_TRUE(bits_equal(a, b));
        }
    }
}

TEST(Kernels, NetworkRunAvx2MatchesScalar) {
    if (!cpu_supports(Isa::Avx2)) GTEST_SKIP() << "no AVX2";
    ThreePhaseSpec sp;
    sp.noise_rate = 300;
    const auto spec = build_three_phase(sp);
    SimulationConfig cfg;
    cfg.duration = 3000;
    cfg.trial_seed = 9;
    cfg.trace_neurons = {{"P2_E", 3}};
    auto a = build_network(spec);
    auto b = build_network(spec);
    const auto ra = run(a, cfg, scalar_kernels());
    const auto rb = run(b, cfg, kernels_for(Isa::Avx2));
    EXPECT_GT(ra.spikes.events.size(), 100u);
    EXPECT_EQ(ra.spikes, rb.spikes);
    EXPECT_EQ(ra.trace, rb.trace);
    EXPECT_EQ(a, b);
}
