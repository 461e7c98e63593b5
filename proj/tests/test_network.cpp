#include "neurorhythm/error.hpp"
#include "neurorhythm/network.hpp"
#include "neurorhythm/primitives.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nr;

namespace {

NetworkSpec two_pops() {
    NetworkSpec s;
    s.populations = {PopulationSpec{"A", 5}, PopulationSpec{"B", 3}};
    s.connections = {ConnectionSpec{"A", "B", 1, 10.0, 5.0, 2u, 1.0}};
    s.seed = 11;
    return s;
}

} // namespace

TEST(Network, EmptyConnectionsIndependentPopulations) {
    NetworkSpec s;
    s.populations = {PopulationSpec{"A", 2}, PopulationSpec{"B", 3}};
    const auto net = build_network(s);
    EXPECT_EQ(net.populations.size(), 2u);
    EXPECT_EQ(net.connections.size(), 0u);
    EXPECT_EQ(net.neurons.size(), 5u);
    EXPECT_EQ(net.populations[1].offset, 2u);
}

TEST(Network, ThreeOscillatorsSixPopulationsSixtyNeurons) {
    const auto net = build_network(build_three_phase({}));
    EXPECT_EQ(net.populations.size(), 6u);
    EXPECT_EQ(net.neurons.size(), 60u);
}

TEST(Network, BuildIsDeterministic) {
    const auto spec = build_three_phase({});
    EXPECT_EQ(build_network(spec), build_network(spec));
    auto other = spec;
    other.seed = 3;
    EXPECT_NE(build_network(spec).neurons, build_network(other).neurons);
}

TEST(Network, FanInSampling) {
    const auto net = build_network(two_pops());
    ASSERT_EQ(net.connections.size(), 1u);
    const auto& c = net.connections[0];
    EXPECT_FALSE(c.all_to_all);
    ASSERT_EQ(c.sources.size(), 3u);
    for (const auto& src : c.sources) {
        ASSERT_EQ(src.size(), 2u);
        EXPECT_LT(src[0], src[1]);
        EXPECT_LT(src[1], 5u);
    }
}

TEST(Network, ValidationErrors) {
    auto s = two_pops();
    s.populations[1].label = "A";
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.connections[0].dst = "X";
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.connections[0].fan_in = 9;
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.connections[0].delay = -1;
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.mismatch_cv = -0.1;
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.populations[0].n = 0;
    EXPECT_THROW(validate(s), Error);
    s = two_pops();
    s.populations[0].noise_rate = -1;
    EXPECT_THROW(validate(s), Error);
}

TEST(Network, MismatchZeroIsIdentity) {
    Rng rng(1);
    NeuronParams p;
    EXPECT_EQ(apply_mismatch(p, 0.0, rng), p);
}

TEST(Network, MismatchTouchesOnlyDesignatedFields) {
    Rng rng(5);
    NeuronParams p;
    p.b = 20;
    const auto q = apply_mismatch(p, 0.1, rng);
    EXPECT_NE(q.C, p.C);
    EXPECT_NE(q.gL, p.gL);
    EXPECT_NE(q.VT, p.VT);
    EXPECT_NE(q.tau_w, p.tau_w);
    EXPECT_NE(q.b, p.b);
    EXPECT_EQ(q.EL, p.EL);
    EXPECT_EQ(q.DeltaT, p.DeltaT);
    EXPECT_EQ(q.Vreset, p.Vreset);
    EXPECT_EQ(q.Vpeak, p.Vpeak);
    EXPECT_EQ(q.a, p.a);
    EXPECT_EQ(q.t_ref, p.t_ref);
}

TEST(Network, ResetRestoresFreshState) {
    const auto spec = two_pops();
    auto net = build_network(spec);
    net.neurons.V[0] = -10;
    net.neurons.w[2] = 5;
    net.connections[0].I_syn[1] = 3;
    net.reset();
    EXPECT_EQ(net, build_network(spec));
}
