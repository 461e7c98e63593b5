#include "neurorhythm/error.hpp"
#include "neurorhythm/neuron.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nr;

TEST(Neuron, DerivativesAtEL) {
    NeuronParams p;
    const auto d = adex_derivatives(rest_state(p), p, 0.0);
    // only the exponential term survives at EL
    EXPECT_DOUBLE_EQ(d.dV, p.gL * p.DeltaT * std::exp((p.EL - p.VT) / p.DeltaT) / p.C);
    EXPECT_LT(d.dV, 1e-5);
    EXPECT_EQ(d.dw, 0.0);
}

TEST(Neuron, EquilibriumIsZeroOfDerivatives) {
    NeuronParams p;
    p.a = 4.0;
    const auto s = equilibrium_state(p);
    EXPECT_GT(s.V, p.EL);
    EXPECT_LT(s.V - p.EL, 1e-3);
    const auto d = adex_derivatives(s, p, 0.0);
    EXPECT_NEAR(d.dV, 0.0, 1e-15);
    EXPECT_EQ(d.dw, 0.0);
}

TEST(Neuron, NoEquilibriumWhenThresholdAtRest) {
    NeuronParams p;
    p.VT = p.EL;
    EXPECT_THROW(equilibrium_state(p), Error);
}

TEST(Neuron, ConstantDriveFires) {
    NeuronParams p;
    NeuronState s = rest_state(p);
    int spikes = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto r = step_neuron(s, p, 500.0, 0.1);
        s = r.state;
        spikes += r.spiked;
    }
    EXPECT_GT(spikes, 5);
}

TEST(Neuron, ResetRule) {
    NeuronParams p;
    p.b = 30.0;
    NeuronState s{-5.0, 7.0, 0.0};
    const auto r = step_neuron(s, p, 5000.0, 0.1);
    ASSERT_TRUE(r.spiked);
    EXPECT_EQ(r.state.V, p.Vreset);
    EXPECT_EQ(r.state.ref_remaining, p.t_ref);
    EXPECT_GT(r.state.w, 7.0 + p.b - 1.0);
}

TEST(Neuron, RefractoryHold) {
    NeuronParams p;
    p.t_ref = 5.0;
    NeuronState s{p.Vreset, 0.0, p.t_ref};
    for (int k = 0; k < 49; ++k) {
        const auto r = step_neuron(s, p, 1e5, 0.1);
        EXPECT_FALSE(r.spiked);
        EXPECT_EQ(r.state.V, p.Vreset);
        s = r.state;
    }
    EXPECT_GT(s.ref_remaining, 0.0);
    s = step_neuron(s, p, 1e5, 0.1).state;
    EXPECT_EQ(s.ref_remaining, 0.0);
}

TEST(Neuron, ExponentialClampKeepsFinite) {
    NeuronParams p;
    p.Vpeak = 200.0;
    NeuronState s{150.0, 0.0, 0.0};
    const auto d = adex_derivatives(s, p, 0.0);
    EXPECT_TRUE(std::isfinite(d.dV));
}

TEST(Neuron, ValidateRejects) {
    NeuronParams p;
    p.C = 0;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.Vreset = 1.0;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.b = -1;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.tau_w = NAN;
    EXPECT_THROW(validate(p), Error);
    try {
        p = {};
        p.gL = -1;
        validate(p, "P1_E");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("P1_E"), std::string::npos);
    }
}

TEST(Neuron, StepRejectsNonFinite) {
    NeuronParams p;
    EXPECT_THROW(step_neuron({NAN, 0, 0}, p, 0, 0.1), Error);
    EXPECT_THROW(step_neuron(rest_state(p), p, INFINITY, 0.1), Error);
}

TEST(Synapse, ZeroStaysZero) {
    SynapseParams sp{5.0, 100.0, 1};
    EXPECT_EQ(step_synapse({0.0}, sp, 0.1, 0).I_syn, 0.0);
}

TEST(Synapse, ClosedFormDecay) {
    SynapseParams sp{20.0, 100.0, 1};
    auto s = step_synapse({0.0}, sp, 0.1, 1);
    EXPECT_EQ(s.I_syn, 100.0);
    for (int k = 0; k < 200; ++k) s = step_synapse(s, sp, 0.1, 0);
    EXPECT_NEAR(s.I_syn, 100.0 * std::exp(-1.0), 1e-9);
}

TEST(Synapse, ImpulseResponseShape) {
    SynapseParams sp{5.0, 50.0, -1};
    auto s = step_synapse({0.0}, sp, 0.1, 1);
    double prev = s.I_syn;
    for (int k = 0; k < 500; ++k) {
        s = step_synapse(s, sp, 0.1, 0);
        EXPECT_LT(s.I_syn, prev);
        EXPECT_GE(s.I_syn, 0.0);
        prev = s.I_syn;
    }
}

TEST(Synapse, ValidateRejects) {
    EXPECT_THROW(validate(SynapseParams{0.0, 1.0, 1}), Error);
    EXPECT_THROW(validate(SynapseParams{5.0, -1.0, 1}), Error);
    EXPECT_THROW(validate(SynapseParams{5.0, 1.0, 0}), Error);
}

TEST(Neuron, MonotoneFI) {
    NeuronParams p; // a = b = 0
    int prev = -1;
    for (double I = 0; I <= 1500; I += 50) {
        NeuronState s = rest_state(p);
        int n = 0;
        for (int k = 0; k < 10000; ++k) {
            const auto r = step_neuron(s, p, I, 0.1);
            s = r.state;
            n += r.spiked;
        }
        EXPECT_GE(n, prev) << "I=" << I;
        prev = n;
    }
}

TEST(Neuron, RefractoryWMatchesClosedForm) {
    // w relaxes linearly to a (Vreset - EL) while V is held
    NeuronParams p;
    p.a = 3.0;
    p.tau_w = 50.0;
    p.t_ref = 1000.0;
    NeuronState s{p.Vreset, 200.0, p.t_ref};
    for (int k = 0; k < 1000; ++k) s = step_neuron(s, p, 0.0, 0.1).state;
    const double w_inf = p.a * (p.Vreset - p.EL);
    EXPECT_NEAR(s.w, w_inf + (200.0 - w_inf) * std::exp(-100.0 / p.tau_w), 1e-9);
}
