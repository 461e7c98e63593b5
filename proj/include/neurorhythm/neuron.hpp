#pragma once

// Adaptive exponential integrate-and-fire (AdEx) point neuron and
// first-order exponential current synapse.
//
// Units throughout: mV, ms, pF, nS, pA. With these units
// pA / pF = mV / ms and nS * mV = pA, so no scale factors appear.

#include <cmath>
#include <string>

namespace nr {

struct NeuronParams {
    double C = 200.0;      // capacitance (pF)
    double gL = 10.0;      // leak conductance (nS)
    double EL = -70.0;     // leak reversal (mV)
    double VT = -50.0;     // exponential threshold (mV)
    double DeltaT = 2.0;   // slope factor (mV)
    double Vpeak = 0.0;    // spike cutoff (mV)
    double Vreset = -58.0; // reset potential (mV)
    double t_ref = 2.0;    // refractory period (ms)
    double a = 0.0;        // subthreshold adaptation (nS)
    double b = 0.0;        // spike-triggered adaptation increment (pA)
    double tau_w = 100.0;  // adaptation time constant (ms)

    bool operator==(const NeuronParams&) const = default;
};

struct NeuronState {
    double V = -70.0;
    double w = 0.0;
    double ref_remaining = 0.0;

    bool operator==(const NeuronState&) const = default;
};

inline NeuronState rest_state(const NeuronParams& p) { return {p.EL, 0.0, 0.0}; }

// Stable zero-input equilibrium (V*, a (V* - EL)). The exponential term
// is nonzero at EL, so V* sits slightly above EL. Error(Config) when the
// neuron has no subthreshold equilibrium at I_in = 0.
NeuronState equilibrium_state(const NeuronParams& p);

// Throws Error(Config) naming the first violated invariant. `context`
// prefixes the message (e.g. a population label).
void validate(const NeuronParams& p, const std::string& context = {});

struct Derivatives {
    double dV; // mV/ms
    double dw; // pA/ms
};

// Exponential argument (V - VT) / DeltaT is clamped here before exp().
inline constexpr double kExpArgClamp = 20.0;

// Refractory timers below this are treated as expired; absorbs the
// rounding residue of repeatedly subtracting dt.
inline constexpr double kRefEpsilon = 1e-9;

Derivatives adex_derivatives(const NeuronState& s, const NeuronParams& p, double I_in);

struct NeuronStep {
    NeuronState state;
    bool spiked = false;
};

// One classical Runge-Kutta (RK4) step of length dt (0 < dt <= 1 ms). A crossing of
// Vpeak resets V to Vreset, adds b to w and starts the refractory hold
// within the same step.
NeuronStep step_neuron(const NeuronState& s, const NeuronParams& p, double I_in, double dt);

struct SynapseParams {
    double tau_s = 5.0;  // ms
    double weight = 0.0; // pA per presynaptic spike
    int sign = 1;        // +1 excitatory, -1 inhibitory

    bool operator==(const SynapseParams&) const = default;
};

struct SynapseState {
    double I_syn = 0.0; // magnitude (pA), applied with the synapse sign

    bool operator==(const SynapseState&) const = default;
};

void validate(const SynapseParams& p, const std::string& context = {});

// Closed-form decay over dt followed by a jump of n * weight.
SynapseState step_synapse(const SynapseState& s, const SynapseParams& p, double dt, unsigned n_presyn_spikes);

namespace detail {

// Shared arithmetic for the scalar path. The SIMD kernels reproduce the
// same operation order so that results are bit-identical.
struct AdexUpdate {
    double V;
    double w;
    double ref;
    bool spiked;
};

struct AdexRhs {
    double dV;
    double dw;
};

// V is clamped at Vpeak inside every stage.
inline AdexRhs adex_rhs(double V, double w, double I, double C, double gL, double EL, double VT, double DeltaT,
                        double Vpeak, double a, double tau_w) {
    const double Vc = V < Vpeak ? V : Vpeak;
    double arg = (Vc - VT) / DeltaT;
    arg = arg < kExpArgClamp ? arg : kExpArgClamp;
    const double lin = -gL * (Vc - EL);
    const double ex = gL * DeltaT * std::exp(arg);
    return {(lin + ex - w + I) / C, (a * (Vc - EL) - w) / tau_w};
}

inline double adex_rhs_w(double w, double Vhold, double EL, double a, double tau_w) {
    return (a * (Vhold - EL) - w) / tau_w;
}

// weights 1 2 2 1, accumulated left to right
inline double rk4_combine(double x, double dt6, double k1, double k2, double k3, double k4) {
    double sum = k1 + 2.0 * k2;
    sum = sum + 2.0 * k3;
    sum = sum + k4;
    return x + dt6 * sum;
}

inline AdexUpdate adex_update(double V, double w, double ref, double I, double dt, double C, double gL,
                              double EL, double VT, double DeltaT, double Vpeak, double Vreset, double t_ref,
                              double a, double b, double tau_w) {
    const double half = 0.5 * dt, dt6 = dt / 6.0;
    if (ref > kRefEpsilon) {
        const double k1 = adex_rhs_w(w, Vreset, EL, a, tau_w);
        const double k2 = adex_rhs_w(w + half * k1, Vreset, EL, a, tau_w);
        const double k3 = adex_rhs_w(w + half * k2, Vreset, EL, a, tau_w);
        const double k4 = adex_rhs_w(w + dt * k3, Vreset, EL, a, tau_w);
        double r = ref - dt;
        if (r < kRefEpsilon) r = 0.0;
        return {Vreset, rk4_combine(w, dt6, k1, k2, k3, k4), r, false};
    }
    const double Vc = V < Vpeak ? V : Vpeak;
    const auto k1 = adex_rhs(Vc, w, I, C, gL, EL, VT, DeltaT, Vpeak, a, tau_w);
    const auto k2 = adex_rhs(Vc + half * k1.dV, w + half * k1.dw, I, C, gL, EL, VT, DeltaT, Vpeak, a, tau_w);
    const auto k3 = adex_rhs(Vc + half * k2.dV, w + half * k2.dw, I, C, gL, EL, VT, DeltaT, Vpeak, a, tau_w);
    const auto k4 = adex_rhs(Vc + dt * k3.dV, w + dt * k3.dw, I, C, gL, EL, VT, DeltaT, Vpeak, a, tau_w);
    const double Vn = rk4_combine(Vc, dt6, k1.dV, k2.dV, k3.dV, k4.dV);
    const double wn = rk4_combine(w, dt6, k1.dw, k2.dw, k3.dw, k4.dw);
    if (Vn >= Vpeak) return {Vreset, wn + b, t_ref, true};
    return {Vn, wn, 0.0, false};
}

} // namespace detail

} // namespace nr
