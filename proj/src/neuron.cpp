#include "neurorhythm/neuron.hpp"

#include "neurorhythm/error.hpp"

#include <cmath>
#include <sstream>

namespace nr {

namespace {

[[noreturn]] void invalid(const std::string& context, const std::string& what) {
    fail(ErrorKind::Config, context.empty() ? what : context + ": " + what);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void validate(const NeuronParams& p, const std::string& context) {
    for (double x : {p.C, p.gL, p.EL, p.VT, p.DeltaT, p.Vpeak, p.Vreset, p.t_ref, p.a, p.b, p.tau_w})
        if (!finite(x)) invalid(context, "neuron parameter is not finite");
    if (!(p.C > 0)) invalid(context, "C must be > 0");
    if (!(p.gL > 0)) invalid(context, "gL must be > 0");
    if (!(p.DeltaT > 0)) invalid(context, "DeltaT must be > 0");
    if (!(p.tau_w > 0)) invalid(context, "tau_w must be > 0");
    if (!(p.t_ref >= 0)) invalid(context, "t_ref must be >= 0");
    if (!(p.Vreset < p.Vpeak)) invalid(context, "Vreset must be < Vpeak");
    if (!(p.VT < p.Vpeak)) invalid(context, "VT must be < Vpeak");
    if (!(p.a >= 0)) invalid(context, "a must be >= 0");
    if (!(p.b >= 0)) invalid(context, "b must be >= 0");
}

void validate(const SynapseParams& p, const std::string& context) {
    if (!(finite(p.tau_s) && p.tau_s > 0)) invalid(context, "tau_s must be > 0");
    if (!(finite(p.weight) && p.weight >= 0)) invalid(context, "weight must be >= 0");
    if (p.sign != 1 && p.sign != -1) invalid(context, "sign must be +1 or -1");
}

NeuronState equilibrium_state(const NeuronParams& p) {
    validate(p);
    // f(V) = -(gL + a)(V - EL) + gL DeltaT exp((V - VT) / DeltaT), Newton from EL
    auto f = [&](double V) { return -(p.gL + p.a) * (V - p.EL) + p.gL * p.DeltaT * std::exp((V - p.VT) / p.DeltaT); };
    auto df = [&](double V) { return -(p.gL + p.a) + p.gL * std::exp((V - p.VT) / p.DeltaT); };
    double V = p.EL;
    for (int k = 0; k < 100; ++k) {
        const double slope = df(V);
        if (!(slope < 0)) fail(ErrorKind::Config, "no subthreshold equilibrium at zero input");
        const double next = V - f(V) / slope;
        if (next == V) break;
        V = next;
    }
    if (!(V < p.VT)) fail(ErrorKind::Config, "no subthreshold equilibrium at zero input");
    return {V, p.a * (V - p.EL), 0.0};
}

Derivatives adex_derivatives(const NeuronState& s, const NeuronParams& p, double I_in) {
    if (!finite(s.V) || !finite(s.w) || !finite(I_in)) {
        std::ostringstream os;
        os << "non-finite input to adex_derivatives (V=" << s.V << ", w=" << s.w << ", I_in=" << I_in << ")";
        fail(ErrorKind::Simulation, os.str());
    }
    const double Vc = s.V < p.Vpeak ? s.V : p.Vpeak;
    double arg = (Vc - p.VT) / p.DeltaT;
    arg = arg < kExpArgClamp ? arg : kExpArgClamp;
    const double lin = -p.gL * (Vc - p.EL);
    const double ex = p.gL * p.DeltaT * std::exp(arg);
    return {(lin + ex - s.w + I_in) / p.C, (p.a * (Vc - p.EL) - s.w) / p.tau_w};
}

NeuronStep step_neuron(const NeuronState& s, const NeuronParams& p, double I_in, double dt) {
    if (!(dt > 0)) fail(ErrorKind::Simulation, "step_neuron: dt must be > 0");
    if (!finite(s.V) || !finite(s.w) || !finite(s.ref_remaining) || !finite(I_in))
        fail(ErrorKind::Simulation, "step_neuron: non-finite state or input");
    const auto u = detail::adex_update(s.V, s.w, s.ref_remaining, I_in, dt, p.C, p.gL, p.EL, p.VT, p.DeltaT,
                                       p.Vpeak, p.Vreset, p.t_ref, p.a, p.b, p.tau_w);
    if (!finite(u.V) || !finite(u.w)) fail(ErrorKind::Simulation, "step_neuron: state diverged");
    return {{u.V, u.w, u.ref}, u.spiked};
}

SynapseState step_synapse(const SynapseState& s, const SynapseParams& p, double dt, unsigned n_presyn_spikes) {
    if (!(dt > 0)) fail(ErrorKind::Simulation, "step_synapse: dt must be > 0");
    const double factor = std::exp(-dt / p.tau_s);
    return {s.I_syn * factor + static_cast<double>(n_presyn_spikes) * p.weight};
}

} // namespace nr
