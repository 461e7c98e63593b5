#include "neurorhythm/kernels.hpp"
#include "neurorhythm/neuron.hpp"

namespace nr::kernels {

namespace {

void adex_step_scalar(const NeuronBlock& nb, std::span<const double> input, double dt,
                      std::span<std::uint8_t> spiked) {
    const std::size_t n = nb.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = detail::adex_update(nb.V[i], nb.w[i], nb.ref[i], input[i], dt, nb.C[i], nb.gL[i], nb.EL[i],
                                           nb.VT[i], nb.DeltaT[i], nb.Vpeak[i], nb.Vreset[i], nb.t_ref[i], nb.a[i],
                                           nb.b[i], nb.tau_w[i]);
        nb.V[i] = u.V;
        nb.w[i] = u.w;
        nb.ref[i] = u.ref;
        spiked[i] = u.spiked ? 1 : 0;
    }
}

void decay_accumulate_scalar(std::span<double> current, double factor, std::span<const double> counts,
                             double weight) {
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = current[i] * factor + counts[i] * weight;
}

void decay_add_scalar(std::span<double> current, double factor, double increment) {
    for (double& c : current) c = c * factor + increment;
}

} // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar, &adex_step_scalar, &decay_accumulate_scalar, &decay_add_scalar};
    return table;
}

} // namespace nr::kernels
