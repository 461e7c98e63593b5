#pragma once

// Data-parallel inner loops of the engine. Every kernel has a scalar
// reference implementation; SIMD variants must produce bit-identical
// output and are selected at runtime from what the CPU supports.

#include <cstdint>
#include <span>
#include <string_view>

namespace nr::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

// Structure-of-arrays view over a block of neurons. All spans share one length.
struct NeuronBlock {
    std::span<double> V, w, ref;
    std::span<const double> C, gL, EL, VT, DeltaT, Vpeak, Vreset, t_ref, a, b, tau_w;

    std::size_t size() const { return V.size(); }
};

struct KernelTable {
    Isa isa;
    // RK4 AdEx step; spiked[i] is set to 0/1.
    void (*adex_step)(const NeuronBlock& block, std::span<const double> input, double dt,
                      std::span<std::uint8_t> spiked);
    // current[i] = current[i] * factor + counts[i] * weight
    void (*decay_accumulate)(std::span<double> current, double factor, std::span<const double> counts,
                             double weight);
    // current[i] = current[i] * factor + increment
    void (*decay_add)(std::span<double> current, double factor, double increment);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// Best supported table, unless NEURORHYTHM_KERNEL=scalar is set in the environment.
const KernelTable& active_kernels();
const KernelTable& kernels_for(Isa isa);

} // namespace nr::kernels
