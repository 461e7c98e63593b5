#include "neurorhythm/kernels.hpp"

#include "neurorhythm/error.hpp"

#include <cstdlib>
#include <string>

namespace nr::kernels {

#ifndef NEURORHYTHM_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view to_string(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool cpu_supports(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
        return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) fail(ErrorKind::Config, "kernel set '" + std::string(to_string(isa)) + "' not supported");
    return isa == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

const KernelTable& active_kernels() {
    static const KernelTable& table = [&]() -> const KernelTable& {
        const char* env = std::getenv("NEURORHYTHM_KERNEL");
        if (env != nullptr && std::string(env) == "scalar") return scalar_kernels();
        if (cpu_supports(Isa::Avx2)) return *avx2_kernels();
        return scalar_kernels();
    }();
    return table;
}

} // namespace nr::kernels
