// Compiled with -mavx2 only; callers reach it through avx2_kernels()
// after a runtime CPU check. No FMA: contraction would change rounding
// relative to the scalar reference.

#include "neurorhythm/kernels.hpp"
#include "neurorhythm/neuron.hpp"

#include <immintrin.h>

#include <cmath>

namespace nr::kernels {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d load(std::span<const double> s, std::size_t i) { return _mm256_loadu_pd(s.data() + i); }
inline __m256d load(std::span<double> s, std::size_t i) { return _mm256_loadu_pd(s.data() + i); }

// exp() has no bit-exact vector form in libm, so it is evaluated per lane.
inline __m256d exp_lanes(__m256d x) {
    alignas(32) double tmp[kLanes];
    _mm256_store_pd(tmp, x);
    for (double& t : tmp) t = std::exp(t);
    return _mm256_load_pd(tmp);
}

// Lane-wise a < b ? a : b, matching the scalar ternary exactly.
inline __m256d select_less(__m256d a, __m256d b) {
    return _mm256_blendv_pd(b, a, _mm256_cmp_pd(a, b, _CMP_LT_OQ));
}

struct Rhs {
    __m256d dV;
    __m256d dw;
};

struct Lane {
    __m256d I, C, gL, EL, VT, DT, Vpeak, a, tau_w;
};

inline Rhs rhs(const Lane& p, __m256d V, __m256d w) {
    const __m256d clamp = _mm256_set1_pd(kExpArgClamp);
    const __m256d sign_bit = _mm256_set1_pd(-0.0);
    const __m256d Vc = select_less(V, p.Vpeak);
    const __m256d arg = select_less(_mm256_div_pd(_mm256_sub_pd(Vc, p.VT), p.DT), clamp);
    const __m256d lin = _mm256_mul_pd(_mm256_xor_pd(p.gL, sign_bit), _mm256_sub_pd(Vc, p.EL));
    const __m256d ex = _mm256_mul_pd(_mm256_mul_pd(p.gL, p.DT), exp_lanes(arg));
    const __m256d dV = _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_add_pd(lin, ex), w), p.I), p.C);
    const __m256d dw = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(p.a, _mm256_sub_pd(Vc, p.EL)), w), p.tau_w);
    return {dV, dw};
}

inline __m256d rhs_w(__m256d w, __m256d Vhold, __m256d EL, __m256d a, __m256d tau_w) {
    return _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(a, _mm256_sub_pd(Vhold, EL)), w), tau_w);
}

inline __m256d axpy(__m256d x, __m256d h, __m256d k) { return _mm256_add_pd(x, _mm256_mul_pd(h, k)); }

inline __m256d combine(__m256d x, __m256d dt6, __m256d k1, __m256d k2, __m256d k3, __m256d k4) {
    const __m256d two = _mm256_set1_pd(2.0);
    __m256d sum = _mm256_add_pd(k1, _mm256_mul_pd(two, k2));
    sum = _mm256_add_pd(sum, _mm256_mul_pd(two, k3));
    sum = _mm256_add_pd(sum, k4);
    return axpy(x, dt6, sum);
}

void adex_step_avx2(const NeuronBlock& nb, std::span<const double> input, double dt,
                    std::span<std::uint8_t> spiked) {
    const std::size_t n = nb.size();
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d half = _mm256_set1_pd(0.5 * dt);
    const __m256d dt6 = _mm256_set1_pd(dt / 6.0);
    const __m256d eps = _mm256_set1_pd(kRefEpsilon);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d V = load(nb.V, i), w = load(nb.w, i), ref = load(nb.ref, i);
        const Lane p{load(input, i), load(nb.C, i),     load(nb.gL, i), load(nb.EL, i),   load(nb.VT, i),
                     load(nb.DeltaT, i), load(nb.Vpeak, i), load(nb.a, i),  load(nb.tau_w, i)};
        const __m256d Vreset = load(nb.Vreset, i), tref = load(nb.t_ref, i), b = load(nb.b, i);

        // Refractory branch.
        const __m256d in_ref = _mm256_cmp_pd(ref, eps, _CMP_GT_OQ);
        const __m256d r1 = rhs_w(w, Vreset, p.EL, p.a, p.tau_w);
        const __m256d r2 = rhs_w(axpy(w, half, r1), Vreset, p.EL, p.a, p.tau_w);
        const __m256d r3 = rhs_w(axpy(w, half, r2), Vreset, p.EL, p.a, p.tau_w);
        const __m256d r4 = rhs_w(axpy(w, vdt, r3), Vreset, p.EL, p.a, p.tau_w);
        const __m256d w_ref = combine(w, dt6, r1, r2, r3, r4);
        __m256d r = _mm256_sub_pd(ref, vdt);
        r = _mm256_blendv_pd(r, zero, _mm256_cmp_pd(r, eps, _CMP_LT_OQ));

        // Integration branch.
        const __m256d Vc = select_less(V, p.Vpeak);
        const Rhs k1 = rhs(p, Vc, w);
        const Rhs k2 = rhs(p, axpy(Vc, half, k1.dV), axpy(w, half, k1.dw));
        const Rhs k3 = rhs(p, axpy(Vc, half, k2.dV), axpy(w, half, k2.dw));
        const Rhs k4 = rhs(p, axpy(Vc, vdt, k3.dV), axpy(w, vdt, k3.dw));
        const __m256d Vn = combine(Vc, dt6, k1.dV, k2.dV, k3.dV, k4.dV);
        const __m256d wn = combine(w, dt6, k1.dw, k2.dw, k3.dw, k4.dw);
        const __m256d crossed = _mm256_andnot_pd(in_ref, _mm256_cmp_pd(Vn, p.Vpeak, _CMP_GE_OQ));

        __m256d Vout = _mm256_blendv_pd(Vn, Vreset, crossed);
        __m256d wout = _mm256_blendv_pd(wn, _mm256_add_pd(wn, b), crossed);
        __m256d rout = _mm256_blendv_pd(zero, tref, crossed);
        Vout = _mm256_blendv_pd(Vout, Vreset, in_ref);
        wout = _mm256_blendv_pd(wout, w_ref, in_ref);
        rout = _mm256_blendv_pd(rout, r, in_ref);

        _mm256_storeu_pd(nb.V.data() + i, Vout);
        _mm256_storeu_pd(nb.w.data() + i, wout);
        _mm256_storeu_pd(nb.ref.data() + i, rout);
        const int mask = _mm256_movemask_pd(crossed);
        for (std::size_t k = 0; k < kLanes; ++k) spiked[i + k] = static_cast<std::uint8_t>((mask >> k) & 1);
    }
    for (; i < n; ++i) {
        const auto u = detail::adex_update(nb.V[i], nb.w[i], nb.ref[i], input[i], dt, nb.C[i], nb.gL[i], nb.EL[i],
                                           nb.VT[i], nb.DeltaT[i], nb.Vpeak[i], nb.Vreset[i], nb.t_ref[i], nb.a[i],
                                           nb.b[i], nb.tau_w[i]);
        nb.V[i] = u.V;
        nb.w[i] = u.w;
        nb.ref[i] = u.ref;
        spiked[i] = u.spiked ? 1 : 0;
    }
}

void decay_accumulate_avx2(std::span<double> current, double factor, std::span<const double> counts,
                           double weight) {
    const __m256d f = _mm256_set1_pd(factor), wt = _mm256_set1_pd(weight);
    std::size_t i = 0;
    for (; i + kLanes <= current.size(); i += kLanes) {
        const __m256d c = _mm256_loadu_pd(current.data() + i);
        const __m256d k = _mm256_loadu_pd(counts.data() + i);
        _mm256_storeu_pd(current.data() + i, _mm256_add_pd(_mm256_mul_pd(c, f), _mm256_mul_pd(k, wt)));
    }
    for (; i < current.size(); ++i) current[i] = current[i] * factor + counts[i] * weight;
}

void decay_add_avx2(std::span<double> current, double factor, double increment) {
    const __m256d f = _mm256_set1_pd(factor), inc = _mm256_set1_pd(increment);
    std::size_t i = 0;
    for (; i + kLanes <= current.size(); i += kLanes) {
        const __m256d c = _mm256_loadu_pd(current.data() + i);
        _mm256_storeu_pd(current.data() + i, _mm256_add_pd(_mm256_mul_pd(c, f), inc));
    }
    for (; i < current.size(); ++i) current[i] = current[i] * factor + increment;
}

} // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{Isa::Avx2, &adex_step_avx2, &decay_accumulate_avx2, &decay_add_avx2};
    return &table;
}

} // namespace nr::kernels
