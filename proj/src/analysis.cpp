#include "neurorhythm/analysis.hpp"

#include "neurorhythm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nr {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

RateSeries population_rate(const SpikeRecord& record, const std::string& population, double bin,
                           double smooth_width) {
    if (!(bin > 0)) fail(ErrorKind::Analysis, "rate bin must be > 0");
    if (!(smooth_width >= 0)) fail(ErrorKind::Analysis, "smooth_width must be >= 0");
    const auto p = record.index_of(population);
    const double n = record.sizes.at(p);
    const auto n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(record.duration / bin - 1e-9)));

    std::vector<double> counts(n_bins, 0.0);
    for (const auto& e : record.events) {
        if (e.population != p) continue;
        auto k = static_cast<std::size_t>(std::max(0.0, std::floor(e.t / bin)));
        counts[std::min(k, n_bins - 1)] += 1.0;
    }
    const double scale = 1000.0 / (n * bin);

    RateSeries out;
    out.bin = bin;
    out.t.resize(n_bins);
    out.rate.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) out.t[k] = (static_cast<double>(k) + 0.5) * bin;

    const auto radius = static_cast<std::ptrdiff_t>(std::floor(smooth_width / bin));
    if (radius <= 0) {
        for (std::size_t k = 0; k < n_bins; ++k) out.rate[k] = counts[k] * scale;
        return out;
    }
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t j = -radius; j <= radius; ++j)
        kernel[static_cast<std::size_t>(j + radius)] = static_cast<double>(radius + 1 - std::abs(j));
    const double ksum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& x : kernel) x /= ksum;
    const auto nb = static_cast<std::ptrdiff_t>(n_bins);
    for (std::ptrdiff_t k = 0; k < nb; ++k) {
        double acc = 0.0;
        for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
            const std::ptrdiff_t src = k + j;
            if (src >= 0 && src < nb) acc += kernel[static_cast<std::size_t>(j + radius)] * counts[static_cast<std::size_t>(src)];
        }
        out.rate[static_cast<std::size_t>(k)] = acc * scale;
    }
    return out;
}

std::vector<Burst> detect_bursts(const std::vector<double>& t, double max_isi, std::uint32_t min_spikes) {
    if (!(max_isi > 0)) fail(ErrorKind::Analysis, "max_isi must be > 0");
    if (min_spikes < 2) fail(ErrorKind::Analysis, "min_spikes must be >= 2");
    std::vector<Burst> out;
    std::size_t i = 0;
    while (i < t.size()) {
        std::size_t j = i;
        while (j + 1 < t.size() && t[j + 1] - t[j] <= max_isi) ++j;
        const auto count = static_cast<std::uint32_t>(j - i + 1);
        if (count >= min_spikes) out.push_back({t[i], t[j], count, static_cast<std::uint32_t>(i)});
        i = j + 1;
    }
    return out;
}

OscillationMetrics oscillation_metrics(const SpikeRecord& record, const std::vector<std::string>& phase_pops,
                                       const BurstParams& bp, double t_from) {
    if (phase_pops.empty() || phase_pops.size() > 3)
        fail(ErrorKind::Analysis, "oscillation_metrics: expected 1 to 3 phase populations");
    const std::size_t np = phase_pops.size();
    std::vector<std::vector<double>> onsets(np);
    for (std::size_t k = 0; k < np; ++k) {
        const auto p = record.index_of(phase_pops[k]);
        for (const auto& b : detect_bursts(record.times(p), bp.max_isi, bp.min_spikes))
            if (b.t_start >= t_from) onsets[k].push_back(b.t_start);
    }
    if (onsets[0].size() < 2)
        fail(ErrorKind::Analysis, "insufficient cycles: " + std::to_string(onsets[0].size()) + " burst(s) in " +
                                      phase_pops[0]);

    OscillationMetrics m;
    for (std::size_t k = 0; k < np; ++k) m.cycle_onsets[phase_pops[k]] = onsets[k];

    std::vector<double> periods;
    for (std::size_t c = 0; c + 1 < onsets[0].size(); ++c) periods.push_back(onsets[0][c + 1] - onsets[0][c]);
    m.period = median(periods);
    m.freq = 1000.0 / m.period;
    m.jitter_std = sample_std(periods);

    std::array<std::vector<double>, 2> off;
    for (std::size_t c = 0; c + 1 < onsets[0].size(); ++c) {
        const double s0 = onsets[0][c], s1 = onsets[0][c + 1];
        std::array<double, 2> first{};
        bool complete = true;
        for (std::size_t k = 1; k < np; ++k) {
            const auto& v = onsets[k];
            auto it = std::lower_bound(v.begin(), v.end(), s0);
            if (it == v.end() || *it >= s1) {
                complete = false;
                break;
            }
            first[k - 1] = *it;
        }
        if (!complete) {
            ++m.n_excluded;
            continue;
        }
        ++m.n_cycles;
        bool ordered = true;
        double prev = s0;
        for (std::size_t k = 1; k < np; ++k) {
            ordered = ordered && prev < first[k - 1];
            prev = first[k - 1];
        }
        if (!ordered) ++m.order_violations;
        for (std::size_t k = 1; k < np; ++k) off[k - 1].push_back(first[k - 1] - s0);
    }
    m.offsets = {median(off[0]), median(off[1])};
    return m;
}

namespace {

std::vector<PortraitPoint> slice(const RateSeries& e, const RateSeries& i, double a, double b) {
    std::vector<PortraitPoint> out;
    for (std::size_t k = 0; k < e.t.size(); ++k)
        if (e.t[k] >= a && e.t[k] < b) out.push_back({e.rate[k], i.rate[k]});
    return out;
}

// Linear interpolation of the series at time t (clamped at the ends).
double at(const RateSeries& r, double t) {
    if (r.t.empty()) return 0.0;
    if (t <= r.t.front()) return r.rate.front();
    if (t >= r.t.back()) return r.rate.back();
    const double x = (t - r.t.front()) / r.bin;
    const auto k = static_cast<std::size_t>(std::floor(x));
    const double f = x - static_cast<double>(k);
    if (k + 1 >= r.t.size()) return r.rate.back();
    return r.rate[k] * (1.0 - f) + r.rate[k + 1] * f;
}

} // namespace

PhasePortrait phase_portrait(const RateSeries& rateE, const RateSeries& rateI, const std::array<double, 3>& bounds) {
    if (rateE.bin != rateI.bin || rateE.t != rateI.t)
        fail(ErrorKind::Analysis, "phase_portrait: rate series have mismatched binning");
    if (!(bounds[0] < bounds[1] && bounds[1] < bounds[2]))
        fail(ErrorKind::Analysis, "phase_portrait: cycle bounds must be increasing");

    PhasePortrait out;
    out.loops[0] = slice(rateE, rateI, bounds[0], bounds[1]);
    out.loops[1] = slice(rateE, rateI, bounds[1], bounds[2]);

    double maxE = 0.0, maxI = 0.0;
    for (const auto& loop : out.loops)
        for (const auto& p : loop) {
            maxE = std::max(maxE, p.e);
            maxI = std::max(maxI, p.i);
        }
    const double sE = maxE > 0 ? 1.0 / maxE : 0.0, sI = maxI > 0 ? 1.0 / maxI : 0.0;

    std::array<std::vector<PortraitPoint>, 2> norm;
    for (std::size_t c = 0; c < 2; ++c) {
        const double a = bounds[c], len = bounds[c + 1] - bounds[c];
        for (std::size_t k = 0; k < kPortraitSamples; ++k) {
            const double t = a + len * static_cast<double>(k) / static_cast<double>(kPortraitSamples);
            norm[c].push_back({at(rateE, t) * sE, at(rateI, t) * sI});
        }
    }
    double dist = 0.0;
    for (std::size_t k = 0; k < kPortraitSamples; ++k)
        dist += std::hypot(norm[0][k].e - norm[1][k].e, norm[0][k].i - norm[1][k].i);
    out.similarity = dist / static_cast<double>(kPortraitSamples);

    for (const auto& loop : norm)
        for (std::size_t x = 0; x < loop.size(); ++x)
            for (std::size_t y = x + 1; y < loop.size(); ++y)
                out.diameter = std::max(out.diameter, std::hypot(loop[x].e - loop[y].e, loop[x].i - loop[y].i));
    return out;
}

} // namespace nr
