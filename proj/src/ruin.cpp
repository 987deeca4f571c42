#include "creplay/ruin.hpp"

#include <algorithm>
#include <cmath>

#include "creplay/errors.hpp"

namespace creplay {

void RuinParams::validate() const {
    if (!(0 < start && start < boundary))
        throw ConfigError("ruin params require 0 < z < a");
    if (!(p_toward > 0.0 && p_toward < 1.0))
        throw ConfigError("ruin p_toward must be in (0, 1)");
}

namespace {

constexpr double kFairTol = 1e-12;

// expm1(x * L) / expm1(y * L) without overflow; x, y > 0.
double expm1_ratio(double x, double y, double L) {
    if (L == 0.0) return x / y;
    if (std::max(x, y) * std::abs(L) < 700.0)
        return std::expm1(x * L) / std::expm1(y * L);
    // Factor out the dominant exponential: (e^{xL}-1)/(e^{yL}-1)
    //   = e^{(x-y)L} * (1 - e^{-xL}) / (1 - e^{-yL}).
    if (L > 0.0)
        return std::exp((x - y) * L) * std::expm1(-x * L) / std::expm1(-y * L);
    return std::expm1(x * L) / std::expm1(y * L);  // both finite for L < 0
}

}  // namespace

double ruin_probability(const RuinParams& params) {
    params.validate();
    const double z = params.start, a = params.boundary;
    const double q = params.p_toward, p = 1.0 - q;
    if (std::abs(q - p) < kFairTol) return 1.0 - z / a;
    const double L = std::log(q / p);
    // ((q/p)^a - (q/p)^z) / ((q/p)^a - 1) = 1 - expm1(zL)/expm1(aL)
    return 1.0 - expm1_ratio(z, a, L);
}

double expected_duration(const RuinParams& params) {
    params.validate();
    const double z = params.start, a = params.boundary;
    const double q = params.p_toward, p = 1.0 - q;
    if (std::abs(q - p) < kFairTol) return z * (a - z);
    const double L = std::log(q / p);
    return z / (q - p) - (a / (q - p)) * expm1_ratio(z, a, L);
}

double shortest_path_probability(const RuinParams& params) {
    params.validate();
    if (2 * params.start > params.boundary)
        throw ConfigError("shortest_path_probability requires z <= a/2");
    return std::pow(params.p_toward, params.start);
}

double ruin_time_pmf(const RuinParams& params, long t) {
    params.validate();
    if (t < 1) throw ConfigError("ruin_time_pmf requires t >= 1");
    const long z = params.start;
    const long a = params.boundary;
    if (t < z) return 0.0;
    if (((t - z) & 1) != 0) return 0.0;

    const double q = params.p_toward, p = 1.0 - q;
    const double log_base = t * std::log(2.0) + 0.5 * (t - z) * std::log(p) +
                            0.5 * (t + z) * std::log(q) - std::log(double(a));

    // Pair v with a-v: for parity(t) == parity(z) the paired terms are equal,
    // so sum over v < a/2 and double. This removes the dominant cancellation.
    long double sum = 0.0L, comp = 0.0L;
    double max_term = 0.0;
    const double pi = std::acos(-1.0);
    for (long v = 1; 2 * v < a; ++v) {
        const double c = std::cos(pi * v / a);
        if (c == 0.0) continue;
        const double log_mag = log_base + (t - 1) * std::log(std::abs(c));
        if (log_mag < -745.0) continue;  // underflows to zero anyway
        double term = 2.0 * std::exp(log_mag) * std::sin(pi * v / a) *
                      std::sin(pi * z * v / a);
        if ((t - 1) % 2 != 0 && c < 0.0) term = -term;
        max_term = std::max(max_term, std::abs(term));
        // Kahan accumulation.
        long double y = static_cast<long double>(term) - comp;
        long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    // a even: the middle term has cos = 0 and vanishes for t > 1; for t == 1
    // the whole pmf is p(1) handled by the generic path unless z == 1.
    if (a % 2 == 0 && t == 1 && z == 1) {
        double term = std::exp(log_base) * 1.0 * std::sin(pi * (a / 2) * z / a);
        long double y = static_cast<long double>(term) - comp;
        long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        max_term = std::max(max_term, std::abs(term));
    }

    double value = static_cast<double>(sum);
    if (value < 0.0) {
        if (std::abs(value) <= max_term * 1e-12 || std::abs(value) < 1e-300)
            return 0.0;  // pure roundoff at full cancellation
        throw PrecisionError("ruin_time_pmf lost significance at t=" +
                             std::to_string(t));
    }
    return value;
}

McRuinSummary mc_absorbing_walk(const RuinParams& params, std::uint64_t n_episodes,
                                std::uint64_t seed, long t_max) {
    params.validate();
    if (n_episodes < 1) throw ConfigError("mc_absorbing_walk needs >= 1 episode");

    McRuinSummary out;
    out.episodes = n_episodes;
    const long hist_cap = std::min<long>(t_max, 1 << 16);
    out.ruin_time_hist.assign(static_cast<std::size_t>(hist_cap) + 1, 0);

    Rng rng = make_rng(seed);
    long double total_time = 0.0L, ruin_time = 0.0L;
    for (std::uint64_t e = 0; e < n_episodes; ++e) {
        int pos = params.start;
        long t = 0;
        while (t < t_max) {
            ++t;
            pos += uniform01(rng) < params.p_toward ? -1 : 1;
            if (pos == 0 || pos == params.boundary) break;
        }
        if (pos == 0) {
            ++out.ruined;
            total_time += t;
            ruin_time += t;
            if (t <= hist_cap)
                ++out.ruin_time_hist[static_cast<std::size_t>(t)];
            else
                ++out.hist_overflow;
        } else if (pos == params.boundary) {
            ++out.gained;
            total_time += t;
        } else {
            ++out.censored;
        }
    }
    const std::uint64_t absorbed = out.ruined + out.gained;
    out.mean_absorption_time =
        absorbed ? static_cast<double>(total_time / absorbed) : 0.0;
    out.mean_ruin_time =
        out.ruined ? static_cast<double>(ruin_time / out.ruined) : 0.0;
    return out;
}

}  // namespace creplay
