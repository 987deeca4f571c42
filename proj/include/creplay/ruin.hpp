#pragma once

#include <cstdint>
#include <vector>

#include "creplay/rng.hpp"

namespace creplay {

// 1-D absorbing walk on cells 0..boundary with walls at both ends. The agent
// starts at `start` and steps toward wall 0 with probability p_toward.
// "Ruin" is absorption at 0.
struct RuinParams {
    int start = 1;      // z: 0 < start < boundary
    int boundary = 2;   // a: far absorbing wall
    double p_toward = 0.5;

    void validate() const;
};

// P(absorption at 0). Fair case 1 - z/a; biased case
// ((q/p)^a - (q/p)^z) / ((q/p)^a - 1) with q = p_toward. Evaluated in log
// domain, stable for large (q/p)^a.
double ruin_probability(const RuinParams& params);

// E[T], expected steps until absorption at either wall: z(a-z) when fair,
// otherwise z/(q-p) - (a/(q-p)) (1-(q/p)^z)/(1-(q/p)^a).
double expected_duration(const RuinParams& params);

// P(the observed walk is a shortest path to the near wall) = p_toward^z.
// Requires z <= a/2 (mirror the world otherwise).
double shortest_path_probability(const RuinParams& params);

// Unconditional probability that ruin occurs exactly at step t:
//   a^-1 2^t p^{(t-z)/2} q^{(t+z)/2}
//     sum_v cos^{t-1}(pi v / a) sin(pi v / a) sin(pi z v / a).
// Zero for t < z and for parity(t) != parity(z). Terms are evaluated in log
// magnitude and accumulated with compensated summation; throws PrecisionError
// if cancellation destroys all significance.
double ruin_time_pmf(const RuinParams& params, long t);

struct McRuinSummary {
    std::uint64_t episodes = 0;
    std::uint64_t ruined = 0;
    std::uint64_t gained = 0;    // absorbed at the far wall
    std::uint64_t censored = 0;  // exceeded t_max
    double mean_absorption_time = 0.0;  // over absorbed episodes
    double mean_ruin_time = 0.0;        // over ruined episodes
    // ruin_time_hist[t] = ruined episodes absorbed exactly at step t;
    // times beyond the histogram go to overflow.
    std::vector<std::uint64_t> ruin_time_hist;
    std::uint64_t hist_overflow = 0;

    double ruin_fraction() const {
        return static_cast<double>(ruined) / static_cast<double>(episodes);
    }
};

// Direct simulation oracle. Deterministic in seed.
McRuinSummary mc_absorbing_walk(const RuinParams& params, std::uint64_t n_episodes,
                                std::uint64_t seed, long t_max = 1000000);

}  // namespace creplay
