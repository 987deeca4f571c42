#pragma once

#include <iosfwd>
#include <vector>

#include "creplay/agent.hpp"

namespace creplay {

struct PolicyConfig {
    double p_forward = 0.6;
    double p_left = 0.2;
    double p_right = 0.2;
    bool turn_around_on_collision = true;

    // Probabilities must be non-negative and sum to 1.
    void validate() const;
};

struct StepRecord {
    int t = 0;
    Pose pose;        // pose at which the action was taken
    Action action = Action::Forward;
    bool collided = false;
};

struct Trajectory {
    std::string map_id;
    std::uint64_t seed = 0;
    int headings = kHeadings4;
    std::vector<StepRecord> steps;
};

// Random walk of n_steps from a uniformly seeded free pose. The step after a
// collision is a forced TurnAround when the policy asks for it (replacing the
// policy draw). Deterministic in (map, policy, noise, seed).
Trajectory run_walk(const GridMap& map, const PolicyConfig& policy,
                    const NoiseModel& noise, int n_steps, std::uint64_t seed,
                    int headings = kHeadings4);

// Independent walks with per-walk seeds base_seed + walk index. With
// n_threads > 1 walks run concurrently; the result is identical to serial.
std::vector<Trajectory> run_batch(const GridMap& map, const PolicyConfig& policy,
                                  const NoiseModel& noise, int n_walks,
                                  int n_steps, std::uint64_t base_seed,
                                  int headings = kHeadings4, int n_threads = 1);

// JSON-lines log. One header line (map_id, seed, configs), one walk marker
// line per walk, one record per step: {t, x, y, heading, action, collided}.
void write_trajectories_jsonl(std::ostream& os,
                              const std::vector<Trajectory>& walks,
                              const GridMap& map, const PolicyConfig& policy,
                              const NoiseModel& noise, std::uint64_t base_seed,
                              const std::string& config_hash = "");

std::vector<Trajectory> read_trajectories_jsonl(std::istream& is);

}  // namespace creplay
