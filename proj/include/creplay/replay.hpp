#pragma once

#include <span>
#include <vector>

#include "creplay/rollout.hpp"

namespace creplay {

// Oracle keys samples by true poses; DeadReckoned keys them by poses composed
// from intended actions, so actuation slip shows up as label noise.
enum class Regime : std::uint8_t { Oracle, DeadReckoned };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

enum class SampleFlag : std::uint8_t { None, OffMap, OnOccupied };

const char* to_string(SampleFlag f);

struct ReplaySample {
    int x = 0;
    int y = 0;
    int heading = 0;
    int label = 0;  // time steps to next collision, clamped to [0, k]
    Action action = Action::Forward;  // intended action at the labeled step
    Regime regime = Regime::Oracle;
    SampleFlag flag = SampleFlag::None;
};

struct ReplayConfig {
    int k = 10;        // clamp bound; label k means "k or more"
    int window = 20;   // max unwind length for remote labels
    Regime regime = Regime::Oracle;

    void validate() const;
};

// One sample per step: label = time steps to the next collision, clamped to
// k. Steps with no future collision are labeled k when at least k steps
// remain, otherwise dropped (right-censored).
std::vector<ReplaySample> label_egocentric(const Trajectory& traj,
                                           const ReplayConfig& cfg);

// Double-unwind labels: for every collision-terminated step j and every view
// step i with i <= j and j - i <= window, emit a sample labeled min(c-j, k).
// In the dead-reckoned regime the sample's pose is the intended-egomotion
// composition from the true pose at i; collided forwards are observed by the
// bump sensor and compose as no-ops, so actuation slip is the only drift.
// Samples landing off-map or on occupied cells are kept and flagged.
std::vector<ReplaySample> label_remote(const GridMap& map, const Trajectory& traj,
                                       const ReplayConfig& cfg);

// CSV dump: x,y,heading,label,regime,flags.
std::string samples_to_csv(std::span<const ReplaySample> samples,
                           const std::vector<std::string>& comments = {});

}  // namespace creplay
