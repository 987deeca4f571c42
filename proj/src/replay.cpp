#include "creplay/replay.hpp"

#include <algorithm>

#include "creplay/errors.hpp"

namespace creplay {

const char* to_string(Regime r) {
    return r == Regime::Oracle ? "oracle" : "dead-reckoned";
}

Regime regime_from_string(const std::string& s) {
    if (s == "oracle") return Regime::Oracle;
    if (s == "dead-reckoned" || s == "dead_reckoned") return Regime::DeadReckoned;
    throw ConfigError("unknown regime: " + s);
}

const char* to_string(SampleFlag f) {
    switch (f) {
        case SampleFlag::None: return "";
        case SampleFlag::OffMap: return "off_map";
        case SampleFlag::OnOccupied: return "occupied";
    }
    return "?";
}

void ReplayConfig::validate() const {
    if (k < 1) throw ConfigError("replay k must be >= 1");
    if (window < 1) throw ConfigError("replay window must be >= 1");
}

namespace {

// next_collision[j] = smallest index c >= j with steps[c].collided, else -1.
std::vector<int> next_collision_index(const Trajectory& traj) {
    std::vector<int> next(traj.steps.size(), -1);
    int c = -1;
    for (int j = static_cast<int>(traj.steps.size()) - 1; j >= 0; --j) {
        if (traj.steps[j].collided) c = j;
        next[j] = c;
    }
    return next;
}

}  // namespace

std::vector<ReplaySample> label_egocentric(const Trajectory& traj,
                                           const ReplayConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(traj.steps.size());
    const auto next = next_collision_index(traj);

    std::vector<ReplaySample> samples;
    samples.reserve(traj.steps.size());
    for (int j = 0; j < n; ++j) {
        int label;
        if (next[j] >= 0) {
            label = std::min(next[j] - j, cfg.k);
        } else if (n - j >= cfg.k) {
            label = cfg.k;
        } else {
            continue;  // censored: cannot tell whether this is a k+ sample
        }
        const StepRecord& s = traj.steps[j];
        samples.push_back(ReplaySample{s.pose.x, s.pose.y, s.pose.heading, label,
                                       s.action, Regime::Oracle,
                                       SampleFlag::None});
    }
    return samples;
}

std::vector<ReplaySample> label_remote(const GridMap& map, const Trajectory& traj,
                                       const ReplayConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(traj.steps.size());
    const auto next = next_collision_index(traj);

    // Dead reckoning composes intended actions, except that a collided
    // forward is observed by the bump sensor and composes as a no-op. Slip
    // stays unobserved, so it is the only source of drift.
    std::vector<Action> effective;
    effective.reserve(traj.steps.size());
    std::vector<int> eff_prefix(traj.steps.size() + 1, 0);
    for (int t = 0; t < n; ++t) {
        if (!(traj.steps[t].action == Action::Forward && traj.steps[t].collided))
            effective.push_back(traj.steps[t].action);
        eff_prefix[static_cast<std::size_t>(t) + 1] =
            static_cast<int>(effective.size());
    }

    std::vector<ReplaySample> samples;
    for (int j = 0; j < n; ++j) {
        if (next[j] < 0) continue;
        const int label = std::min(next[j] - j, cfg.k);
        const StepRecord& at_j = traj.steps[j];
        const int i_min = std::max(0, j - cfg.window);
        for (int i = i_min; i <= j; ++i) {
            Pose pose;
            if (cfg.regime == Regime::Oracle) {
                pose = at_j.pose;
            } else {
                const int b = eff_prefix[static_cast<std::size_t>(i)];
                const int e = eff_prefix[static_cast<std::size_t>(j)];
                pose = dead_reckon_from(
                    traj.steps[i].pose,
                    std::span<const Action>(effective.data() + b,
                                            static_cast<std::size_t>(e - b)),
                    traj.headings);
            }
            SampleFlag flag = SampleFlag::None;
            if (!map.in_bounds(pose.x, pose.y))
                flag = SampleFlag::OffMap;
            else if (map.occupied(pose.x, pose.y))
                flag = SampleFlag::OnOccupied;
            samples.push_back(ReplaySample{pose.x, pose.y, pose.heading, label,
                                           at_j.action, cfg.regime, flag});
        }
    }
    return samples;
}

std::string samples_to_csv(std::span<const ReplaySample> samples,
                           const std::vector<std::string>& comments) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    out += "x,y,heading,label,regime,flags\n";
    for (const ReplaySample& s : samples) {
        out += std::to_string(s.x) + "," + std::to_string(s.y) + "," +
               std::to_string(s.heading) + "," + std::to_string(s.label) + "," +
               to_string(s.regime) + "," + to_string(s.flag) + "\n";
    }
    return out;
}

}  // namespace creplay
