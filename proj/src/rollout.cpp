#include "creplay/rollout.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "creplay/errors.hpp"

namespace creplay {

void PolicyConfig::validate() const {
    if (p_forward < 0.0 || p_left < 0.0 || p_right < 0.0)
        throw ConfigError("policy probabilities must be non-negative");
    if (std::abs(p_forward + p_left + p_right - 1.0) > 1e-9)
        throw ConfigError("policy probabilities must sum to 1");
}

Trajectory run_walk(const GridMap& map, const PolicyConfig& policy,
                    const NoiseModel& noise, int n_steps, std::uint64_t seed,
                    int headings) {
    policy.validate();
    noise.validate();
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (!valid_heading_count(headings))
        throw ConfigError("heading count must be 4 or 8");

    Rng rng = make_rng(seed);
    const auto free = map.free_cells();
    const auto [sx, sy] = free[uniform_below(rng, static_cast<std::uint32_t>(free.size()))];
    Pose pose{sx, sy, static_cast<int>(uniform_below(rng, headings))};

    Trajectory traj;
    traj.map_id = map.id();
    traj.seed = seed;
    traj.headings = headings;
    traj.steps.reserve(n_steps);

    bool prev_collided = false;
    for (int t = 0; t < n_steps; ++t) {
        Action action;
        if (prev_collided && policy.turn_around_on_collision) {
            action = Action::TurnAround;
        } else {
            double u = uniform01(rng);
            if (u < policy.p_forward)
                action = Action::Forward;
            else if (u < policy.p_forward + policy.p_left)
                action = Action::TurnLeft;
            else
                action = Action::TurnRight;
        }
        StepOutcome out = step(map, pose, action, noise, headings, rng);
        traj.steps.push_back(StepRecord{t, pose, action, out.collided});
        pose = out.pose;
        prev_collided = out.collided;
    }
    return traj;
}

std::vector<Trajectory> run_batch(const GridMap& map, const PolicyConfig& policy,
                                  const NoiseModel& noise, int n_walks,
                                  int n_steps, std::uint64_t base_seed,
                                  int headings, int n_threads) {
    std::vector<Trajectory> walks(static_cast<std::size_t>(std::max(n_walks, 0)));
    if (n_walks <= 0) return walks;

    auto run_range = [&](int begin, int end) {
        for (int w = begin; w < end; ++w)
            walks[w] = run_walk(map, policy, noise, n_steps,
                                base_seed + static_cast<std::uint64_t>(w), headings);
    };
    if (n_threads <= 1 || n_walks == 1) {
        run_range(0, n_walks);
        return walks;
    }
    int workers = std::min(n_threads, n_walks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n_walks + workers - 1) / workers;
    for (int i = 0; i < workers; ++i) {
        int begin = i * chunk;
        int end = std::min(n_walks, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
    return walks;
}

void write_trajectories_jsonl(std::ostream& os,
                              const std::vector<Trajectory>& walks,
                              const GridMap& map, const PolicyConfig& policy,
                              const NoiseModel& noise, std::uint64_t base_seed,
                              const std::string& config_hash) {
    nlohmann::json header{
        {"type", "header"},
        {"map_id", map.id()},
        {"seed", base_seed},
        {"n_walks", walks.size()},
        {"headings", walks.empty() ? kHeadings4 : walks.front().headings},
        {"policy",
         {{"p_forward", policy.p_forward},
          {"p_left", policy.p_left},
          {"p_right", policy.p_right},
          {"turn_around_on_collision", policy.turn_around_on_collision}}},
        {"noise",
         {{"p_forward_slip", noise.p_forward_slip},
          {"p_turn_slip", noise.p_turn_slip}}},
    };
    if (!config_hash.empty()) header["config_hash"] = config_hash;
    os << header.dump() << '\n';
    for (std::size_t w = 0; w < walks.size(); ++w) {
        const Trajectory& traj = walks[w];
        os << nlohmann::json{{"type", "walk"},
                             {"walk", w},
                             {"seed", traj.seed},
                             {"map_id", traj.map_id},
                             {"headings", traj.headings}}
                  .dump()
           << '\n';
        for (const StepRecord& s : traj.steps) {
            os << nlohmann::json{{"t", s.t},
                                 {"x", s.pose.x},
                                 {"y", s.pose.y},
                                 {"heading", s.pose.heading},
                                 {"action", to_string(s.action)},
                                 {"collided", s.collided}}
                      .dump()
               << '\n';
        }
    }
}

std::vector<Trajectory> read_trajectories_jsonl(std::istream& is) {
    std::vector<Trajectory> walks;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("invalid JSON in trajectory log", lineno, 1);
        if (j.contains("type")) {
            std::string type = j["type"];
            if (type == "header") continue;
            if (type == "walk") {
                Trajectory traj;
                traj.map_id = j.value("map_id", std::string{});
                traj.seed = j.value("seed", 0ull);
                traj.headings = j.value("headings", kHeadings4);
                walks.push_back(std::move(traj));
                continue;
            }
            throw ParseError("unknown record type in trajectory log", lineno, 1);
        }
        if (walks.empty())
            throw ParseError("step record before walk marker", lineno, 1);
        StepRecord s;
        s.t = j.at("t");
        s.pose.x = j.at("x");
        s.pose.y = j.at("y");
        s.pose.heading = j.at("heading");
        s.action = action_from_string(j.at("action"));
        s.collided = j.at("collided");
        walks.back().steps.push_back(s);
    }
    return walks;
}

}  // namespace creplay
