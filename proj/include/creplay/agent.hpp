#pragma once

#include <span>
#include <string>

#include "creplay/grid_map.hpp"
#include "creplay/rng.hpp"

namespace creplay {

enum class Action : std::uint8_t { Forward, TurnLeft, TurnRight, TurnAround };

const char* to_string(Action a);
Action action_from_string(const std::string& s);

struct Pose {
    int x = 0;
    int y = 0;
    int heading = 0;

    bool operator==(const Pose&) const = default;
};

// Actuation slip. Forward slip keeps the agent in place; turn slip lands the
// turn one heading short or long (half each).
struct NoiseModel {
    double p_forward_slip = 0.1;
    double p_turn_slip = 0.1;

    void validate() const;
    static NoiseModel none() { return NoiseModel{0.0, 0.0}; }
};

enum class Motion : std::uint8_t {
    AsIntended,
    SlippedStay,
    SlippedUnderTurn,
    SlippedOverTurn,
    Blocked,
};

const char* to_string(Motion m);

struct StepOutcome {
    Pose pose;
    bool collided = false;
    Action intended = Action::Forward;
    Motion motion = Motion::AsIntended;
};

// Executes one action. Forward into an occupied cell collides and leaves the
// position unchanged; turns never collide. Collision check precedes the
// forward-slip draw (slip applies only to free targets).
StepOutcome step(const GridMap& map, const Pose& pose, Action action,
                 const NoiseModel& noise, int headings, Rng& rng);

// Displacement in the start pose's egocentric frame: +x ahead, +y to the
// right, dheading normalized to [0, H).
struct Displacement {
    int dx = 0;
    int dy = 0;
    int dheading = 0;

    bool operator==(const Displacement&) const = default;
};

// Composes intended motions with zero noise and no collisions.
Displacement dead_reckon(std::span<const Action> intended, int headings);

// Same composition carried out in the world frame from `start`; this is what
// dead-reckoned replay keys use. Ignores the map entirely.
Pose dead_reckon_from(const Pose& start, std::span<const Action> intended,
                      int headings);

}  // namespace creplay
