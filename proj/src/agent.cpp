#include "creplay/agent.hpp"

#include "creplay/errors.hpp"

namespace creplay {

const char* to_string(Action a) {
    switch (a) {
        case Action::Forward: return "forward";
        case Action::TurnLeft: return "turn_left";
        case Action::TurnRight: return "turn_right";
        case Action::TurnAround: return "turn_around";
    }
    return "?";
}

Action action_from_string(const std::string& s) {
    if (s == "forward") return Action::Forward;
    if (s == "turn_left") return Action::TurnLeft;
    if (s == "turn_right") return Action::TurnRight;
    if (s == "turn_around") return Action::TurnAround;
    throw ConfigError("unknown action: " + s);
}

const char* to_string(Motion m) {
    switch (m) {
        case Motion::AsIntended: return "as-intended";
        case Motion::SlippedStay: return "slipped-stay";
        case Motion::SlippedUnderTurn: return "slipped-under-turn";
        case Motion::SlippedOverTurn: return "slipped-over-turn";
        case Motion::Blocked: return "blocked";
    }
    return "?";
}

void NoiseModel::validate() const {
    if (p_forward_slip < 0.0 || p_forward_slip > 0.5 || p_turn_slip < 0.0 ||
        p_turn_slip > 0.5)
        throw ConfigError("slip probabilities must be in [0, 0.5]");
}

namespace {

// Intended heading delta per turn action. TurnAround turns like TurnLeft
// with a mean rotation of half a revolution.
int turn_delta(Action a, int headings) {
    switch (a) {
        case Action::TurnLeft: return -1;
        case Action::TurnRight: return 1;
        case Action::TurnAround: return -headings / 2;
        default: return 0;
    }
}

}  // namespace

StepOutcome step(const GridMap& map, const Pose& pose, Action action,
                 const NoiseModel& noise, int headings, Rng& rng) {
    StepOutcome out;
    out.pose = pose;
    out.intended = action;

    if (action == Action::Forward) {
        auto [dx, dy] = heading_dir(pose.heading, headings);
        int tx = pose.x + dx, ty = pose.y + dy;
        if (map.occupied(tx, ty)) {
            out.collided = true;
            out.motion = Motion::Blocked;
            return out;
        }
        if (uniform01(rng) < noise.p_forward_slip) {
            out.motion = Motion::SlippedStay;
            return out;
        }
        out.pose.x = tx;
        out.pose.y = ty;
        out.motion = Motion::AsIntended;
        return out;
    }

    int delta = turn_delta(action, headings);
    double u = uniform01(rng);
    if (u < noise.p_turn_slip) {
        // Half the slip mass under-rotates, half over-rotates.
        if (u < noise.p_turn_slip * 0.5) {
            delta += delta > 0 ? -1 : 1;
            out.motion = Motion::SlippedUnderTurn;
        } else {
            delta += delta > 0 ? 1 : -1;
            out.motion = Motion::SlippedOverTurn;
        }
    }
    out.pose.heading = wrap_heading(pose.heading + delta, headings);
    return out;
}

Displacement dead_reckon(std::span<const Action> intended, int headings) {
    Pose p = dead_reckon_from(Pose{0, 0, 0}, intended, headings);
    return Displacement{p.x, p.y, p.heading};
}

Pose dead_reckon_from(const Pose& start, std::span<const Action> intended,
                      int headings) {
    Pose p = start;
    for (Action a : intended) {
        if (a == Action::Forward) {
            auto [dx, dy] = heading_dir(p.heading, headings);
            p.x += dx;
            p.y += dy;
        } else {
            p.heading = wrap_heading(p.heading + turn_delta(a, headings), headings);
        }
    }
    return p;
}

}  // namespace creplay
