#include <doctest.h>

#include <sstream>

#include "creplay/estimator.hpp"
#include "creplay/rollout.hpp"
#include "creplay/ruin.hpp"
#include "oracles.hpp"

using namespace creplay;
namespace oracle = creplay::testing;

namespace {

// Every adjacent pose pair must be a legal motion and the collided flag must
// match an occupied forward neighbor.
void check_consistency(const GridMap& map, const Trajectory& traj) {
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const StepRecord& s = traj.steps[i];
        REQUIRE(map.free_cell(s.pose.x, s.pose.y));
        auto [dx, dy] = heading_dir(s.pose.heading, traj.headings);
        bool blocked = map.occupied(s.pose.x + dx, s.pose.y + dy);
        CHECK(s.collided == (s.action == Action::Forward && blocked));
        if (i + 1 < traj.steps.size()) {
            const Pose& next = traj.steps[i + 1].pose;
            if (s.action == Action::Forward) {
                CHECK(next.heading == s.pose.heading);
                bool stayed = next.x == s.pose.x && next.y == s.pose.y;
                bool moved = next.x == s.pose.x + dx && next.y == s.pose.y + dy;
                CHECK((s.collided ? stayed : (stayed || moved)));
            } else {
                CHECK(next.x == s.pose.x);
                CHECK(next.y == s.pose.y);
            }
        }
    }
}

}  // namespace

TEST_CASE("policy validation") {
    CHECK_THROWS_AS((PolicyConfig{0.5, 0.2, 0.2, true}.validate()), ConfigError);
    CHECK_THROWS_AS((PolicyConfig{-0.2, 0.6, 0.6, true}.validate()), ConfigError);
    PolicyConfig{}.validate();
}

TEST_CASE("forward-only walk collides after exactly the straight-line distance") {
    GridMap corr = oracle::corridor(20);
    PolicyConfig forward_only{1.0, 0.0, 0.0, false};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Trajectory traj =
            run_walk(corr, forward_only, NoiseModel::none(), 60, seed);
        const Pose start = traj.steps[0].pose;
        auto [dx, dy] = heading_dir(start.heading, kHeadings4);
        int dist = 0;
        while (corr.free_cell(start.x + (dist + 1) * dx, start.y + (dist + 1) * dy))
            ++dist;
        int first_collision = -1;
        for (const StepRecord& s : traj.steps)
            if (s.collided) {
                first_collision = s.t;
                break;
            }
        CHECK(first_collision == dist);
    }
}

TEST_CASE("run_walk is deterministic in the seed") {
    GridMap map = generate_map(MapKind::Rooms, 2, 24, 24, 0.1);
    Trajectory a = run_walk(map, PolicyConfig{}, NoiseModel{}, 500, 42);
    Trajectory b = run_walk(map, PolicyConfig{}, NoiseModel{}, 500, 42);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].pose == b.steps[i].pose);
        CHECK(a.steps[i].action == b.steps[i].action);
        CHECK(a.steps[i].collided == b.steps[i].collided);
    }
    check_consistency(map, a);
}

TEST_CASE("empirical action frequencies match the policy") {
    GridMap map = oracle::empty_room(20, 20);
    Trajectory traj = run_walk(map, PolicyConfig{}, NoiseModel{}, 100000, 7);
    std::size_t n = 0, fwd = 0, left = 0, right = 0;
    bool prev_collided = false;
    for (const StepRecord& s : traj.steps) {
        if (!prev_collided) {  // exclude forced turn-arounds
            ++n;
            if (s.action == Action::Forward) ++fwd;
            if (s.action == Action::TurnLeft) ++left;
            if (s.action == Action::TurnRight) ++right;
        }
        prev_collided = s.collided;
    }
    CHECK(static_cast<double>(fwd) / n == doctest::Approx(0.6).epsilon(0.017));
    CHECK(static_cast<double>(left) / n == doctest::Approx(0.2).epsilon(0.05));
    CHECK(static_cast<double>(right) / n == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("forced turn-around replaces the policy draw after collisions") {
    GridMap corr = oracle::corridor(6);
    Trajectory traj =
        run_walk(corr, PolicyConfig{0.9, 0.05, 0.05, true}, NoiseModel::none(),
                 5000, 3);
    int collisions = 0;
    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        if (traj.steps[i].collided) {
            ++collisions;
            CHECK(traj.steps[i + 1].action == Action::TurnAround);
        }
    }
    CHECK(collisions > 50);
}

TEST_CASE("run_batch seeds, sizes, and parallel equivalence") {
    GridMap map = generate_map(MapKind::Corridors, 9, 20, 20, 0.05);
    CHECK(run_batch(map, PolicyConfig{}, NoiseModel{}, 0, 100, 5).empty());

    auto serial = run_batch(map, PolicyConfig{}, NoiseModel{}, 10, 500, 123,
                            kHeadings4, 1);
    REQUIRE(serial.size() == 10);
    for (const Trajectory& t : serial) CHECK(t.steps.size() == 500);
    CHECK(serial[3].seed == 123 + 3);

    auto parallel = run_batch(map, PolicyConfig{}, NoiseModel{}, 10, 500, 123,
                              kHeadings4, 4);
    for (std::size_t w = 0; w < serial.size(); ++w) {
        REQUIRE(parallel[w].steps.size() == serial[w].steps.size());
        for (std::size_t i = 0; i < serial[w].steps.size(); ++i)
            CHECK(parallel[w].steps[i].pose == serial[w].steps[i].pose);
    }
}

TEST_CASE("JSONL trajectory log round-trips") {
    GridMap map = generate_map(MapKind::Rooms, 4, 16, 16, 0.0);
    auto walks = run_batch(map, PolicyConfig{}, NoiseModel{}, 3, 50, 77);
    std::stringstream ss;
    write_trajectories_jsonl(ss, walks, map, PolicyConfig{}, NoiseModel{}, 77,
                             "cafef00dcafef00d");
    CHECK(ss.str().find("cafef00dcafef00d") != std::string::npos);
    auto loaded = read_trajectories_jsonl(ss);
    REQUIRE(loaded.size() == walks.size());
    for (std::size_t w = 0; w < walks.size(); ++w) {
        CHECK(loaded[w].map_id == walks[w].map_id);
        CHECK(loaded[w].seed == walks[w].seed);
        REQUIRE(loaded[w].steps.size() == walks[w].steps.size());
        for (std::size_t i = 0; i < walks[w].steps.size(); ++i) {
            CHECK(loaded[w].steps[i].pose == walks[w].steps[i].pose);
            CHECK(loaded[w].steps[i].action == walks[w].steps[i].action);
            CHECK(loaded[w].steps[i].collided == walks[w].steps[i].collided);
        }
    }
}

// The agent on a 1-cell-tall corridor, driven one forward attempt at a time,
// is exactly the 1-D absorbing walk: empirical absorption statistics must
// match the closed forms, and the per-visit mean remaining time matches the
// expected duration (the mean regressor's target).
TEST_CASE("corridor walk reduces to the 1-D absorbing walk") {
    const RuinParams params{20, 51, 0.8};
    GridMap corr = oracle::corridor(50);  // free cells x = 1..50
    Rng rng = make_rng(1234);
    const int episodes = 100000;

    std::uint64_t ruined = 0;
    double total_time = 0.0;
    std::vector<ReplaySample> visits_at_start;

    for (int e = 0; e < episodes; ++e) {
        Pose pose{params.start, 1, 0};
        std::vector<int> visit_times_at_z;
        int t = 0;
        for (;;) {
            if (pose.x == params.start) visit_times_at_z.push_back(t);
            bool toward = uniform01(rng) < params.p_toward;
            int want = toward ? 2 : 0;  // W : E
            if (pose.heading != want) {
                StepOutcome turn = step(corr, pose, Action::TurnAround,
                                        NoiseModel::none(), kHeadings4, rng);
                pose = turn.pose;  // rotation is free in the gambler's clock
            }
            StepOutcome out = step(corr, pose, Action::Forward,
                                   NoiseModel::none(), kHeadings4, rng);
            ++t;  // forward attempts only
            pose = out.pose;
            if (out.collided) break;
        }
        const bool is_ruin = pose.x == 1;  // bumped the x=0 wall
        if (is_ruin) ++ruined;
        total_time += t;
        for (int vt : visit_times_at_z)
            visits_at_start.push_back(ReplaySample{params.start, 1, 0, t - vt,
                                                   Action::Forward,
                                                   Regime::Oracle,
                                                   SampleFlag::None});
    }

    // Absorption here is overwhelmingly ruin (q/p = 4).
    const double ruin_p = ruin_probability(params);
    CHECK(static_cast<double>(ruined) / episodes ==
          doctest::Approx(ruin_p).epsilon(1e-4));

    const double expected = expected_duration(params);
    CHECK(total_time / episodes == doctest::Approx(expected).epsilon(0.01));

    ScalarField mean = fit_mean(visits_at_start, Keying::PerCell);
    auto entry = mean.at(CellKey{params.start, 1, -1});
    REQUIRE(entry.has_value());
    CHECK(entry->value == doctest::Approx(expected).epsilon(0.02));
    CHECK(entry->value > params.start);
}
