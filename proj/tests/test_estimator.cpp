#include <doctest.h>

#include <cmath>
#include <sstream>

#include "creplay/decode.hpp"
#include "creplay/estimator.hpp"
#include "oracles.hpp"

using namespace creplay;
namespace oracle = creplay::testing;

namespace {

ReplaySample sample_at(int x, int y, int h, int label,
                       Action action = Action::Forward) {
    return ReplaySample{x, y, h, label, action, Regime::Oracle, SampleFlag::None};
}

}  // namespace

TEST_CASE("fit_table counts and normalizes") {
    std::vector<ReplaySample> samples = {sample_at(3, 4, 0, 2),
                                         sample_at(3, 4, 0, 2),
                                         sample_at(3, 4, 0, 3)};
    HittingTable table = fit_table(samples, 10, 0.0, kHeadings4);
    auto dist = table.query(CellKey{3, 4, 0});
    REQUIRE(dist.has_value());
    CHECK((*dist)[2] == 2.0 / 3.0);
    CHECK((*dist)[3] == 1.0 / 3.0);
    CHECK((*dist)[0] == 0.0);
}

TEST_CASE("unvisited keys are uniform under smoothing, absent without") {
    HittingTable smoothed(10, 1e-3, kHeadings4);
    auto dist = smoothed.query(CellKey{1, 1, 0});
    REQUIRE(dist.has_value());
    for (double p : *dist) CHECK(p == doctest::Approx(1.0 / 11.0));

    HittingTable raw(10, 0.0, kHeadings4);
    CHECK_FALSE(raw.query(CellKey{1, 1, 0}).has_value());
    CHECK_FALSE(raw.has_key(CellKey{1, 1, 0}));
}

TEST_CASE("labels beyond k are rejected") {
    std::vector<ReplaySample> bad = {sample_at(0, 0, 0, 11)};
    CHECK_THROWS_AS(fit_table(bad, 10, 0.0, kHeadings4), ConfigError);
    CHECK_THROWS_AS(fit_table({{sample_at(0, 0, 0, -1)}}, 10, 0.0, kHeadings4),
                    ConfigError);
}

TEST_CASE("queried distributions are valid probability vectors") {
    Rng rng = make_rng(5);
    for (double alpha : {0.0, 1e-3, 0.5}) {
        HittingTable table(10, alpha, kHeadings4);
        for (int i = 0; i < 500; ++i)
            table.add(CellKey{static_cast<int>(uniform_below(rng, 6)),
                              static_cast<int>(uniform_below(rng, 6)),
                              static_cast<int>(uniform_below(rng, 4))},
                      static_cast<int>(uniform_below(rng, 11)));
        for (const CellKey& key : table.sorted_keys()) {
            auto dist = table.query(key);
            REQUIRE(dist.has_value());
            double sum = 0.0;
            for (double p : *dist) {
                CHECK(p >= 0.0);
                if (alpha > 0.0) CHECK(p > 0.0);
                sum += p;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            if (alpha == 0.0) {
                // Rational with denominator = sample count at the key.
                double n = static_cast<double>(table.key_count(key));
                for (double p : *dist)
                    CHECK(p * n == doctest::Approx(std::round(p * n)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("fit_mean and fit_median on tiny label sets") {
    std::vector<ReplaySample> samples = {sample_at(2, 2, 1, 2),
                                         sample_at(2, 2, 1, 2),
                                         sample_at(2, 2, 1, 3)};
    ScalarField mean = fit_mean(samples, Keying::PerCellHeading);
    ScalarField median = fit_median(samples, Keying::PerCellHeading);
    CHECK(mean.at(CellKey{2, 2, 1})->value == doctest::Approx(7.0 / 3.0));
    CHECK(median.at(CellKey{2, 2, 1})->value == 2.0);

    std::vector<ReplaySample> zero = {sample_at(5, 5, 0, 0)};
    CHECK(fit_mean(zero, Keying::PerCell).at(CellKey{5, 5, -1})->value == 0.0);
    CHECK(fit_median(zero, Keying::PerCell).at(CellKey{5, 5, -1})->value == 0.0);

    // Lower median on an even count.
    std::vector<ReplaySample> four = {sample_at(1, 1, 0, 1), sample_at(1, 1, 0, 2),
                                      sample_at(1, 1, 0, 7), sample_at(1, 1, 0, 9)};
    CHECK(fit_median(four, Keying::PerCellHeading).at(CellKey{1, 1, 0})->value ==
          2.0);
}

TEST_CASE("merge is the monoid of count tables") {
    GridMap map = generate_map(MapKind::Rooms, 6, 18, 18, 0.05);
    Trajectory traj = run_walk(map, PolicyConfig{}, NoiseModel{}, 3000, 55);
    ReplayConfig cfg;
    auto samples = label_remote(map, traj, cfg);

    HittingTable whole = fit_table(samples, 10, 1e-3, kHeadings4);

    // Empty-table identity.
    HittingTable empty(10, 1e-3, kHeadings4);
    HittingTable merged_with_empty = merge(whole, empty);
    CHECK(merged_with_empty.size() == whole.size());

    // 8-way sharded fit equals the serial fit bin for bin.
    std::vector<std::vector<ReplaySample>> shards(8);
    for (std::size_t i = 0; i < samples.size(); ++i)
        shards[i % 8].push_back(samples[i]);
    HittingTable acc(10, 1e-3, kHeadings4);
    for (const auto& shard : shards)
        acc = merge(acc, fit_table(shard, 10, 1e-3, kHeadings4));
    REQUIRE(acc.size() == whole.size());
    for (const CellKey& key : whole.sorted_keys()) {
        const auto* a = whole.counts(key);
        const auto* b = acc.counts(key);
        REQUIRE(b != nullptr);
        CHECK(*a == *b);
    }

    HittingTable other_k(8, 1e-3, kHeadings4);
    CHECK_THROWS_AS(merge(whole, other_k), ConfigError);
    HittingTable other_alpha(10, 1e-2, kHeadings4);
    CHECK_THROWS_AS(merge(whole, other_alpha), ConfigError);
}

TEST_CASE("table CSV serialization round-trips exactly") {
    GridMap map = generate_map(MapKind::RandomObstacles, 12, 14, 14, 0.15);
    Trajectory traj = run_walk(map, PolicyConfig{}, NoiseModel{}, 1500, 8);
    ReplayConfig cfg;
    cfg.regime = Regime::DeadReckoned;
    auto samples = label_remote(map, traj, cfg);
    HittingTable table = fit_table(samples, 10, 1e-3, kHeadings4);

    std::stringstream ss;
    write_table_csv(ss, table, {"config_hash=0123456789abcdef"});
    CHECK(ss.str().find("# creplay-table v1\n") == 0);
    CHECK(ss.str().find("# config_hash=0123456789abcdef\n") != std::string::npos);

    HittingTable loaded = read_table_csv(ss);
    CHECK(loaded.k() == table.k());
    CHECK(loaded.alpha() == table.alpha());
    CHECK(loaded.headings() == table.headings());
    REQUIRE(loaded.size() == table.size());
    for (const CellKey& key : table.sorted_keys()) {
        REQUIRE(loaded.counts(key) != nullptr);
        CHECK(*loaded.counts(key) == *table.counts(key));
    }

    // Serialization is canonical: a second write is byte-identical.
    std::stringstream s2, s3;
    write_table_csv(s2, loaded, {"config_hash=0123456789abcdef"});
    write_table_csv(s3, table, {"config_hash=0123456789abcdef"});
    CHECK(s2.str() == s3.str());
}

TEST_CASE("scalar and freespace CSV round-trips") {
    std::vector<ReplaySample> samples = {sample_at(2, 3, 0, 4),
                                         sample_at(2, 3, 0, 5),
                                         sample_at(4, 4, 2, 1)};
    ScalarField mean = fit_mean(samples, Keying::PerCellHeading);
    std::stringstream ss;
    write_scalar_csv(ss, mean);
    ScalarField loaded = read_scalar_csv(ss);
    CHECK(loaded.at(CellKey{2, 3, 0})->value == mean.at(CellKey{2, 3, 0})->value);
    CHECK(loaded.at(CellKey{4, 4, 2})->count == 1);

    GridMap map = oracle::corridor(8);
    auto walks = run_batch(map, PolicyConfig{}, NoiseModel{}, 4, 300, 10);
    FreespaceModel fsm = fit_freespace(walks);
    std::stringstream fs;
    write_freespace_csv(fs, fsm);
    FreespaceModel floaded = read_freespace_csv(fs);
    for (const CellKey& key : fsm.sorted_keys()) {
        CHECK(floaded.visits(key.x, key.y) == fsm.visits(key.x, key.y));
        CHECK(*floaded.prob(key.x, key.y) ==
              doctest::Approx(*fsm.prob(key.x, key.y)));
    }
}

TEST_CASE("freespace estimates collision probability per cell") {
    FreespaceModel model;
    for (int i = 0; i < 10; ++i) model.add_visit(3, 3, false);
    CHECK(*model.prob(3, 3) == 0.0);
    CHECK_FALSE(model.prob(4, 4).has_value());  // unvisited, unreported

    // Dead end of a short corridor under a forward-heavy policy collides on
    // a sizable share of visits.
    GridMap corr = oracle::corridor(5);
    auto walks = run_batch(corr, PolicyConfig{0.8, 0.1, 0.1, true}, NoiseModel{},
                           20, 2000, 77);
    FreespaceModel fsm = fit_freespace(walks);
    REQUIRE(fsm.visits(1, 1) > 200);
    CHECK(*fsm.prob(1, 1) > 0.3);
}

TEST_CASE("scan signatures quantize ray ranges") {
    ScanConfig cfg;  // 5 beams, 8 levels, 16 cells
    GridMap corr = oracle::corridor(30);
    // Facing the near wall: the straight-ahead beam sees range 1 -> level 0.
    ScanSignature sig =
        scan_signature(corr, Pose{1, 1, 2}, cfg, kHeadings8);
    CHECK(sig[2] == 0);  // beam 0 offset is the middle entry

    GridMap big = oracle::empty_room(40, 40);
    ScanSignature center = scan_signature(big, Pose{20, 20, 0}, cfg, kHeadings8);
    for (std::uint8_t q : center) CHECK(q == cfg.quant - 1);
}

TEST_CASE("scan signatures are translation invariant") {
    // The same local geometry embedded at two offsets in a larger room.
    auto build = [](int ox, int oy) {
        GridMap base = oracle::empty_room(30, 30);
        std::vector<std::uint8_t> occ(30 * 30, 0);
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 30; ++x)
                occ[static_cast<std::size_t>(y) * 30 + x] = base.occupied(x, y);
        occ[static_cast<std::size_t>(oy) * 30 + ox] = 1;  // one obstacle
        return GridMap(30, 30, std::move(occ));
    };
    GridMap a = build(10, 10);
    GridMap b = build(14, 13);
    ScanConfig cfg;
    for (int h = 0; h < 8; ++h) {
        CHECK(scan_signature(a, Pose{8, 8, h}, cfg, kHeadings8) ==
              scan_signature(b, Pose{12, 11, h}, cfg, kHeadings8));
    }
}

TEST_CASE("egocentric model: exact keys, fallback, and errors") {
    GridMap corr = oracle::corridor(12);
    std::vector<ReplaySample> samples = {
        sample_at(3, 1, 0, 2, Action::Forward),
        sample_at(3, 1, 0, 2, Action::Forward),
        sample_at(3, 1, 0, 3, Action::Forward),
    };
    ScanConfig scan;
    EgoModel model = fit_egocentric(corr, samples, scan, 10, 0.0, kHeadings4);
    REQUIRE(model.size() == 1);

    ScanSignature sig = scan_signature(corr, Pose{3, 1, 0}, scan, kHeadings4);
    auto res = model.query(EgoModel::Key{sig, Action::Forward});
    CHECK(res.exact);
    // Identical to fit_table on the same key's samples.
    HittingTable table = fit_table(samples, 10, 0.0, kHeadings4);
    auto expect = table.query(CellKey{3, 1, 0});
    for (std::size_t t = 0; t < res.dist.size(); ++t)
        CHECK(res.dist[t] == doctest::Approx((*expect)[t]));

    // Single stored key: every query falls back to it.
    ScanSignature far_sig(sig.size(), 7);
    auto fb = model.query(EgoModel::Key{far_sig, Action::TurnLeft});
    CHECK_FALSE(fb.exact);
    CHECK(fb.matched.action == Action::Forward);

    EgoModel empty(10, 0.0, scan);
    CHECK_THROWS_AS(empty.query(EgoModel::Key{sig, Action::Forward}),
                    std::runtime_error);
}

TEST_CASE("egocentric model: facing a wall, Forward decodes sooner than TurnLeft") {
    // L-shaped corridor: horizontal arm joins a vertical arm.
    std::string rows[] = {
        "##########",
        "#........#",
        "########.#",
        "########.#",
        "########.#",
        "##########",
    };
    std::string text;
    for (const auto& r : rows) text += r + std::string("\n");
    GridMap lmap = load_map(text);

    PolicyConfig policy{};
    ReplayConfig cfg;
    std::vector<ReplaySample> ego_samples;
    for (std::uint64_t w = 0; w < 60; ++w) {
        Trajectory traj = run_walk(lmap, policy, NoiseModel::none(), 2000, 900 + w);
        auto s = label_egocentric(traj, cfg);
        ego_samples.insert(ego_samples.end(), s.begin(), s.end());
    }
    ScanConfig scan{3, 8, 8};
    EgoModel model = fit_egocentric(lmap, ego_samples, scan, 10, 1e-3, kHeadings4);

    // Corner cell of the horizontal arm, facing the east wall.
    ScanSignature wall_sig = scan_signature(lmap, Pose{8, 1, 0}, scan, kHeadings4);
    auto fwd = model.query(EgoModel::Key{wall_sig, Action::Forward});
    auto left = model.query(EgoModel::Key{wall_sig, Action::TurnLeft});
    double t_fwd = eps_decode(fwd.dist, 0.05, true).steps;
    double t_left = eps_decode(left.dist, 0.05, true).steps;
    CHECK(t_fwd < t_left);
}
