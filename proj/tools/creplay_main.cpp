// creplay: grid-world collision-replay workbench.
// Pipeline: map gen -> walk -> fit -> decode -> eval, plus ruin analytics
// and nearest-neighbor lookup over fitted hitting-time tables.
//
// Exit codes: 0 ok, 2 usage/invalid parameters, 3 generation failure,
// 4 missing or unreadable artifact.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "creplay/experiment.hpp"
#include "creplay/ruin.hpp"

namespace {

using namespace creplay;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitMissing = 4;

std::pair<int, int> parse_size(const std::string& s) {
    std::size_t x = s.find('x');
    if (x == std::string::npos)
        throw ConfigError("size must look like 32x32, got '" + s + "'");
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

void write_file_or_die(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

int cmd_map_gen(const std::string& kind, std::uint64_t seed,
                const std::string& size, double density, double step_size,
                const std::string& out) {
    auto [w, h] = parse_size(size);
    GridMap map = generate_map(map_kind_from_string(kind), seed, w, h, density,
                               step_size);
    write_file_or_die(out, save_map(map));
    std::cout << "wrote " << out << " (" << map.width() << "x" << map.height()
              << ", " << map.free_count() << " free cells, id " << map.id()
              << ")\n";
    return kExitOk;
}

int cmd_map_stats(const std::string& path, int headings) {
    GridMap map = load_map_file(path);
    DistField df = ground_truth_df(map, headings);
    double lo = -1.0, hi = -1.0;
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (df.known(x, y)) {
                double v = df.meters(x, y);
                if (lo < 0.0 || v < lo) lo = v;
                if (v > hi) hi = v;
            }
    std::cout << "map: " << map.id() << "\n"
              << "size: " << map.width() << "x" << map.height() << "\n"
              << "free cells: " << map.free_count() << "\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "ground-truth DF range: [%.2f, %.2f] m\n", lo,
                  hi);
    std::cout << buf;
    return kExitOk;
}

int cmd_map_export(const std::string& path, int headings, const std::string& csv,
                   const std::string& pgm) {
    GridMap map = load_map_file(path);
    DistField df = ground_truth_df(map, headings);
    if (!csv.empty()) write_file_or_die(csv, df_to_csv(df));
    if (!pgm.empty()) write_file_or_die(pgm, df_to_pgm(df));
    return kExitOk;
}

int cmd_ruin(int z, int a, double p, std::uint64_t mc_episodes,
             std::uint64_t seed, long t_max, long t_limit,
             const std::string& pmf_csv) {
    RuinParams params{z, a, p};
    params.validate();

    char buf[160];
    std::snprintf(buf, sizeof(buf), "ruin_probability:        %.10f\n",
                  ruin_probability(params));
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "expected_duration:       %.4f\n",
                  expected_duration(params));
    std::cout << buf;
    if (2 * z <= a) {
        std::snprintf(buf, sizeof(buf), "shortest_path_prob:      %.8f\n",
                      shortest_path_probability(params));
        std::cout << buf;
    }
    double at_z = 0.0, at_z2 = 0.0, at_z4 = 0.0;
    for (long t = 1; t <= z + 4; ++t) {
        double v = ruin_time_pmf(params, t);
        if (t <= z) at_z += v;
        if (t <= z + 2) at_z2 += v;
        at_z4 += v;
    }
    std::snprintf(buf, sizeof(buf),
                  "P(T<=z): %.6f  P(T<=z+2): %.6f  P(T<=z+4): %.6f\n", at_z,
                  at_z2, at_z4);
    std::cout << buf;

    McRuinSummary mc;
    if (mc_episodes > 0) {
        mc = mc_absorbing_walk(params, mc_episodes, seed, t_max);
        std::snprintf(buf, sizeof(buf),
                      "mc: episodes=%llu ruin_fraction=%.6f mean_absorption=%.4f "
                      "mean_ruin_time=%.4f censored=%llu\n",
                      static_cast<unsigned long long>(mc.episodes),
                      mc.ruin_fraction(), mc.mean_absorption_time,
                      mc.mean_ruin_time,
                      static_cast<unsigned long long>(mc.censored));
        std::cout << buf;
    }
    if (!pmf_csv.empty()) {
        std::string out = "t,pmf,mc_frequency\n";
        for (long t = 1; t <= t_limit; ++t) {
            double freq = 0.0;
            if (mc_episodes > 0 &&
                t < static_cast<long>(mc.ruin_time_hist.size()))
                freq = static_cast<double>(mc.ruin_time_hist[t]) /
                       static_cast<double>(mc.episodes);
            std::snprintf(buf, sizeof(buf), "%ld,%.12g,%.12g\n", t,
                          ruin_time_pmf(params, t), freq);
            out += buf;
        }
        write_file_or_die(pmf_csv, out);
    }
    return kExitOk;
}

int cmd_nn(const std::vector<std::string>& corpus_specs, const std::string& query,
           std::size_t m, bool per_scene) {
    // Each corpus spec is table.csv:map.txt; the query cell indexes the first.
    std::vector<HittingTable> tables;
    std::vector<GridMap> maps;
    for (const std::string& spec : corpus_specs) {
        std::size_t colon = spec.rfind(':');
        if (colon == std::string::npos)
            throw ConfigError("corpus spec must be table.csv:map.txt");
        std::ifstream is(spec.substr(0, colon));
        if (!is) throw MissingArtifactError(spec.substr(0, colon));
        tables.push_back(read_table_csv(is));
        maps.push_back(load_map_file(spec.substr(colon + 1)));
    }
    std::size_t comma = query.find(',');
    if (comma == std::string::npos)
        throw ConfigError("query must be x,y");
    int qx = std::stoi(query.substr(0, comma));
    int qy = std::stoi(query.substr(comma + 1));

    std::vector<CorpusEntry> corpus;
    std::vector<GeometryClass> corpus_class;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto labels = geometry_labels(maps[i]);
        for (const CellKey& key : tables[i].sorted_keys()) {
            if (key.heading != 0) continue;  // one entry per cell
            if (!maps[i].in_bounds(key.x, key.y)) continue;
            auto profile = cell_profile(tables[i], key.x, key.y,
                                        maps[i].id() + ":" +
                                            std::to_string(key.x) + "," +
                                            std::to_string(key.y));
            if (!profile) continue;
            corpus.push_back(CorpusEntry{maps[i].id(), key.x, key.y,
                                         std::move(*profile)});
            corpus_class.push_back(labels[maps[i].index(key.x, key.y)]);
        }
    }
    auto query_profile = cell_profile(tables[0], qx, qy);
    if (!query_profile) throw MissingArtifactError("query cell " + query);

    auto ranked = nearest_neighbors(*query_profile, corpus, m, per_scene);
    std::cout << "rank,map,x,y,jsd,class\n";
    char buf[160];
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        const CorpusEntry& e = corpus[ranked[r].index];
        std::snprintf(buf, sizeof(buf), "%zu,%s,%d,%d,%.6f,%s\n", r + 1,
                      e.map_id.c_str(), e.x, e.y, ranked[r].dissimilarity,
                      to_string(corpus_class[ranked[r].index]));
        std::cout << buf;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"creplay: collision-replay grid-world workbench"};
    app.require_subcommand(1);

    // map
    auto* map_cmd = app.add_subcommand("map", "map generation and inspection");
    map_cmd->require_subcommand(1);
    std::string gen_kind = "rooms", gen_size = "32x32", gen_out = "map.txt";
    std::uint64_t gen_seed = 0;
    double gen_density = 0.0, gen_step = 0.25;
    auto* gen = map_cmd->add_subcommand("gen", "generate a map");
    gen->add_option("--kind", gen_kind, "rooms|corridors|random-obstacles");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--size", gen_size, "WxH, e.g. 32x32");
    gen->add_option("--density", gen_density, "obstacle density [0, 0.5)");
    gen->add_option("--step-size", gen_step, "meters per forward step");
    gen->add_option("-o,--out", gen_out, "output map file")->required();

    std::string stats_map;
    int stats_headings = 4;
    auto* stats = map_cmd->add_subcommand("stats", "print map statistics");
    stats->add_option("--map", stats_map, "map file")->required();
    stats->add_option("--headings", stats_headings, "heading count (4 or 8)");

    std::string export_map, export_csv, export_pgm;
    int export_headings = 4;
    auto* exp = map_cmd->add_subcommand("export", "export ground-truth DF");
    exp->add_option("--map", export_map, "map file")->required();
    exp->add_option("--headings", export_headings, "heading count");
    exp->add_option("--df-csv", export_csv, "CSV output path");
    exp->add_option("--df-pgm", export_pgm, "PGM output path");

    // pipeline stages
    std::string cfg_path, out_dir_override;
    double eps_override = -1.0;
    auto add_stage = [&](const char* name, const char* desc) {
        auto* c = app.add_subcommand(name, desc);
        c->add_option("--config", cfg_path, "experiment config file")->required();
        c->add_option("--out-dir", out_dir_override, "override output directory");
        return c;
    };
    auto* walk_cmd = add_stage("walk", "run random walks, write trajectories");
    auto* fit_cmd = add_stage("fit", "fit tables and baselines from trajectories");
    auto* decode_cmd =
        add_stage("decode", "decode distance fields and per-heading maps");
    decode_cmd->add_option("--eps", eps_override, "override decode epsilon");
    auto* eval_cmd = add_stage("eval", "evaluate against ground truth");

    // ruin
    int ruin_z = 20, ruin_a = 51;
    double ruin_p = 0.8;
    std::uint64_t ruin_mc = 0, ruin_seed = 1;
    long ruin_tmax = 1000000, ruin_tlimit = 0;
    std::string ruin_pmf_csv;
    auto* ruin_cmd = app.add_subcommand("ruin", "1-D absorbing-walk analytics");
    ruin_cmd->add_option("--z", ruin_z, "start cell (0 < z < a)")->required();
    ruin_cmd->add_option("--a", ruin_a, "far boundary")->required();
    ruin_cmd->add_option("--p", ruin_p, "probability of stepping toward wall 0")
        ->required();
    ruin_cmd->add_option("--mc", ruin_mc, "Monte Carlo episodes (0 = off)");
    ruin_cmd->add_option("--seed", ruin_seed, "Monte Carlo seed");
    ruin_cmd->add_option("--t-max", ruin_tmax, "episode step cap");
    ruin_cmd->add_option("--t-limit", ruin_tlimit,
                         "pmf CSV row limit (default z + 200)");
    ruin_cmd->add_option("--pmf-csv", ruin_pmf_csv, "write (t, pmf, mc) CSV");

    // nn
    std::vector<std::string> nn_corpus;
    std::string nn_query;
    std::size_t nn_m = 5;
    bool nn_per_scene = false;
    auto* nn_cmd =
        app.add_subcommand("nn", "nearest neighbors by aligned profile JSD");
    nn_cmd->add_option("--corpus", nn_corpus, "table.csv:map.txt (repeatable)")
        ->required();
    nn_cmd->add_option("--query", nn_query, "query cell x,y (first corpus map)")
        ->required();
    nn_cmd->add_option("-m", nn_m, "number of results");
    nn_cmd->add_flag("--per-scene", nn_per_scene, "at most one result per map");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_map_gen(gen_kind, gen_seed, gen_size, gen_density,
                               gen_step, gen_out);
        if (stats->parsed()) return cmd_map_stats(stats_map, stats_headings);
        if (exp->parsed())
            return cmd_map_export(export_map, export_headings, export_csv,
                                  export_pgm);
        if (walk_cmd->parsed() || fit_cmd->parsed() || decode_cmd->parsed() ||
            eval_cmd->parsed()) {
            ExperimentConfig cfg = load_experiment_config(cfg_path);
            if (eps_override > 0.0) cfg.decode.eps = eps_override;
            const std::string out =
                out_dir_override.empty() ? cfg.out_dir : out_dir_override;
            if (walk_cmd->parsed()) stage_walk(cfg, out);
            if (fit_cmd->parsed()) stage_fit(cfg, out);
            if (decode_cmd->parsed()) stage_decode(cfg, out);
            if (eval_cmd->parsed()) stage_eval(cfg, out);
            return kExitOk;
        }
        if (ruin_cmd->parsed()) {
            if (ruin_tlimit <= 0) ruin_tlimit = ruin_z + 200;
            return cmd_ruin(ruin_z, ruin_a, ruin_p, ruin_mc, ruin_seed,
                            ruin_tmax, ruin_tlimit, ruin_pmf_csv);
        }
        if (nn_cmd->parsed()) return cmd_nn(nn_corpus, nn_query, nn_m, nn_per_scene);
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissing;
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissing;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
