#include "creplay/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace creplay {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    policy.validate();
    noise.validate();
    decode.validate();
    if (!valid_heading_count(headings))
        throw ConfigError("headings must be 4 or 8");
    if (n_walks < 0) throw ConfigError("walks must be >= 0");
    if (n_steps < 1) throw ConfigError("steps must be >= 1");
    if (replay_k < 1) throw ConfigError("replay k must be >= 1");
    if (replay_window < 1) throw ConfigError("replay window must be >= 1");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (delta <= 0.0) throw ConfigError("delta must be > 0");
    if (freespace_threshold <= 0.0 || freespace_threshold >= 1.0)
        throw ConfigError("freespace threshold must be in (0, 1)");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("expected boolean for " + key + ", got '" + v + "'");
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", lineno, 1);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", lineno, 1);
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "map.file") cfg.map.file = value;
        else if (key == "map.kind") cfg.map.kind = map_kind_from_string(value);
        else if (key == "map.seed") cfg.map.seed = std::stoull(value);
        else if (key == "map.width") cfg.map.width = std::stoi(value);
        else if (key == "map.height") cfg.map.height = std::stoi(value);
        else if (key == "map.density") cfg.map.density = std::stod(value);
        else if (key == "map.step_size") cfg.map.step_size = std::stod(value);
        else if (key == "world.headings") cfg.headings = std::stoi(value);
        else if (key == "policy.p_forward") cfg.policy.p_forward = std::stod(value);
        else if (key == "policy.p_left") cfg.policy.p_left = std::stod(value);
        else if (key == "policy.p_right") cfg.policy.p_right = std::stod(value);
        else if (key == "policy.turn_around_on_collision")
            cfg.policy.turn_around_on_collision = parse_bool(value, key);
        else if (key == "noise.p_forward_slip")
            cfg.noise.p_forward_slip = std::stod(value);
        else if (key == "noise.p_turn_slip") cfg.noise.p_turn_slip = std::stod(value);
        else if (key == "walk.walks") cfg.n_walks = std::stoi(value);
        else if (key == "walk.steps") cfg.n_steps = std::stoi(value);
        else if (key == "walk.seed") cfg.walk_seed = std::stoull(value);
        else if (key == "replay.k") cfg.replay_k = std::stoi(value);
        else if (key == "replay.window") cfg.replay_window = std::stoi(value);
        else if (key == "estimator.alpha") cfg.alpha = std::stod(value);
        else if (key == "decode.eps") cfg.decode.eps = std::stod(value);
        else if (key == "decode.interpolate")
            cfg.decode.interpolate = parse_bool(value, key);
        else if (key == "eval.delta") cfg.delta = std::stod(value);
        else if (key == "eval.freespace_threshold")
            cfg.freespace_threshold = std::stod(value);
        else if (key == "output.dir") cfg.out_dir = value;
        else throw ConfigError("unknown config key: " + key);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingArtifactError(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "map.file=" + cfg.map.file + "\n";
    out += "map.kind=" + std::string(to_string(cfg.map.kind)) + "\n";
    out += "map.seed=" + std::to_string(cfg.map.seed) + "\n";
    out += "map.width=" + std::to_string(cfg.map.width) + "\n";
    out += "map.height=" + std::to_string(cfg.map.height) + "\n";
    out += "map.density=" + fmt_g17(cfg.map.density) + "\n";
    out += "map.step_size=" + fmt_g17(cfg.map.step_size) + "\n";
    out += "world.headings=" + std::to_string(cfg.headings) + "\n";
    out += "policy.p_forward=" + fmt_g17(cfg.policy.p_forward) + "\n";
    out += "policy.p_left=" + fmt_g17(cfg.policy.p_left) + "\n";
    out += "policy.p_right=" + fmt_g17(cfg.policy.p_right) + "\n";
    out += "policy.turn_around_on_collision=" +
           std::string(cfg.policy.turn_around_on_collision ? "true" : "false") + "\n";
    out += "noise.p_forward_slip=" + fmt_g17(cfg.noise.p_forward_slip) + "\n";
    out += "noise.p_turn_slip=" + fmt_g17(cfg.noise.p_turn_slip) + "\n";
    out += "walk.walks=" + std::to_string(cfg.n_walks) + "\n";
    out += "walk.steps=" + std::to_string(cfg.n_steps) + "\n";
    out += "walk.seed=" + std::to_string(cfg.walk_seed) + "\n";
    out += "replay.k=" + std::to_string(cfg.replay_k) + "\n";
    out += "replay.window=" + std::to_string(cfg.replay_window) + "\n";
    out += "estimator.alpha=" + fmt_g17(cfg.alpha) + "\n";
    out += "decode.eps=" + fmt_g17(cfg.decode.eps) + "\n";
    out += "decode.interpolate=" +
           std::string(cfg.decode.interpolate ? "true" : "false") + "\n";
    out += "eval.delta=" + fmt_g17(cfg.delta) + "\n";
    out += "eval.freespace_threshold=" + fmt_g17(cfg.freespace_threshold) + "\n";
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : canonical_config(cfg))
        h = (h ^ static_cast<std::uint8_t>(c)) * 1099511628211ull;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

GridMap load_map_file(const std::string& path, double step_size) {
    std::ifstream is(path);
    if (!is) throw MissingArtifactError(path);
    std::stringstream ss;
    ss << is.rdbuf();
    GridMap map = load_map(ss.str(), step_size);
    map.set_id(fs::path(path).stem().string());
    return map;
}

GridMap load_or_generate(const MapSource& source) {
    if (!source.file.empty()) return load_map_file(source.file, source.step_size);
    return generate_map(source.kind, source.seed, source.width, source.height,
                        source.density, source.step_size);
}

int env_threads() {
    const char* v = std::getenv("COLLISION_REPLAY_THREADS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n < 1 ? 1 : n;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingArtifactError(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

GridMap pipeline_map(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::string path = out_dir + "/map.txt";
    GridMap map = load_map(slurp(path), cfg.map.step_size);
    std::ifstream meta(out_dir + "/map.meta.json");
    if (meta) {
        nlohmann::json j = nlohmann::json::parse(meta, nullptr, false);
        if (!j.is_discarded() && j.contains("map_id"))
            map.set_id(j["map_id"].get<std::string>());
    }
    return map;
}

std::vector<Trajectory> pipeline_walks(const std::string& out_dir) {
    std::ifstream is(out_dir + "/trajectories.jsonl");
    if (!is) throw MissingArtifactError(out_dir + "/trajectories.jsonl");
    return read_trajectories_jsonl(is);
}

HittingTable pipeline_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingArtifactError(path);
    return read_table_csv(is);
}

ScalarField pipeline_scalar(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingArtifactError(path);
    return read_scalar_csv(is);
}

std::vector<ReplaySample> remote_samples(const GridMap& map,
                                         const std::vector<Trajectory>& walks,
                                         const ExperimentConfig& cfg,
                                         Regime regime) {
    ReplayConfig rc{cfg.replay_k, cfg.replay_window, regime};
    std::vector<ReplaySample> all;
    for (const Trajectory& traj : walks) {
        auto s = label_remote(map, traj, rc);
        all.insert(all.end(), s.begin(), s.end());
    }
    return all;
}

}  // namespace

void stage_walk(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    GridMap map = load_or_generate(cfg.map);
    const std::string hash = config_hash(cfg);

    write_file(out_dir + "/map.txt", save_map(map));
    nlohmann::json meta{{"map_id", map.id()}, {"config_hash", hash}};
    write_file(out_dir + "/map.meta.json", meta.dump() + "\n");

    auto walks = run_batch(map, cfg.policy, cfg.noise, cfg.n_walks, cfg.n_steps,
                           cfg.walk_seed, cfg.headings, env_threads());
    std::ofstream os(out_dir + "/trajectories.jsonl", std::ios::binary);
    write_trajectories_jsonl(os, walks, map, cfg.policy, cfg.noise, cfg.walk_seed,
                             hash);
}

void stage_fit(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    GridMap map = pipeline_map(cfg, out_dir);
    auto walks = pipeline_walks(out_dir);
    const std::vector<std::string> comments = {"config_hash=" + config_hash(cfg)};

    for (Regime regime : {Regime::Oracle, Regime::DeadReckoned}) {
        auto samples = remote_samples(map, walks, cfg, regime);
        const std::string tag = regime == Regime::Oracle ? "oracle" : "dead";
        {
            HittingTable table =
                fit_table(samples, cfg.replay_k, cfg.alpha, cfg.headings);
            std::ofstream os(out_dir + "/table_" + tag + ".csv", std::ios::binary);
            write_table_csv(os, table, comments);
        }
        {
            ScalarField mean = fit_mean(samples, Keying::PerCellHeading);
            std::ofstream os(out_dir + "/mean_" + tag + ".csv", std::ios::binary);
            write_scalar_csv(os, mean, comments);
        }
        {
            ScalarField median = fit_median(samples, Keying::PerCellHeading);
            std::ofstream os(out_dir + "/median_" + tag + ".csv", std::ios::binary);
            write_scalar_csv(os, median, comments);
        }
    }
    FreespaceModel fsm = fit_freespace(walks);
    std::ofstream os(out_dir + "/freespace.csv", std::ios::binary);
    write_freespace_csv(os, fsm, comments);
}

void stage_decode(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    GridMap map = pipeline_map(cfg, out_dir);
    const std::vector<std::string> comments = {"config_hash=" + config_hash(cfg)};

    DistField truth = ground_truth_df(map, cfg.headings);
    write_file(out_dir + "/df_truth.csv", df_to_csv(truth, comments));
    write_file(out_dir + "/df_truth.pgm", df_to_pgm(truth, comments));

    for (const std::string tag : {"oracle", "dead"}) {
        HittingTable table = pipeline_table(out_dir + "/table_" + tag + ".csv");
        DistField df = distance_field(table, cfg.decode, map);
        write_file(out_dir + "/df_class_" + tag + ".csv", df_to_csv(df, comments));
        write_file(out_dir + "/df_class_" + tag + ".pgm", df_to_pgm(df, comments));
        HeadingField per_heading = per_heading_map(table, cfg.decode, map);
        for (int h = 0; h < per_heading.headings(); ++h) {
            DistField slice = per_heading.slice(h, map);
            write_file(out_dir + "/heading_" + std::to_string(h) + "_" + tag +
                           ".pgm",
                       df_to_pgm(slice, comments));
        }
    }
}

void stage_eval(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    GridMap map = pipeline_map(cfg, out_dir);
    DistField truth = ground_truth_df(map, cfg.headings);

    std::vector<std::pair<std::string, MetricsReport>> rows;
    for (const std::string tag : {"oracle", "dead"}) {
        HittingTable table = pipeline_table(out_dir + "/table_" + tag + ".csv");
        rows.emplace_back("classification_" + tag,
                          field_metrics(distance_field(table, cfg.decode, map),
                                        truth, cfg.delta));
        ScalarField mean = pipeline_scalar(out_dir + "/mean_" + tag + ".csv");
        rows.emplace_back("mean_" + tag,
                          field_metrics(distance_field_from_scalar(mean, map),
                                        truth, cfg.delta));
        ScalarField median = pipeline_scalar(out_dir + "/median_" + tag + ".csv");
        rows.emplace_back("median_" + tag,
                          field_metrics(distance_field_from_scalar(median, map),
                                        truth, cfg.delta));
    }
    {
        std::ifstream is(out_dir + "/freespace.csv");
        if (!is) throw MissingArtifactError(out_dir + "/freespace.csv");
        FreespaceModel fsm = read_freespace_csv(is);
        MetricsReport r;
        r.mae = r.rmse = r.pct_within_delta = std::nan("");
        r.delta = cfg.delta;
        auto plan = floorplan_from_freespace(fsm, cfg.freespace_threshold, map);
        r.iou = mask_iou(plan, true_floorplan(map));
        r.n_cells = fsm.raw().size();
        rows.emplace_back("freespace", r);
    }
    const std::vector<std::string> comments = {"config_hash=" + config_hash(cfg)};
    write_file(out_dir + "/metrics.csv", metrics_to_csv(rows, comments));
    write_file(out_dir + "/metrics.txt", metrics_to_text(rows));
}

}  // namespace creplay
