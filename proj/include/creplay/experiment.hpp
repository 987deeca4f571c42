#pragma once

#include <string>

#include "creplay/analysis.hpp"

namespace creplay {

// Map input: a file path, or generator parameters.
struct MapSource {
    std::string file;  // wins when non-empty
    MapKind kind = MapKind::Rooms;
    std::uint64_t seed = 0;
    int width = 32;
    int height = 32;
    double density = 0.0;
    double step_size = 0.25;
};

// Full pipeline description; a run is reproducible from this alone.
struct ExperimentConfig {
    MapSource map;
    int headings = kHeadings4;
    PolicyConfig policy;
    NoiseModel noise;
    int n_walks = 10;
    int n_steps = 500;
    std::uint64_t walk_seed = 1;
    int replay_k = 10;
    int replay_window = 20;
    double alpha = 1e-3;
    DecodeConfig decode;
    double delta = 0.25;
    double freespace_threshold = 0.5;
    std::string out_dir = "out";

    void validate() const;
};

// key = value sections; '#' and ';' start comments. Unknown keys are errors.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// Fixed-order serialization; the basis of the provenance hash.
std::string canonical_config(const ExperimentConfig& cfg);
// FNV-1a 64 of canonical_config, 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

GridMap load_map_file(const std::string& path, double step_size = 0.25);
GridMap load_or_generate(const MapSource& source);

// Parallelism cap from COLLISION_REPLAY_THREADS (default 1).
int env_threads();

// Pipeline stages. Each is a pure function of (config, upstream artifacts);
// missing inputs raise MissingArtifactError. Artifact names under out_dir:
//   walk:   map.txt, map.meta.json, trajectories.jsonl
//   fit:    table_oracle.csv, table_dead.csv, mean_*.csv, median_*.csv,
//           freespace.csv
//   decode: df_truth.{csv,pgm}, df_class_{oracle,dead}.{csv,pgm},
//           heading_<h>_{oracle,dead}.pgm
//   eval:   metrics.csv, metrics.txt
void stage_walk(const ExperimentConfig& cfg, const std::string& out_dir);
void stage_fit(const ExperimentConfig& cfg, const std::string& out_dir);
void stage_decode(const ExperimentConfig& cfg, const std::string& out_dir);
void stage_eval(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace creplay
