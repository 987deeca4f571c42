#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creplay/decode.hpp"

namespace creplay {

// One distribution per heading at a source location (or signature).
struct AngleProfile {
    std::vector<std::vector<double>> rows;  // [headings][k+1]
    std::string source;
};

// Base-2 Jensen-Shannon divergence between two distributions, in [0, 1].
double jsd(std::span<const double> p, std::span<const double> q);

// min over cyclic heading offsets of the mean per-heading JSD — rotation-
// aligned profile dissimilarity. Rejects mismatched shapes.
double jsd_aligned(const AngleProfile& a, const AngleProfile& b);

// Profile at a cell from a fitted table; rows are the smoothed per-heading
// distributions. nullopt when no heading at the cell was ever observed.
std::optional<AngleProfile> cell_profile(const HittingTable& table, int x, int y,
                                         std::string source = "");

struct CorpusEntry {
    std::string map_id;
    int x = 0;
    int y = 0;
    AngleProfile profile;
};

struct NnResult {
    std::size_t index = 0;  // into the corpus
    double dissimilarity = 0.0;
};

// Ascending jsd_aligned; ties broken by corpus order. With one_per_scene,
// keeps only the best entry per map_id.
std::vector<NnResult> nearest_neighbors(const AngleProfile& query,
                                        std::span<const CorpusEntry> corpus,
                                        std::size_t m, bool one_per_scene);

// Probability that a same-class pair has lower dissimilarity than a
// different-class pair, ties counted half (Mann-Whitney rank statistic).
// Throws UndefinedMetricError unless both classes are present.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> same_class);

// Geometry-derived scene classes from the 4-neighborhood and the ground-truth
// distance function. Cells between categories are Unlabeled.
enum class GeometryClass : std::uint8_t {
    Open,
    WallAdjacent,
    Corridor,
    Corner,
    Unlabeled,
    Occupied,
};

const char* to_string(GeometryClass c);

std::vector<GeometryClass> geometry_labels(const GridMap& map);

struct MetricsReport {
    double mae = 0.0;               // meters
    double rmse = 0.0;              // meters
    double pct_within_delta = 0.0;  // fraction with |err| < delta
    double iou = 0.0;               // floorplan intersection-over-union
    std::size_t n_cells = 0;
    double delta = 0.25;            // meters
};

// MAE / RMSE / %<delta over cells where both fields are defined (optionally
// intersected with extra_mask); IoU over thresholded floorplans on the full
// grid. Throws UndefinedMetricError on an empty evaluation mask.
MetricsReport field_metrics(const DistField& pred, const DistField& truth,
                            double delta,
                            const std::vector<std::uint8_t>* extra_mask = nullptr);

// IoU of two binary masks, optionally restricted to eval_mask cells.
double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                const std::vector<std::uint8_t>* eval_mask = nullptr);

// F1 of thresholded probabilities against binary truth. Throws
// UndefinedMetricError when the truth has no positives.
double binary_f1(std::span<const double> probs, std::span<const std::uint8_t> truth,
                 double threshold = 0.5);

// Single-row-per-method CSV plus an aligned human-readable table.
std::string metrics_to_csv(
    std::span<const std::pair<std::string, MetricsReport>> rows,
    const std::vector<std::string>& comments = {});
std::string metrics_to_text(
    std::span<const std::pair<std::string, MetricsReport>> rows);

}  // namespace creplay
