#pragma once

#include <span>

#include "creplay/dist_field.hpp"
#include "creplay/estimator.hpp"

namespace creplay {

struct DecodeConfig {
    double eps = 0.05;        // cumulative-probability threshold
    bool interpolate = true;  // uniform-within-bin interpolation

    void validate() const;
};

struct DecodeResult {
    double steps = 0.0;
    bool saturated = false;  // decoding landed in the k+ bin
};

// First bin i with CDF(i) >= eps. With interpolation, bin i holds uniform
// mass on [i-0.5, i+0.5] and the result is clamp(i - 0.5 +
// (eps - CDF(i-1)) / p_i, 0, k). Landing in the terminal k+ bin reports
// exactly k steps and sets `saturated`. Rejects all-zero vectors.
DecodeResult eps_decode(std::span<const double> dist, double eps,
                        bool interpolate);

// Per-(cell, heading) decoded collision times in meters; unknown where
// unvisited.
class HeadingField {
public:
    static constexpr double kUnknown = -2.0;

    HeadingField(int width, int height, int headings);

    int width() const { return width_; }
    int height() const { return height_; }
    int headings() const { return headings_; }

    bool known(int x, int y, int h) const { return at(x, y, h) >= 0.0; }
    double at(int x, int y, int h) const { return values_[index(x, y, h)]; }
    void set(int x, int y, int h, double meters) { values_[index(x, y, h)] = meters; }

    // One DistField per heading (for CSV/PGM export).
    DistField slice(int h, const GridMap& map) const;

private:
    std::size_t index(int x, int y, int h) const {
        return (static_cast<std::size_t>(y) * width_ + x) * headings_ + h;
    }

    int width_;
    int height_;
    int headings_;
    std::vector<double> values_;
};

HeadingField per_heading_map(const HittingTable& table, const DecodeConfig& cfg,
                             const GridMap& map);

// Per cell: min over observed headings of decoded steps, times step_size.
// Cells with no observed heading are unknown.
DistField distance_field(const HittingTable& table, const DecodeConfig& cfg,
                         const GridMap& map);

// Distance field from a scalar regressor (mean or median steps per key).
DistField distance_field_from_scalar(const ScalarField& field, const GridMap& map);

// Binary floorplans, free = 1. Unknown cells are conservatively occupied.
std::vector<std::uint8_t> floorplan_from_field(const DistField& field);
std::vector<std::uint8_t> floorplan_from_freespace(const FreespaceModel& model,
                                                   double threshold,
                                                   const GridMap& map);
std::vector<std::uint8_t> true_floorplan(const GridMap& map);

// P(T < K) = sum_{t<K} p_t; emulates a fixed-horizon binary predictor.
double binary_within_k(std::span<const double> dist, int K);

}  // namespace creplay
