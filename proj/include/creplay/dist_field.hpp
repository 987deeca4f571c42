#pragma once

#include <string>
#include <vector>

#include "creplay/grid_map.hpp"

namespace creplay {

// Per-cell distance to collision in meters. Cells are either known
// (value >= 0), marked occupied, or unknown (decoded fields only).
class DistField {
public:
    enum class Provenance : std::uint8_t { GroundTruth, Decoded };

    static constexpr double kOccupied = -1.0;
    static constexpr double kUnknown = -2.0;

    DistField(int width, int height, Provenance provenance);

    int width() const { return width_; }
    int height() const { return height_; }
    Provenance provenance() const { return provenance_; }

    double raw(int x, int y) const { return values_[index(x, y)]; }
    bool known(int x, int y) const { return values_[index(x, y)] >= 0.0; }
    bool occupied_mark(int x, int y) const {
        return values_[index(x, y)] == kOccupied;
    }
    // Known distance in meters; caller must check known() first.
    double meters(int x, int y) const { return values_[index(x, y)]; }

    void set(int x, int y, double meters) { values_[index(x, y)] = meters; }
    void set_occupied(int x, int y) { values_[index(x, y)] = kOccupied; }
    void set_unknown(int x, int y) { values_[index(x, y)] = kUnknown; }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

private:
    int width_;
    int height_;
    Provenance provenance_;
    std::vector<double> values_;
};

// Ground-truth distance function: minimum number of forward steps (over free
// rotation among H headings) until a forward attempt collides, times
// step_size. Wall-adjacent cells are 0. Multi-source BFS over free cells.
DistField ground_truth_df(const GridMap& map, int headings = kHeadings4);

// Row-major CSV, meters; occupied cells "occ", unknown cells "unk".
// `comments` are emitted first as "# ..." lines.
std::string df_to_csv(const DistField& field,
                      const std::vector<std::string>& comments = {});

// 8-bit ASCII PGM (P2): value = clamp(round(255*d/d_max)); occupied and
// unknown render as 0.
std::string df_to_pgm(const DistField& field,
                      const std::vector<std::string>& comments = {});

}  // namespace creplay
