#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "creplay/errors.hpp"

namespace creplay {

// Heading convention (screen coordinates, +y down):
//   H=4: 0=E 1=S 2=W 3=N          (+1 heading = turn right)
//   H=8: 0=E 1=SE 2=S 3=SW 4=W 5=NW 6=N 7=NE
// TurnLeft is -1 heading, TurnRight +1, TurnAround -H/2.
inline constexpr int kHeadings4 = 4;
inline constexpr int kHeadings8 = 8;

bool valid_heading_count(int headings);

// (dx,dy) of one forward step along heading h out of H.
std::pair<int, int> heading_dir(int h, int headings);

inline int wrap_heading(int h, int headings) {
    int m = h % headings;
    return m < 0 ? m + headings : m;
}

// Occupancy grid. Enclosed world: the outer border is always occupied.
// Immutable after construction; safe to share across threads.
class GridMap {
public:
    // Throws MapError unless: width,height >= 3, border fully occupied,
    // at least one free cell, step_size > 0. `occupancy` is row-major,
    // nonzero = occupied.
    GridMap(int width, int height, std::vector<std::uint8_t> occupancy,
            double step_size = 0.25, std::string id = "map");

    int width() const { return width_; }
    int height() const { return height_; }
    double step_size() const { return step_size_; }
    const std::string& id() const { return id_; }
    void set_id(std::string id) { id_ = std::move(id); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    // Off-map counts as occupied.
    bool occupied(int x, int y) const {
        return !in_bounds(x, y) || occ_[index(x, y)] != 0;
    }
    bool free_cell(int x, int y) const { return !occupied(x, y); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    std::size_t free_count() const { return free_count_; }
    // Row-major list of free cells; the canonical enumeration order.
    std::vector<std::pair<int, int>> free_cells() const;

private:
    int width_;
    int height_;
    double step_size_;
    std::vector<std::uint8_t> occ_;
    std::size_t free_count_;
    std::string id_;
};

// ASCII map format: '#' occupied, '.' free, one row per line, rectangular.
// Throws ParseError (ragged rows, illegal characters, unenclosed border).
GridMap load_map(const std::string& text, double step_size = 0.25,
                 std::string id = "map");
// Inverse of load_map up to newline normalization: save(load(t)) == normalize(t).
std::string save_map(const GridMap& map);

enum class MapKind : std::uint8_t { Rooms, Corridors, RandomObstacles };
const char* to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& s);

// Deterministic in (kind, seed, w, h, density). All free cells are mutually
// 4-connected; connectivity is enforced by carving. Requires w,h >= 8 and
// 0 <= density < 0.5. Throws GenerationError if no valid map can be produced.
GridMap generate_map(MapKind kind, std::uint64_t seed, int w, int h,
                     double density, double step_size = 0.25);

}  // namespace creplay
