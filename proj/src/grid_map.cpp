#include "creplay/grid_map.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <queue>

#include "creplay/rng.hpp"

namespace creplay {

namespace {

constexpr std::array<std::pair<int, int>, 4> kDirs4 = {
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
constexpr std::array<std::pair<int, int>, 8> kDirs8 = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

}  // namespace

bool valid_heading_count(int headings) {
    return headings == kHeadings4 || headings == kHeadings8;
}

std::pair<int, int> heading_dir(int h, int headings) {
    h = wrap_heading(h, headings);
    return headings == kHeadings4 ? kDirs4[h] : kDirs8[h];
}

GridMap::GridMap(int width, int height, std::vector<std::uint8_t> occupancy,
                 double step_size, std::string id)
    : width_(width), height_(height), step_size_(step_size),
      occ_(std::move(occupancy)), free_count_(0), id_(std::move(id)) {
    if (width_ < 3 || height_ < 3)
        throw MapError("map must be at least 3x3");
    if (occ_.size() != static_cast<std::size_t>(width_) * height_)
        throw MapError("occupancy size does not match dimensions");
    if (step_size_ <= 0.0)
        throw MapError("step_size must be positive");
    for (int x = 0; x < width_; ++x) {
        if (!occ_[index(x, 0)] || !occ_[index(x, height_ - 1)])
            throw MapError("map border must be fully occupied");
    }
    for (int y = 0; y < height_; ++y) {
        if (!occ_[index(0, y)] || !occ_[index(width_ - 1, y)])
            throw MapError("map border must be fully occupied");
    }
    for (std::uint8_t v : occ_)
        if (!v) ++free_count_;
    if (free_count_ == 0)
        throw MapError("map has no free cells");
}

std::vector<std::pair<int, int>> GridMap::free_cells() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(free_count_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (!occ_[index(x, y)]) out.emplace_back(x, y);
    return out;
}

GridMap load_map(const std::string& text, double step_size, std::string id) {
    std::vector<std::string> rows;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            rows.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) rows.push_back(cur);
    while (!rows.empty() && rows.back().empty()) rows.pop_back();

    if (rows.empty()) throw ParseError("empty map", 1, 1);
    const std::size_t w = rows[0].size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != w) {
            throw ParseError("ragged row: expected " + std::to_string(w) +
                                 " columns, got " + std::to_string(rows[r].size()),
                             static_cast<int>(r + 1),
                             static_cast<int>(rows[r].size() + 1));
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            char ch = rows[r][c];
            if (ch != '#' && ch != '.') {
                throw ParseError(std::string("illegal character '") + ch + "'",
                                 static_cast<int>(r + 1), static_cast<int>(c + 1));
            }
        }
    }
    const int width = static_cast<int>(w);
    const int height = static_cast<int>(rows.size());
    for (int x = 0; x < width; ++x) {
        if (rows[0][x] != '#') throw ParseError("unenclosed border", 1, x + 1);
        if (rows[height - 1][x] != '#')
            throw ParseError("unenclosed border", height, x + 1);
    }
    for (int y = 0; y < height; ++y) {
        if (rows[y][0] != '#') throw ParseError("unenclosed border", y + 1, 1);
        if (rows[y][width - 1] != '#')
            throw ParseError("unenclosed border", y + 1, width);
    }
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(width) * height, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            occ[static_cast<std::size_t>(y) * width + x] = rows[y][x] == '#';
    return GridMap(width, height, std::move(occ), step_size, std::move(id));
}

std::string save_map(const GridMap& map) {
    std::string out;
    out.reserve(static_cast<std::size_t>(map.height()) * (map.width() + 1));
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x)
            out.push_back(map.occupied(x, y) ? '#' : '.');
        out.push_back('\n');
    }
    return out;
}

const char* to_string(MapKind kind) {
    switch (kind) {
        case MapKind::Rooms: return "rooms";
        case MapKind::Corridors: return "corridors";
        case MapKind::RandomObstacles: return "random-obstacles";
    }
    return "?";
}

MapKind map_kind_from_string(const std::string& s) {
    if (s == "rooms") return MapKind::Rooms;
    if (s == "corridors") return MapKind::Corridors;
    if (s == "random-obstacles") return MapKind::RandomObstacles;
    throw ConfigError("unknown map kind: " + s);
}

namespace {

using Occ = std::vector<std::uint8_t>;

std::size_t idx(int x, int y, int w) {
    return static_cast<std::size_t>(y) * w + x;
}

// Connected components of free cells, 4-connectivity. Returns component id
// per cell (-1 for occupied) and component sizes.
std::pair<std::vector<int>, std::vector<std::size_t>> components(const Occ& occ,
                                                                 int w, int h) {
    std::vector<int> comp(occ.size(), -1);
    std::vector<std::size_t> sizes;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (occ[idx(x, y, w)] || comp[idx(x, y, w)] >= 0) continue;
            int id = static_cast<int>(sizes.size());
            std::size_t size = 0;
            std::queue<std::pair<int, int>> q;
            q.emplace(x, y);
            comp[idx(x, y, w)] = id;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                ++size;
                for (auto [dx, dy] : kDirs4) {
                    int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    std::size_t ni = idx(nx, ny, w);
                    if (occ[ni] || comp[ni] >= 0) continue;
                    comp[ni] = id;
                    q.emplace(nx, ny);
                }
            }
            sizes.push_back(size);
        }
    }
    return {std::move(comp), std::move(sizes)};
}

// Carve L-shaped free paths until all free cells are mutually reachable.
// Only interior cells are ever carved.
void carve_connected(Occ& occ, int w, int h) {
    for (;;) {
        auto [comp, sizes] = components(occ, w, h);
        if (sizes.size() <= 1) return;
        int largest = static_cast<int>(
            std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        // Closest pair between the largest component and any other.
        long best = -1;
        int ax = 0, ay = 0, bx = 0, by = 0;
        for (int y1 = 1; y1 < h - 1; ++y1)
            for (int x1 = 1; x1 < w - 1; ++x1) {
                if (comp[idx(x1, y1, w)] != largest) continue;
                for (int y2 = 1; y2 < h - 1; ++y2)
                    for (int x2 = 1; x2 < w - 1; ++x2) {
                        int c = comp[idx(x2, y2, w)];
                        if (c < 0 || c == largest) continue;
                        long d = std::abs(x1 - x2) + std::abs(y1 - y2);
                        if (best < 0 || d < best) {
                            best = d;
                            ax = x1; ay = y1; bx = x2; by = y2;
                        }
                    }
            }
        for (int x = std::min(ax, bx); x <= std::max(ax, bx); ++x)
            occ[idx(x, ay, w)] = 0;
        for (int y = std::min(ay, by); y <= std::max(ay, by); ++y)
            occ[idx(bx, y, w)] = 0;
    }
}

Occ walled(int w, int h) {
    Occ occ(static_cast<std::size_t>(w) * h, 0);
    for (int x = 0; x < w; ++x) occ[idx(x, 0, w)] = occ[idx(x, h - 1, w)] = 1;
    for (int y = 0; y < h; ++y) occ[idx(0, y, w)] = occ[idx(w - 1, y, w)] = 1;
    return occ;
}

void sprinkle(Occ& occ, int w, int h, double density, Rng& rng) {
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            if (uniform01(rng) < density) occ[idx(x, y, w)] = 1;
}

// Recursive wall splits with door gaps.
void split_rooms(Occ& occ, int w, int x0, int y0, int x1, int y1, int min_side,
                 Rng& rng) {
    int rw = x1 - x0 + 1, rh = y1 - y0 + 1;
    if (rw < 2 * min_side + 1 && rh < 2 * min_side + 1) return;
    bool vertical = rw >= rh;
    if (vertical && rw < 2 * min_side + 1) vertical = false;
    if (!vertical && rh < 2 * min_side + 1) vertical = true;
    if (vertical) {
        int wx = x0 + min_side +
                 static_cast<int>(uniform_below(rng, rw - 2 * min_side));
        int door = y0 + static_cast<int>(uniform_below(rng, rh));
        for (int y = y0; y <= y1; ++y)
            if (y != door) occ[idx(wx, y, w)] = 1;
        split_rooms(occ, w, x0, y0, wx - 1, y1, min_side, rng);
        split_rooms(occ, w, wx + 1, y0, x1, y1, min_side, rng);
    } else {
        int wy = y0 + min_side +
                 static_cast<int>(uniform_below(rng, rh - 2 * min_side));
        int door = x0 + static_cast<int>(uniform_below(rng, rw));
        for (int x = x0; x <= x1; ++x)
            if (x != door) occ[idx(x, wy, w)] = 1;
        split_rooms(occ, w, x0, y0, x1, wy - 1, min_side, rng);
        split_rooms(occ, w, x0, wy + 1, x1, y1, min_side, rng);
    }
}

// Maze on the odd lattice (recursive backtracker); density removes extra
// walls afterwards to open loops.
Occ gen_corridors(int w, int h, double density, Rng& rng) {
    Occ occ(static_cast<std::size_t>(w) * h, 1);
    auto cellx = [&](int cx) { return 1 + 2 * cx; };
    auto celly = [&](int cy) { return 1 + 2 * cy; };
    int cw = (w - 1) / 2, ch = (h - 1) / 2;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(cw) * ch, 0);
    std::vector<std::pair<int, int>> stack;
    stack.emplace_back(0, 0);
    seen[0] = 1;
    occ[idx(cellx(0), celly(0), w)] = 0;
    while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        std::array<int, 4> order = {0, 1, 2, 3};
        for (int i = 3; i > 0; --i)
            std::swap(order[i], order[uniform_below(rng, i + 1)]);
        bool advanced = false;
        for (int d : order) {
            auto [dx, dy] = kDirs4[d];
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= cw || ny < 0 || ny >= ch) continue;
            if (seen[idx(nx, ny, cw)]) continue;
            seen[idx(nx, ny, cw)] = 1;
            occ[idx(cellx(cx) + dx, celly(cy) + dy, w)] = 0;
            occ[idx(cellx(nx), celly(ny), w)] = 0;
            stack.emplace_back(nx, ny);
            advanced = true;
            break;
        }
        if (!advanced) stack.pop_back();
    }
    // Open extra interior walls proportional to density.
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            if (occ[idx(x, y, w)] && uniform01(rng) < density)
                occ[idx(x, y, w)] = 0;
    return occ;
}

}  // namespace

GridMap generate_map(MapKind kind, std::uint64_t seed, int w, int h,
                     double density, double step_size) {
    if (w < 8 || h < 8)
        throw GenerationError("generated maps must be at least 8x8");
    if (density < 0.0 || density >= 0.5)
        throw GenerationError("density must be in [0, 0.5)");

    const int max_attempts = 8;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Rng rng = make_rng(derive_seed(seed, 0xC0FFEEu + attempt));
        Occ occ;
        switch (kind) {
            case MapKind::RandomObstacles: {
                occ = walled(w, h);
                sprinkle(occ, w, h, density, rng);
                break;
            }
            case MapKind::Rooms: {
                occ = walled(w, h);
                split_rooms(occ, w, 1, 1, w - 2, h - 2, 3, rng);
                if (density > 0.0) sprinkle(occ, w, h, density * 0.5, rng);
                break;
            }
            case MapKind::Corridors: {
                occ = gen_corridors(w, h, density, rng);
                break;
            }
        }
        carve_connected(occ, w, h);
        std::size_t free = 0;
        for (std::uint8_t v : occ)
            if (!v) ++free;
        if (free == 0) continue;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s-s%llu-%dx%d-d%g", to_string(kind),
                      static_cast<unsigned long long>(seed), w, h, density);
        return GridMap(w, h, std::move(occ), step_size, buf);
    }
    throw GenerationError("could not generate a connected map for the given parameters");
}

}  // namespace creplay
