#include "creplay/dist_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace creplay {

DistField::DistField(int width, int height, Provenance provenance)
    : width_(width), height_(height), provenance_(provenance),
      values_(static_cast<std::size_t>(width) * height, kUnknown) {}

DistField ground_truth_df(const GridMap& map, int headings) {
    if (!valid_heading_count(headings))
        throw MapError("heading count must be 4 or 8");
    if (map.free_count() == 0) throw MapError("map has no free cells");

    DistField field(map.width(), map.height(), DistField::Provenance::GroundTruth);
    std::vector<int> steps(static_cast<std::size_t>(map.width()) * map.height(), -1);
    std::queue<std::pair<int, int>> q;

    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.occupied(x, y)) {
                field.set_occupied(x, y);
                continue;
            }
            for (int h = 0; h < headings; ++h) {
                auto [dx, dy] = heading_dir(h, headings);
                if (map.occupied(x + dx, y + dy)) {
                    steps[map.index(x, y)] = 0;
                    q.emplace(x, y);
                    break;
                }
            }
        }
    }
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        int d = steps[map.index(x, y)];
        for (int h = 0; h < headings; ++h) {
            auto [dx, dy] = heading_dir(h, headings);
            int nx = x + dx, ny = y + dy;
            if (map.occupied(nx, ny)) continue;
            if (steps[map.index(nx, ny)] >= 0) continue;
            steps[map.index(nx, ny)] = d + 1;
            q.emplace(nx, ny);
        }
    }
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (map.free_cell(x, y))
                field.set(x, y, steps[map.index(x, y)] * map.step_size());
    return field;
}

namespace {

std::string comment_block(const std::vector<std::string>& comments) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    return out;
}

}  // namespace

std::string df_to_csv(const DistField& field,
                      const std::vector<std::string>& comments) {
    std::string out = comment_block(comments);
    char buf[64];
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            if (x) out.push_back(',');
            if (field.known(x, y)) {
                std::snprintf(buf, sizeof(buf), "%.6f", field.meters(x, y));
                out += buf;
            } else if (field.occupied_mark(x, y)) {
                out += "occ";
            } else {
                out += "unk";
            }
        }
        out.push_back('\n');
    }
    return out;
}

std::string df_to_pgm(const DistField& field,
                      const std::vector<std::string>& comments) {
    double d_max = 0.0;
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x)
            if (field.known(x, y)) d_max = std::max(d_max, field.meters(x, y));

    std::string out = "P2\n";
    out += comment_block(comments);
    out += std::to_string(field.width()) + " " + std::to_string(field.height()) +
           "\n255\n";
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            int v = 0;
            if (field.known(x, y) && d_max > 0.0) {
                v = static_cast<int>(std::lround(255.0 * field.meters(x, y) / d_max));
                v = std::clamp(v, 0, 255);
            }
            if (x) out.push_back(' ');
            out += std::to_string(v);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace creplay
