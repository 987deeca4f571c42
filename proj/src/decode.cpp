#include "creplay/decode.hpp"

#include <algorithm>
#include <cmath>

#include "creplay/errors.hpp"

namespace creplay {

void DecodeConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0))
        throw ConfigError("decode eps must be in (0, 1)");
}

DecodeResult eps_decode(std::span<const double> dist, double eps,
                        bool interpolate) {
    if (dist.empty()) throw ConfigError("eps_decode: empty distribution");
    if (!(eps > 0.0 && eps < 1.0))
        throw ConfigError("decode eps must be in (0, 1)");
    double total = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw ConfigError("eps_decode: negative probability");
        total += p;
    }
    if (total <= 0.0) throw ConfigError("eps_decode: all-zero distribution");

    const int k = static_cast<int>(dist.size()) - 1;
    double cdf_prev = 0.0;
    int i = k;
    for (int t = 0; t <= k; ++t) {
        double cdf = cdf_prev + dist[static_cast<std::size_t>(t)];
        if (cdf >= eps) {
            i = t;
            break;
        }
        cdf_prev = cdf;
    }
    if (i == k) return DecodeResult{static_cast<double>(k), true};
    if (!interpolate) return DecodeResult{static_cast<double>(i), false};
    double p_i = dist[static_cast<std::size_t>(i)];
    double v = i - 0.5 + (eps - cdf_prev) / p_i;
    return DecodeResult{std::clamp(v, 0.0, static_cast<double>(k)), false};
}

HeadingField::HeadingField(int width, int height, int headings)
    : width_(width), height_(height), headings_(headings),
      values_(static_cast<std::size_t>(width) * height * headings, kUnknown) {}

DistField HeadingField::slice(int h, const GridMap& map) const {
    DistField field(width_, height_, DistField::Provenance::Decoded);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (map.occupied(x, y)) {
                field.set_occupied(x, y);
            } else if (known(x, y, h)) {
                field.set(x, y, at(x, y, h));
            }
        }
    }
    return field;
}

HeadingField per_heading_map(const HittingTable& table, const DecodeConfig& cfg,
                             const GridMap& map) {
    cfg.validate();
    HeadingField out(map.width(), map.height(), table.headings());
    for (const auto& [key, bins] : table.raw()) {
        if (key.heading < 0 || key.heading >= table.headings()) continue;
        if (!map.in_bounds(key.x, key.y)) continue;
        auto dist = table.query(key);
        if (!dist) continue;
        DecodeResult d = eps_decode(*dist, cfg.eps, cfg.interpolate);
        out.set(key.x, key.y, key.heading, d.steps * map.step_size());
    }
    return out;
}

DistField distance_field(const HittingTable& table, const DecodeConfig& cfg,
                         const GridMap& map) {
    HeadingField per_heading = per_heading_map(table, cfg, map);
    DistField field(map.width(), map.height(), DistField::Provenance::Decoded);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.occupied(x, y)) {
                field.set_occupied(x, y);
                continue;
            }
            double best = -1.0;
            for (int h = 0; h < per_heading.headings(); ++h) {
                if (!per_heading.known(x, y, h)) continue;
                double v = per_heading.at(x, y, h);
                if (best < 0.0 || v < best) best = v;
            }
            if (best >= 0.0) field.set(x, y, best);
        }
    }
    return field;
}

DistField distance_field_from_scalar(const ScalarField& field, const GridMap& map) {
    DistField out(map.width(), map.height(), DistField::Provenance::Decoded);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (map.occupied(x, y)) out.set_occupied(x, y);
    for (const auto& [key, entry] : field.raw()) {
        if (!map.in_bounds(key.x, key.y) || map.occupied(key.x, key.y)) continue;
        double v = entry.value * map.step_size();
        if (!out.known(key.x, key.y) || v < out.meters(key.x, key.y))
            out.set(key.x, key.y, v);
    }
    return out;
}

std::vector<std::uint8_t> floorplan_from_field(const DistField& field) {
    std::vector<std::uint8_t> plan(
        static_cast<std::size_t>(field.width()) * field.height(), 0);
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x)
            plan[field.index(x, y)] = field.known(x, y) ? 1 : 0;
    return plan;
}

std::vector<std::uint8_t> floorplan_from_freespace(const FreespaceModel& model,
                                                   double threshold,
                                                   const GridMap& map) {
    std::vector<std::uint8_t> plan(
        static_cast<std::size_t>(map.width()) * map.height(), 0);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            auto p = model.prob(x, y);
            if (p && *p < threshold) plan[map.index(x, y)] = 1;
        }
    }
    return plan;
}

std::vector<std::uint8_t> true_floorplan(const GridMap& map) {
    std::vector<std::uint8_t> plan(
        static_cast<std::size_t>(map.width()) * map.height(), 0);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            plan[map.index(x, y)] = map.free_cell(x, y) ? 1 : 0;
    return plan;
}

double binary_within_k(std::span<const double> dist, int K) {
    const int k = static_cast<int>(dist.size()) - 1;
    if (K <= 0 || K > k)
        throw ConfigError("binary_within_k: K must be in (0, k]");
    double sum = 0.0;
    for (int t = 0; t < K; ++t) sum += dist[static_cast<std::size_t>(t)];
    return sum;
}

}  // namespace creplay
