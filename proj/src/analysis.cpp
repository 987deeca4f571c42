#include "creplay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "creplay/errors.hpp"

namespace creplay {

namespace {

// 0 log 0 = 0 convention; log base 2 keeps the range [0, 1].
double kl_to_mix(std::span<const double> p, std::span<const double> q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        double m = 0.5 * (p[i] + q[i]);
        sum += p[i] * std::log2(p[i] / m);
    }
    return sum;
}

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw ConfigError("jsd: distribution sizes differ");
    double v = 0.5 * kl_to_mix(p, q) + 0.5 * kl_to_mix(q, p);
    return std::clamp(v, 0.0, 1.0);
}

double jsd_aligned(const AngleProfile& a, const AngleProfile& b) {
    const std::size_t h = a.rows.size();
    if (h == 0 || b.rows.size() != h)
        throw ConfigError("jsd_aligned: heading counts differ");
    for (std::size_t i = 0; i < h; ++i)
        if (a.rows[i].size() != b.rows[0].size() ||
            b.rows[i].size() != b.rows[0].size())
            throw ConfigError("jsd_aligned: bin counts differ");

    double best = 2.0;
    for (std::size_t offset = 0; offset < h; ++offset) {
        double mean = 0.0;
        for (std::size_t alpha = 0; alpha < h; ++alpha)
            mean += jsd(a.rows[alpha], b.rows[(alpha + offset) % h]);
        mean /= static_cast<double>(h);
        best = std::min(best, mean);
    }
    return best;
}

std::optional<AngleProfile> cell_profile(const HittingTable& table, int x, int y,
                                         std::string source) {
    bool any = false;
    for (int h = 0; h < table.headings(); ++h)
        if (table.has_key(CellKey{x, y, h})) any = true;
    if (!any) return std::nullopt;

    AngleProfile profile;
    profile.source = source.empty()
                         ? std::to_string(x) + "," + std::to_string(y)
                         : std::move(source);
    profile.rows.reserve(static_cast<std::size_t>(table.headings()));
    for (int h = 0; h < table.headings(); ++h) {
        auto dist = table.query(CellKey{x, y, h});
        if (!dist) return std::nullopt;  // alpha == 0 and unvisited heading
        profile.rows.push_back(std::move(*dist));
    }
    return profile;
}

std::vector<NnResult> nearest_neighbors(const AngleProfile& query,
                                        std::span<const CorpusEntry> corpus,
                                        std::size_t m, bool one_per_scene) {
    if (corpus.empty()) throw ConfigError("nearest_neighbors: empty corpus");

    std::vector<NnResult> ranked;
    ranked.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        ranked.push_back(NnResult{i, jsd_aligned(query, corpus[i].profile)});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const NnResult& a, const NnResult& b) {
                         return a.dissimilarity < b.dissimilarity;
                     });
    if (one_per_scene) {
        std::unordered_set<std::string> seen;
        std::vector<NnResult> filtered;
        for (const NnResult& r : ranked)
            if (seen.insert(corpus[r.index].map_id).second)
                filtered.push_back(r);
        ranked = std::move(filtered);
    }
    if (ranked.size() > m) ranked.resize(m);
    return ranked;
}

double auroc(std::span<const double> scores,
             std::span<const std::uint8_t> same_class) {
    if (scores.size() != same_class.size())
        throw ConfigError("auroc: scores/labels size mismatch");
    std::size_t n_pos = 0;
    for (std::uint8_t l : same_class)
        if (l) ++n_pos;
    std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetricError("auroc needs both classes present");

    // Average ranks (ascending scores), ties shared.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]])
            ++j;
        double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t t = 0; t < scores.size(); ++t)
        if (same_class[t]) rank_sum_pos += rank[t];
    // Lower dissimilarity should mean same-class: count pairs where the
    // positive ranks below the negative.
    double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                  static_cast<double>(n_pos + 1);
    return 1.0 - u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

const char* to_string(GeometryClass c) {
    switch (c) {
        case GeometryClass::Open: return "open";
        case GeometryClass::WallAdjacent: return "wall-adjacent";
        case GeometryClass::Corridor: return "corridor";
        case GeometryClass::Corner: return "corner";
        case GeometryClass::Unlabeled: return "unlabeled";
        case GeometryClass::Occupied: return "occupied";
    }
    return "?";
}

std::vector<GeometryClass> geometry_labels(const GridMap& map) {
    const DistField df = ground_truth_df(map, kHeadings4);
    std::vector<GeometryClass> labels(
        static_cast<std::size_t>(map.width()) * map.height(),
        GeometryClass::Occupied);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.occupied(x, y)) continue;
            const bool e = map.occupied(x + 1, y);
            const bool w = map.occupied(x - 1, y);
            const bool s = map.occupied(x, y + 1);
            const bool n = map.occupied(x, y - 1);
            const double steps = df.meters(x, y) / map.step_size();
            GeometryClass c;
            if ((e && w) || (n && s))
                c = GeometryClass::Corridor;
            else if ((e || w) && (n || s))
                c = GeometryClass::Corner;
            else if (steps == 0.0)
                c = GeometryClass::WallAdjacent;
            else if (steps >= 2.0)
                c = GeometryClass::Open;
            else
                c = GeometryClass::Unlabeled;
            labels[map.index(x, y)] = c;
        }
    }
    return labels;
}

MetricsReport field_metrics(const DistField& pred, const DistField& truth,
                            double delta,
                            const std::vector<std::uint8_t>* extra_mask) {
    if (pred.width() != truth.width() || pred.height() != truth.height())
        throw ConfigError("field_metrics: grid sizes differ");

    MetricsReport report;
    report.delta = delta;
    double abs_sum = 0.0, sq_sum = 0.0;
    std::size_t within = 0, n = 0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            if (!pred.known(x, y) || !truth.known(x, y)) continue;
            if (extra_mask && !(*extra_mask)[pred.index(x, y)]) continue;
            double err = pred.meters(x, y) - truth.meters(x, y);
            abs_sum += std::abs(err);
            sq_sum += err * err;
            if (std::abs(err) < delta) ++within;
            ++n;
        }
    }
    if (n == 0) throw UndefinedMetricError("field_metrics: empty evaluation mask");
    report.n_cells = n;
    report.mae = abs_sum / static_cast<double>(n);
    report.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    report.pct_within_delta = static_cast<double>(within) / static_cast<double>(n);
    report.iou = mask_iou(floorplan_from_field(pred), floorplan_from_field(truth));
    return report;
}

double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                const std::vector<std::uint8_t>* eval_mask) {
    if (a.size() != b.size()) throw ConfigError("mask_iou: size mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (eval_mask && !(*eval_mask)[i]) continue;
        if (a[i] && b[i]) ++inter;
        if (a[i] || b[i]) ++uni;
    }
    if (uni == 0) throw UndefinedMetricError("mask_iou: empty union");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double binary_f1(std::span<const double> probs, std::span<const std::uint8_t> truth,
                 double threshold) {
    if (probs.size() != truth.size())
        throw ConfigError("binary_f1: size mismatch");
    std::size_t tp = 0, fp = 0, fn = 0, pos = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        bool pred = probs[i] >= threshold;
        if (truth[i]) ++pos;
        if (pred && truth[i]) ++tp;
        else if (pred && !truth[i]) ++fp;
        else if (!pred && truth[i]) ++fn;
    }
    if (pos == 0) throw UndefinedMetricError("binary_f1: no positive truth");
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) /
           (2.0 * static_cast<double>(tp) + static_cast<double>(fp) +
            static_cast<double>(fn));
}

namespace {

// NaN marks a metric a method cannot produce (e.g. distances from the
// free-space classifier); rendered as an empty cell / dash.
std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_col(double v) {
    if (std::isnan(v)) return "       -";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%8.3f", v);
    return buf;
}

}  // namespace

std::string metrics_to_csv(
    std::span<const std::pair<std::string, MetricsReport>> rows,
    const std::vector<std::string>& comments) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    out += "method,mae,rmse,pct_within_delta,iou,n_cells,delta\n";
    for (const auto& [name, r] : rows) {
        out += name + "," + fmt(r.mae) + "," + fmt(r.rmse) + "," +
               fmt(r.pct_within_delta) + "," + fmt(r.iou) + "," +
               std::to_string(r.n_cells) + "," + fmt(r.delta) + "\n";
    }
    return out;
}

std::string metrics_to_text(
    std::span<const std::pair<std::string, MetricsReport>> rows) {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-24s %8s %8s %8s %8s %8s\n", "method",
                  "MAE", "RMSE", "%<d", "IoU", "cells");
    out += buf;
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof(buf), "%-24s ", name.c_str());
        out += buf;
        out += fmt_col(r.mae) + " " + fmt_col(r.rmse) + " " +
               fmt_col(r.pct_within_delta) + " " + fmt_col(r.iou);
        std::snprintf(buf, sizeof(buf), " %8zu\n", r.n_cells);
        out += buf;
    }
    return out;
}

}  // namespace creplay
