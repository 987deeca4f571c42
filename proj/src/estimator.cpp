#include "creplay/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "creplay/errors.hpp"

namespace creplay {

namespace {

bool key_less(const CellKey& a, const CellKey& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.heading < b.heading;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_comments(std::ostream& os, const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
}

// Skips blank and comment lines.
bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        return true;
    }
    return false;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

HittingTable::HittingTable(int k, double alpha, int headings)
    : k_(k), alpha_(alpha), headings_(headings) {
    if (k_ < 1) throw ConfigError("table k must be >= 1");
    if (alpha_ < 0.0) throw ConfigError("smoothing alpha must be >= 0");
    if (!valid_heading_count(headings_))
        throw ConfigError("heading count must be 4 or 8");
}

void HittingTable::add(const CellKey& key, int label, std::uint64_t n) {
    if (label < 0 || label > k_)
        throw ConfigError("sample label " + std::to_string(label) +
                          " out of range for k=" + std::to_string(k_));
    auto& bins = counts_[key];
    if (bins.empty()) bins.assign(static_cast<std::size_t>(k_) + 1, 0);
    bins[static_cast<std::size_t>(label)] += n;
}

bool HittingTable::has_key(const CellKey& key) const {
    return counts_.find(key) != counts_.end();
}

std::uint64_t HittingTable::key_count(const CellKey& key) const {
    auto it = counts_.find(key);
    if (it == counts_.end()) return 0;
    std::uint64_t total = 0;
    for (std::uint64_t c : it->second) total += c;
    return total;
}

const std::vector<std::uint64_t>* HittingTable::counts(const CellKey& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? nullptr : &it->second;
}

std::optional<std::vector<double>> HittingTable::query(const CellKey& key) const {
    const std::size_t bins = static_cast<std::size_t>(k_) + 1;
    auto it = counts_.find(key);
    std::uint64_t total = 0;
    if (it != counts_.end())
        for (std::uint64_t c : it->second) total += c;
    if (total == 0 && alpha_ == 0.0) return std::nullopt;

    std::vector<double> dist(bins);
    const double denom = static_cast<double>(total) + bins * alpha_;
    for (std::size_t t = 0; t < bins; ++t) {
        double c = it != counts_.end() ? static_cast<double>(it->second[t]) : 0.0;
        dist[t] = (c + alpha_) / denom;
    }
    return dist;
}

std::vector<CellKey> HittingTable::sorted_keys() const {
    std::vector<CellKey> keys;
    keys.reserve(counts_.size());
    for (const auto& [k, v] : counts_) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), key_less);
    return keys;
}

HittingTable fit_table(std::span<const ReplaySample> samples, int k, double alpha,
                       int headings) {
    HittingTable table(k, alpha, headings);
    for (const ReplaySample& s : samples)
        table.add(CellKey{s.x, s.y, s.heading}, s.label);
    return table;
}

HittingTable merge(const HittingTable& a, const HittingTable& b) {
    if (a.k() != b.k() || a.alpha() != b.alpha() || a.headings() != b.headings())
        throw ConfigError("cannot merge tables with different (k, alpha, headings)");
    HittingTable out = a;
    for (const auto& [key, bins] : b.raw())
        for (std::size_t t = 0; t < bins.size(); ++t)
            if (bins[t]) out.add(key, static_cast<int>(t), bins[t]);
    return out;
}

void write_table_csv(std::ostream& os, const HittingTable& table,
                     const std::vector<std::string>& comments) {
    os << "# creplay-table v1\n";
    write_comments(os, comments);
    os << "k,alpha,headings\n"
       << table.k() << ',' << fmt_double(table.alpha()) << ',' << table.headings()
       << "\n";
    os << "x,y,heading";
    for (int t = 0; t <= table.k(); ++t) os << ",c" << t;
    os << "\n";
    for (const CellKey& key : table.sorted_keys()) {
        const auto* bins = table.counts(key);
        os << key.x << ',' << key.y << ',' << key.heading;
        for (std::uint64_t c : *bins) os << ',' << c;
        os << "\n";
    }
}

HittingTable read_table_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line)) throw ParseError("empty table file", 1, 1);
    if (line != "k,alpha,headings") throw ParseError("bad table header", 1, 1);
    if (!next_data_line(is, line)) throw ParseError("missing table params", 2, 1);
    auto params = split_csv(line);
    if (params.size() != 3) throw ParseError("bad table params", 2, 1);
    HittingTable table(std::stoi(params[0]), std::stod(params[1]),
                       std::stoi(params[2]));
    if (!next_data_line(is, line)) throw ParseError("missing column header", 3, 1);
    int lineno = 3;
    while (next_data_line(is, line)) {
        ++lineno;
        auto f = split_csv(line);
        if (f.size() != static_cast<std::size_t>(table.k()) + 4)
            throw ParseError("bad table row", lineno, 1);
        CellKey key{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2])};
        for (int t = 0; t <= table.k(); ++t) {
            std::uint64_t c = std::stoull(f[static_cast<std::size_t>(t) + 3]);
            if (c) table.add(key, t, c);
        }
    }
    return table;
}

std::optional<ScalarField::Entry> ScalarField::at(const CellKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ScalarField::set(const CellKey& key, double value, std::uint64_t count) {
    entries_[key] = Entry{value, count};
}

std::vector<CellKey> ScalarField::sorted_keys() const {
    std::vector<CellKey> keys;
    keys.reserve(entries_.size());
    for (const auto& [k, v] : entries_) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), key_less);
    return keys;
}

namespace {

CellKey sample_key(const ReplaySample& s, Keying keying) {
    return keying == Keying::PerCell ? CellKey{s.x, s.y, -1}
                                     : CellKey{s.x, s.y, s.heading};
}

}  // namespace

ScalarField fit_mean(std::span<const ReplaySample> samples, Keying keying) {
    std::unordered_map<CellKey, std::pair<double, std::uint64_t>, CellKeyHash> acc;
    for (const ReplaySample& s : samples) {
        auto& [sum, n] = acc[sample_key(s, keying)];
        sum += s.label;
        ++n;
    }
    ScalarField field(keying);
    for (const auto& [key, sn] : acc)
        field.set(key, sn.first / static_cast<double>(sn.second), sn.second);
    return field;
}

ScalarField fit_median(std::span<const ReplaySample> samples, Keying keying) {
    std::unordered_map<CellKey, std::vector<int>, CellKeyHash> acc;
    for (const ReplaySample& s : samples)
        acc[sample_key(s, keying)].push_back(s.label);
    ScalarField field(keying);
    for (auto& [key, labels] : acc) {
        std::size_t mid = (labels.size() - 1) / 2;  // lower median
        std::nth_element(labels.begin(), labels.begin() + mid, labels.end());
        field.set(key, static_cast<double>(labels[mid]), labels.size());
    }
    return field;
}

void write_scalar_csv(std::ostream& os, const ScalarField& field,
                      const std::vector<std::string>& comments) {
    os << "# creplay-scalar v1\n";
    write_comments(os, comments);
    os << "keying\n"
       << (field.keying() == Keying::PerCell ? "per-cell" : "per-cell-heading")
       << "\n";
    os << "x,y,heading,value,count\n";
    for (const CellKey& key : field.sorted_keys()) {
        auto e = field.at(key);
        os << key.x << ',' << key.y << ',' << key.heading << ','
           << fmt_double(e->value) << ',' << e->count << "\n";
    }
}

ScalarField read_scalar_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line) || line != "keying")
        throw ParseError("bad scalar field header", 1, 1);
    if (!next_data_line(is, line)) throw ParseError("missing keying", 2, 1);
    Keying keying;
    if (line == "per-cell")
        keying = Keying::PerCell;
    else if (line == "per-cell-heading")
        keying = Keying::PerCellHeading;
    else
        throw ParseError("unknown keying: " + line, 2, 1);
    ScalarField field(keying);
    if (!next_data_line(is, line)) throw ParseError("missing column header", 3, 1);
    int lineno = 3;
    while (next_data_line(is, line)) {
        ++lineno;
        auto f = split_csv(line);
        if (f.size() != 5) throw ParseError("bad scalar row", lineno, 1);
        field.set(CellKey{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2])},
                  std::stod(f[3]), std::stoull(f[4]));
    }
    return field;
}

void FreespaceModel::add_visit(int x, int y, bool collided) {
    auto& e = entries_[CellKey{x, y, -1}];
    ++e.visits;
    if (collided) ++e.collisions;
}

std::optional<double> FreespaceModel::prob(int x, int y) const {
    auto it = entries_.find(CellKey{x, y, -1});
    if (it == entries_.end()) return std::nullopt;
    return static_cast<double>(it->second.collisions) /
           static_cast<double>(it->second.visits);
}

std::uint64_t FreespaceModel::visits(int x, int y) const {
    auto it = entries_.find(CellKey{x, y, -1});
    return it == entries_.end() ? 0 : it->second.visits;
}

std::vector<CellKey> FreespaceModel::sorted_keys() const {
    std::vector<CellKey> keys;
    keys.reserve(entries_.size());
    for (const auto& [k, v] : entries_) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), key_less);
    return keys;
}

FreespaceModel fit_freespace(std::span<const Trajectory> walks) {
    FreespaceModel model;
    for (const Trajectory& traj : walks)
        for (const StepRecord& s : traj.steps)
            model.add_visit(s.pose.x, s.pose.y, s.collided);
    return model;
}

void write_freespace_csv(std::ostream& os, const FreespaceModel& model,
                         const std::vector<std::string>& comments) {
    os << "# creplay-freespace v1\n";
    write_comments(os, comments);
    os << "x,y,visits,collisions\n";
    for (const CellKey& key : model.sorted_keys()) {
        const auto& e = model.raw().at(key);
        os << key.x << ',' << key.y << ',' << e.visits << ',' << e.collisions
           << "\n";
    }
}

FreespaceModel read_freespace_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line) || line != "x,y,visits,collisions")
        throw ParseError("bad freespace header", 1, 1);
    FreespaceModel model;
    int lineno = 1;
    while (next_data_line(is, line)) {
        ++lineno;
        auto f = split_csv(line);
        if (f.size() != 4) throw ParseError("bad freespace row", lineno, 1);
        CellKey key{std::stoi(f[0]), std::stoi(f[1]), -1};
        std::uint64_t visits = std::stoull(f[2]);
        std::uint64_t collisions = std::stoull(f[3]);
        for (std::uint64_t i = 0; i < visits; ++i)
            model.add_visit(key.x, key.y, i < collisions);
    }
    return model;
}

void ScanConfig::validate() const {
    if (beams < 1) throw ConfigError("scan beams must be >= 1");
    if (quant < 2) throw ConfigError("scan quantization must be >= 2");
    if (range_max < 1) throw ConfigError("scan range_max must be >= 1");
}

ScanSignature scan_signature(const GridMap& map, const Pose& pose,
                             const ScanConfig& cfg, int headings) {
    cfg.validate();
    ScanSignature sig(static_cast<std::size_t>(cfg.beams));
    const int half = cfg.beams / 2;
    for (int b = 0; b < cfg.beams; ++b) {
        int h = wrap_heading(pose.heading + (b - half), headings);
        auto [dx, dy] = heading_dir(h, headings);
        int range = cfg.range_max;
        for (int t = 1; t <= cfg.range_max; ++t) {
            if (map.occupied(pose.x + t * dx, pose.y + t * dy)) {
                range = t;
                break;
            }
        }
        int q = (range - 1) * cfg.quant / cfg.range_max;
        sig[static_cast<std::size_t>(b)] =
            static_cast<std::uint8_t>(std::min(q, cfg.quant - 1));
    }
    return sig;
}

EgoModel::EgoModel(int k, double alpha, ScanConfig scan)
    : k_(k), alpha_(alpha), scan_(scan) {
    if (k_ < 1) throw ConfigError("ego model k must be >= 1");
    if (alpha_ < 0.0) throw ConfigError("smoothing alpha must be >= 0");
    scan_.validate();
}

void EgoModel::add(const Key& key, int label, std::uint64_t n) {
    if (label < 0 || label > k_)
        throw ConfigError("sample label out of range for k=" + std::to_string(k_));
    std::size_t i;
    auto it = index_.find(key);
    if (it == index_.end()) {
        i = keys_.size();
        keys_.push_back(key);
        counts_.emplace_back(static_cast<std::size_t>(k_) + 1, 0);
        totals_.push_back(0);
        index_.emplace(key, i);
    } else {
        i = it->second;
    }
    counts_[i][static_cast<std::size_t>(label)] += n;
    totals_[i] += n;
}

namespace {

int sig_l1(const ScanSignature& a, const ScanSignature& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
        d += std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i]));
    return d;
}

bool key_lex_less(const EgoModel::Key& a, const EgoModel::Key& b) {
    if (a.signature != b.signature) return a.signature < b.signature;
    return static_cast<int>(a.action) < static_cast<int>(b.action);
}

}  // namespace

EgoModel::QueryResult EgoModel::query(const Key& key) const {
    if (keys_.empty()) throw std::runtime_error("query on empty egocentric model");

    std::size_t best;
    bool exact = false;
    auto it = index_.find(key);
    if (it != index_.end()) {
        best = it->second;
        exact = true;
    } else {
        best = 0;
        int best_d = sig_l1(keys_[0].signature, key.signature);
        for (std::size_t i = 1; i < keys_.size(); ++i) {
            int d = sig_l1(keys_[i].signature, key.signature);
            bool better;
            if (d != best_d)
                better = d < best_d;
            else if (totals_[i] != totals_[best])
                better = totals_[i] > totals_[best];
            else
                better = key_lex_less(keys_[i], keys_[best]);
            if (better) {
                best = i;
                best_d = d;
            }
        }
    }

    const auto& bins = counts_[best];
    const std::size_t nbins = bins.size();
    std::vector<double> dist(nbins);
    const double denom = static_cast<double>(totals_[best]) + nbins * alpha_;
    for (std::size_t t = 0; t < nbins; ++t)
        dist[t] = (static_cast<double>(bins[t]) + alpha_) / denom;
    return QueryResult{std::move(dist), keys_[best], exact};
}

EgoModel fit_egocentric(const GridMap& map, std::span<const ReplaySample> samples,
                        const ScanConfig& scan, int k, double alpha, int headings) {
    EgoModel model(k, alpha, scan);
    for (const ReplaySample& s : samples) {
        if (s.flag != SampleFlag::None) continue;
        ScanSignature sig =
            scan_signature(map, Pose{s.x, s.y, s.heading}, scan, headings);
        model.add(EgoModel::Key{std::move(sig), s.action}, s.label);
    }
    return model;
}

}  // namespace creplay
