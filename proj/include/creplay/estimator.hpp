#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "creplay/replay.hpp"

namespace creplay {

// Table key: heading < 0 means "per cell" (heading-agnostic models).
struct CellKey {
    int x = 0;
    int y = 0;
    int heading = -1;

    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t v = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.x)) << 34) ^
                          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.y)) << 4) ^
                          static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.heading + 1));
        v ^= v >> 33;
        v *= 0xff51afd7ed558ccdull;
        v ^= v >> 33;
        return static_cast<std::size_t>(v);
    }
};

// Per-(cell, heading) multinomial counts over labels {0..k-1, k+}. Queries
// apply additive smoothing alpha, so every bin stays positive when alpha > 0.
class HittingTable {
public:
    HittingTable(int k, double alpha, int headings);

    int k() const { return k_; }
    double alpha() const { return alpha_; }
    int headings() const { return headings_; }

    void add(const CellKey& key, int label, std::uint64_t n = 1);

    bool has_key(const CellKey& key) const;
    std::uint64_t key_count(const CellKey& key) const;
    const std::vector<std::uint64_t>* counts(const CellKey& key) const;

    // Smoothed distribution (count_t + alpha) / (total + (k+1) alpha). For an
    // unvisited key this is uniform when alpha > 0 and nullopt when alpha == 0.
    std::optional<std::vector<double>> query(const CellKey& key) const;

    // Deterministic iteration order: sorted by (y, x, heading).
    std::vector<CellKey> sorted_keys() const;

    std::size_t size() const { return counts_.size(); }

    using Map = std::unordered_map<CellKey, std::vector<std::uint64_t>, CellKeyHash>;
    const Map& raw() const { return counts_; }

private:
    int k_;
    double alpha_;
    int headings_;
    Map counts_;
};

// Count/normalize fit; the exact tabular minimizer of the multinomial NLL.
// Rejects samples whose label exceeds k.
HittingTable fit_table(std::span<const ReplaySample> samples, int k, double alpha,
                       int headings);

// Adds counts; associative and commutative, merge(fit(A), fit(B)) == fit(A+B).
// Rejects mismatched (k, alpha, headings).
HittingTable merge(const HittingTable& a, const HittingTable& b);

// Versioned CSV serialization; round-trips exactly.
void write_table_csv(std::ostream& os, const HittingTable& table,
                     const std::vector<std::string>& comments = {});
HittingTable read_table_csv(std::istream& is);

enum class Keying : std::uint8_t { PerCell, PerCellHeading };

// Scalar prediction (mean or median steps) per key, with sample counts.
// Defined only where count > 0.
class ScalarField {
public:
    struct Entry {
        double value = 0.0;
        std::uint64_t count = 0;
    };

    explicit ScalarField(Keying keying) : keying_(keying) {}

    Keying keying() const { return keying_; }
    std::optional<Entry> at(const CellKey& key) const;
    void set(const CellKey& key, double value, std::uint64_t count);
    std::vector<CellKey> sorted_keys() const;

    using Map = std::unordered_map<CellKey, Entry, CellKeyHash>;
    const Map& raw() const { return entries_; }

private:
    Keying keying_;
    Map entries_;
};

// Sample mean / lower sample median of (clamped) labels per key.
ScalarField fit_mean(std::span<const ReplaySample> samples, Keying keying);
ScalarField fit_median(std::span<const ReplaySample> samples, Keying keying);

void write_scalar_csv(std::ostream& os, const ScalarField& field,
                      const std::vector<std::string>& comments = {});
ScalarField read_scalar_csv(std::istream& is);

// Per-cell collision probability: fraction of visits whose step collided.
class FreespaceModel {
public:
    struct Entry {
        std::uint64_t visits = 0;
        std::uint64_t collisions = 0;
    };

    void add_visit(int x, int y, bool collided);
    std::optional<double> prob(int x, int y) const;
    std::uint64_t visits(int x, int y) const;
    std::vector<CellKey> sorted_keys() const;

    using Map = std::unordered_map<CellKey, Entry, CellKeyHash>;
    const Map& raw() const { return entries_; }

private:
    Map entries_;
};

FreespaceModel fit_freespace(std::span<const Trajectory> walks);

void write_freespace_csv(std::ostream& os, const FreespaceModel& model,
                         const std::vector<std::string>& comments = {});
FreespaceModel read_freespace_csv(std::istream& is);

// Quantized range readings from B beams at fixed heading offsets centered on
// the pose heading. Stands in for an egocentric observation.
using ScanSignature = std::vector<std::uint8_t>;

struct ScanConfig {
    int beams = 5;      // offsets -(beams/2) .. +(beams/2)
    int quant = 8;      // quantization levels
    int range_max = 16; // cells

    void validate() const;
};

ScanSignature scan_signature(const GridMap& map, const Pose& pose,
                             const ScanConfig& cfg, int headings);

// Egocentric conditional table keyed by (signature, next action), with
// nearest-neighbor fallback by L1 distance over quantized beams.
class EgoModel {
public:
    struct Key {
        ScanSignature signature;
        Action action = Action::Forward;

        bool operator==(const Key&) const = default;
    };

    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = 1469598103934665603ull;
            for (std::uint8_t b : k.signature) h = (h ^ b) * 1099511628211ull;
            h = (h ^ static_cast<std::uint8_t>(k.action)) * 1099511628211ull;
            return static_cast<std::size_t>(h);
        }
    };

    EgoModel(int k, double alpha, ScanConfig scan);

    int k() const { return k_; }
    double alpha() const { return alpha_; }
    const ScanConfig& scan() const { return scan_; }
    std::size_t size() const { return keys_.size(); }

    void add(const Key& key, int label, std::uint64_t n = 1);

    struct QueryResult {
        std::vector<double> dist;
        Key matched;
        bool exact = false;
    };
    // Exact lookup, else nearest stored signature (same action preferred);
    // ties broken by larger sample count, then lexicographic key.
    QueryResult query(const Key& key) const;

private:
    int k_;
    double alpha_;
    ScanConfig scan_;
    std::vector<Key> keys_;
    std::vector<std::vector<std::uint64_t>> counts_;
    std::vector<std::uint64_t> totals_;
    std::unordered_map<Key, std::size_t, KeyHash> index_;
};

// Signatures are computed at each sample's pose on `map`; conditioning action
// is the sample's intended action.
EgoModel fit_egocentric(const GridMap& map, std::span<const ReplaySample> samples,
                        const ScanConfig& scan, int k, double alpha, int headings);

}  // namespace creplay
