#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fidsta/dims.hpp"
#include "fidsta/estimator.hpp"
#include "fidsta/simulator.hpp"

namespace fidsta {

enum class RawFormat { BitstringCounts, ShotList };

// One parsed measurement file: aggregated (bitstring, count) pairs in
// first-seen order. Counts are the authority; probabilities are derived later.
struct RawShotFile {
    RawFormat format = RawFormat::BitstringCounts;
    std::string circuit_id;
    int n_qubits = 0;
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    std::uint64_t total_shots = 0;
};

// Grammar: optional '#' comments, one mandatory header comment
// "# n_qubits=<N> circuit=<id>" before any data, then either
// "<bitstring>,<count>" lines (BitstringCounts) or bare bitstring lines
// (ShotList). Malformed input throws parse_error naming the line.
RawShotFile ingest(const std::string& path, RawFormat format);
RawShotFile ingest_stream(std::istream& in, RawFormat format, const std::string& name);

// Stable sort by count descending (first-seen order breaks ties), truncate to
// the top K, attach n/S probabilities. Fewer than K distinct outcomes is not
// an error; the record is flagged truncated.
MeasurementRecord to_record(const RawShotFile& raw, std::uint64_t top_k);

struct Dataset {
    Dims dims;
    std::vector<MeasurementRecord> records;
    std::vector<std::pair<std::string, std::string>> provenance; // (path, sha256)
};

Dataset read_dataset_json(std::istream& in);
void write_dataset_json(const Dataset& ds, std::ostream& out);

// Canonical float formatting shared by every writer: %.12g, C locale.
std::string fmt_g12(double v);

std::string sha256_file(const std::string& path);

// Writers. All emit '\n' newlines and %.12g floats so identical inputs give
// byte-identical files everywhere.
void write_dist_csv(const std::vector<std::pair<double, double>>& rows, std::ostream& out);
void write_moments_csv(const std::vector<std::pair<std::uint64_t, MomentSet>>& rows,
                       std::ostream& out);
void write_curve_csv(const LikelihoodCurve& curve, std::ostream& out);
void write_trials_csv(const std::vector<double>& f_hats, std::ostream& out);
void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out);
void write_estimation_json(const std::vector<EstimationResult>& results, std::ostream& out);
void write_minshots_json(const SimConfig& cfg, const MinShotsResult& res, std::ostream& out);

} // namespace fidsta
