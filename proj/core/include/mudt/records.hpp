#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mudt {

/// Outcome of one provisioning decision.
struct SlotRecord {
    std::size_t t = 0;
    int k_true = 0;
    int a_hat = 0;
    int h = 0;  ///< 1 detailed, 0 simplified; -1 for baselines without switching
    int n_star = 0;
    double b_star_hz = 0.0;
    int rb_count = 0;
    bool violated = false;
    int over_provision_frames = 0;
    int over_provision_rbs = 0;
    double p = 0.0;
    double q = 0.0;
    double lambda = 0.0;

    // In-memory only (not part of the CSV).
    double predicted_count = 0.0;
    bool burst = false;
};

struct SummaryMetrics {
    std::string method;
    std::size_t slots = 0;
    long long total_rbs = 0;
    long long total_over_provision_rbs = 0;
    double violation_rate = 0.0;
    double empirical_reliability = 1.0;
    double mean_abs_count_error = 0.0;
    std::size_t burst_slots = 0;
    double burst_mean_abs_count_error = 0.0;  ///< 0 when there are no burst slots
    std::size_t detailed_slots = 0;
    std::size_t simplified_slots = 0;
};

/// Throws std::invalid_argument on an empty record list.
SummaryMetrics compute_metrics(const std::vector<SlotRecord>& records, const std::string& method = "mudt");

inline constexpr const char* kCsvHeader = "t,k_true,A_hat,h,N_star,b_star_hz,rb_count,violated,over_rbs,p,q,lambda";

void emit_csv(std::ostream& out, const std::vector<SlotRecord>& records);
void emit_csv(const std::filesystem::path& path, const std::vector<SlotRecord>& records);

/// Inverse of emit_csv for the CSV columns; in-memory-only fields stay at
/// their defaults.
std::vector<SlotRecord> parse_csv(std::istream& in);

}  // namespace mudt
