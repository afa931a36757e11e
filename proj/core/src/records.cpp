#include "mudt/records.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mudt {

SummaryMetrics compute_metrics(const std::vector<SlotRecord>& records, const std::string& method) {
    if (records.empty()) throw std::invalid_argument("compute_metrics: no records");
    SummaryMetrics m;
    m.method = method;
    m.slots = records.size();
    std::size_t violations = 0;
    double abs_err = 0.0;
    double burst_err = 0.0;
    for (const auto& r : records) {
        if (r.burst) {
            ++m.burst_slots;
            burst_err += std::fabs(r.predicted_count - r.k_true);
        }
        m.total_rbs += r.rb_count;
        m.total_over_provision_rbs += r.over_provision_rbs;
        violations += r.violated ? 1 : 0;
        abs_err += std::fabs(r.predicted_count - r.k_true);
        if (r.h == 1) ++m.detailed_slots;
        if (r.h == 0) ++m.simplified_slots;
    }
    m.violation_rate = static_cast<double>(violations) / static_cast<double>(records.size());
    m.empirical_reliability = 1.0 - m.violation_rate;
    m.mean_abs_count_error = abs_err / static_cast<double>(records.size());
    if (m.burst_slots > 0) m.burst_mean_abs_count_error = burst_err / static_cast<double>(m.burst_slots);
    return m;
}

namespace {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf.data(), end);
}

template <class T>
T parse_field(const std::string& s, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("CSV line " + std::to_string(line) + ": bad field '" + s + "'");
    return v;
}

}  // namespace

void emit_csv(std::ostream& out, const std::vector<SlotRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.t << ',' << r.k_true << ',' << r.a_hat << ',' << r.h << ',' << r.n_star << ','
            << format_double(r.b_star_hz) << ',' << r.rb_count << ',' << (r.violated ? 1 : 0) << ','
            << r.over_provision_rbs << ',' << format_double(r.p) << ',' << format_double(r.q) << ','
            << format_double(r.lambda) << '\n';
    }
}

void emit_csv(const std::filesystem::path& path, const std::vector<SlotRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    emit_csv(out, records);
}

std::vector<SlotRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("CSV header mismatch");
    std::vector<SlotRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 12) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected 12 fields");
        SlotRecord r;
        r.t = parse_field<std::size_t>(f[0], line_no);
        r.k_true = parse_field<int>(f[1], line_no);
        r.a_hat = parse_field<int>(f[2], line_no);
        r.h = parse_field<int>(f[3], line_no);
        r.n_star = parse_field<int>(f[4], line_no);
        r.b_star_hz = parse_field<double>(f[5], line_no);
        r.rb_count = parse_field<int>(f[6], line_no);
        r.violated = parse_field<int>(f[7], line_no) != 0;
        r.over_provision_rbs = parse_field<int>(f[8], line_no);
        r.p = parse_field<double>(f[9], line_no);
        r.q = parse_field<double>(f[10], line_no);
        r.lambda = parse_field<double>(f[11], line_no);
        r.over_provision_frames = std::max(0, r.n_star - r.k_true);
        out.push_back(r);
    }
    return out;
}

}  // namespace mudt
