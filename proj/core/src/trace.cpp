#include "mudt/trace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mudt/mapgraph.hpp"

namespace mudt {

namespace {

const std::shared_ptr<const std::vector<FeatureId>>& empty_ids() {
    static const auto empty = std::make_shared<const std::vector<FeatureId>>();
    return empty;
}

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

FeaturePointSet::FeaturePointSet() : ids_(empty_ids()) {}

FeaturePointSet::FeaturePointSet(std::vector<FeatureId> ids) {
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("feature point set contains duplicate ids");
    ids_ = std::make_shared<const std::vector<FeatureId>>(std::move(ids));
}

bool FeaturePointSet::contains(FeatureId id) const {
    return std::binary_search(ids_->begin(), ids_->end(), id);
}

bool FrameTrace::labeled() const {
    return !frames.empty() &&
           std::all_of(frames.begin(), frames.end(), [](const Frame& f) { return f.key.has_value(); });
}

void GeneratorConfig::validate() const {
    require(world_fp_count >= 0, "generator.world_fp_count must be >= 0");
    require(view_radius > 0.0 && view_radius <= 0.5, "generator.view_radius must be in (0, 0.5]");
    require(step_sigma >= 0.0, "generator.step_sigma must be >= 0");
    require(burst_prob >= 0.0 && burst_prob <= 1.0, "generator.burst_prob must be in [0, 1]");
    require(burst_jump >= 0.0, "generator.burst_jump must be >= 0");
    require(burst_length >= 1, "generator.burst_length must be >= 1");
    require(frames_per_slot >= 1, "generator.frames_per_slot must be >= 1");
    require(slot_count >= 1, "generator.slot_count must be >= 1");
}

void LabelingConfig::validate() const {
    require(theta_overlap >= 0.0 && theta_overlap <= theta_new && theta_new <= 1.0,
            "labeling thresholds must satisfy 0 <= theta_overlap <= theta_new <= 1");
}

TraceFormatError::TraceFormatError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

// ---------------------------------------------------------------------------
// JSON-lines I/O

FrameTrace read_trace(std::istream& in, std::optional<int> frames_per_slot) {
    FrameTrace trace;
    std::unordered_set<FrameId> seen;
    std::string line;
    std::size_t line_no = 0;
    std::size_t with_key = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw TraceFormatError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        if (!obj.is_object()) throw TraceFormatError("expected a JSON object", line_no);

        auto id_it = obj.find("frame_id");
        if (id_it == obj.end() || !id_it->is_number_integer())
            throw TraceFormatError("missing or non-integer \"frame_id\"", line_no);
        auto fps_it = obj.find("fps");
        if (fps_it == obj.end() || !fps_it->is_array())
            throw TraceFormatError("missing or non-array \"fps\"", line_no);

        Frame frame;
        frame.frame_id = id_it->get<FrameId>();
        if (!seen.insert(frame.frame_id).second)
            throw TraceFormatError("duplicate frame_id " + std::to_string(frame.frame_id), line_no);
        if (!trace.frames.empty() && frame.frame_id <= trace.frames.back().frame_id)
            throw TraceFormatError("frame_id must be strictly increasing", line_no);

        std::vector<FeatureId> ids;
        ids.reserve(fps_it->size());
        for (const auto& v : *fps_it) {
            if (!v.is_number_unsigned())
                throw TraceFormatError("feature ids must be non-negative integers", line_no);
            ids.push_back(v.get<FeatureId>());
        }
        try {
            frame.fps = FeaturePointSet(std::move(ids));
        } catch (const std::invalid_argument& e) {
            throw TraceFormatError(e.what(), line_no);
        }

        if (auto key_it = obj.find("key"); key_it != obj.end() && !key_it->is_null()) {
            if (!key_it->is_boolean()) throw TraceFormatError("\"key\" must be a boolean", line_no);
            frame.key = key_it->get<bool>();
            ++with_key;
        }
        trace.frames.push_back(std::move(frame));
    }

    if (trace.frames.empty()) throw TraceFormatError("trace is empty", 0);
    if (with_key != 0 && with_key != trace.frames.size())
        throw TraceFormatError("key labels must be present on every frame or on none", 0);
    if (with_key != 0 && frames_per_slot) {
        if (*frames_per_slot <= 0) throw std::invalid_argument("frames_per_slot must be positive");
        if (trace.frames.size() % static_cast<std::size_t>(*frames_per_slot) != 0)
            throw TraceFormatError("labeled trace length " + std::to_string(trace.frames.size()) +
                                       " is not a multiple of F=" + std::to_string(*frames_per_slot),
                                   0);
    }
    return trace;
}

FrameTrace load_trace(const std::filesystem::path& path, std::optional<int> frames_per_slot) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    return read_trace(in, frames_per_slot);
}

void write_trace(std::ostream& out, const FrameTrace& trace) {
    for (const auto& frame : trace.frames) {
        nlohmann::json obj;
        obj["frame_id"] = frame.frame_id;
        obj["fps"] = std::vector<FeatureId>(frame.fps.ids().begin(), frame.fps.ids().end());
        if (frame.key) obj["key"] = *frame.key;
        out << obj.dump() << '\n';
    }
}

void save_trace(const std::filesystem::path& path, const FrameTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    write_trace(out, trace);
}

// ---------------------------------------------------------------------------
// Generator

namespace {

struct Point {
    double x;
    double y;
};

double wrap(double v) {
    v = std::fmod(v, 1.0);
    return v < 0.0 ? v + 1.0 : v;
}

double torus_delta(double a, double b) {
    double d = std::fabs(a - b);
    return std::min(d, 1.0 - d);
}

// Uniform bucket grid over the torus with cells no smaller than the view
// radius, so a view disk touches at most the 3x3 block around its centre.
class PointGrid {
public:
    PointGrid(std::vector<Point> points, double radius)
        : points_(std::move(points)),
          radius_(radius),
          cells_(std::max(1, static_cast<int>(std::floor(1.0 / radius)))),
          buckets_(static_cast<std::size_t>(cells_) * cells_) {
        for (std::size_t i = 0; i < points_.size(); ++i)
            buckets_[index(cell(points_[i].x), cell(points_[i].y))].push_back(static_cast<FeatureId>(i));
    }

    std::vector<FeatureId> visible(Point c) const {
        std::vector<FeatureId> out;
        const double r2 = radius_ * radius_;
        auto test = [&](FeatureId id) {
            const double dx = torus_delta(points_[id].x, c.x);
            const double dy = torus_delta(points_[id].y, c.y);
            if (dx * dx + dy * dy <= r2) out.push_back(id);
        };
        if (cells_ < 3) {
            for (FeatureId id = 0; id < points_.size(); ++id) test(id);
        } else {
            const int cx = cell(c.x);
            const int cy = cell(c.y);
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    for (FeatureId id : buckets_[index((cx + dx + cells_) % cells_, (cy + dy + cells_) % cells_)])
                        test(id);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int cell(double v) const { return std::min(cells_ - 1, static_cast<int>(v * cells_)); }
    std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cx) * cells_ + cy; }

    std::vector<Point> points_;
    double radius_;
    int cells_;
    std::vector<std::vector<FeatureId>> buckets_;
};

}  // namespace

FrameTrace generate_trace(const GeneratorConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> step(0.0, 1.0);

    std::vector<Point> world(static_cast<std::size_t>(cfg.world_fp_count));
    for (auto& p : world) p = {unit(rng), unit(rng)};
    const PointGrid grid(std::move(world), cfg.view_radius);

    FrameTrace trace;
    trace.frames.reserve(static_cast<std::size_t>(cfg.frames_per_slot) * cfg.slot_count);
    Point view{unit(rng), unit(rng)};
    FrameId next_id = 0;

    int burst_left = 0;
    double sweep_x = 0.0;
    double sweep_y = 0.0;

    for (int t = 0; t < cfg.slot_count; ++t) {
        if (burst_left == 0 && unit(rng) < cfg.burst_prob) {
            const double heading = 2.0 * std::numbers::pi * unit(rng);
            const double per_frame = cfg.burst_jump / (cfg.frames_per_slot * cfg.burst_length);
            sweep_x = per_frame * std::cos(heading);
            sweep_y = per_frame * std::sin(heading);
            burst_left = cfg.burst_length;
        }
        if (burst_left > 0) {
            trace.burst_slots.push_back(static_cast<std::size_t>(t));
            --burst_left;
        } else {
            sweep_x = sweep_y = 0.0;
        }
        for (int f = 0; f < cfg.frames_per_slot; ++f) {
            if (next_id > 0) {
                view.x = wrap(view.x + cfg.step_sigma * step(rng) + sweep_x);
                view.y = wrap(view.y + cfg.step_sigma * step(rng) + sweep_y);
            }
            trace.frames.push_back(Frame{next_id++, FeaturePointSet(grid.visible(view)), std::nullopt});
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Labeling

FrameTrace label_key_frames(const FrameTrace& trace, const LabelingConfig& cfg, int frames_per_slot) {
    cfg.validate();
    if (frames_per_slot <= 0) throw std::invalid_argument("frames_per_slot must be positive");
    if (trace.empty()) throw std::invalid_argument("cannot label an empty trace");

    FrameTrace out = trace;
    std::deque<const FeaturePointSet*> keys;
    bool slot_cleared = false;
    bool force_next = false;
    const auto F = static_cast<std::size_t>(frames_per_slot);

    for (std::size_t i = 0; i < out.frames.size(); ++i) {
        if (i > 0 && i % F == 0) {
            if (!slot_cleared) force_next = true;
            slot_cleared = false;
        }
        Frame& frame = out.frames[i];

        double best = 0.0;
        for (const auto* k : keys) best = std::max(best, jaccard(*k, frame.fps));

        const bool overlaps = best >= cfg.theta_overlap;
        const bool is_key = keys.empty() || (best < cfg.theta_new && (overlaps || force_next));
        frame.key = is_key;
        if (is_key || overlaps) {
            slot_cleared = true;
            force_next = false;
        }
        if (is_key) {
            keys.push_back(&frame.fps);
            if (cfg.key_window != 0 && keys.size() > cfg.key_window) keys.pop_front();
        }
    }
    return out;
}

std::vector<TraceSlot> slotify(const FrameTrace& trace, int frames_per_slot, std::size_t* dropped_frames) {
    if (frames_per_slot <= 0) throw std::invalid_argument("frames_per_slot must be positive");
    const auto F = static_cast<std::size_t>(frames_per_slot);
    const std::size_t n_slots = trace.frames.size() / F;
    if (dropped_frames) *dropped_frames = trace.frames.size() - n_slots * F;

    std::vector<TraceSlot> slots(n_slots);
    for (std::size_t t = 0; t < n_slots; ++t) {
        TraceSlot& slot = slots[t];
        slot.t = t;
        slot.frames.assign(trace.frames.begin() + static_cast<std::ptrdiff_t>(t * F),
                           trace.frames.begin() + static_cast<std::ptrdiff_t>((t + 1) * F));
        slot.key_mask.resize(F);
        for (std::size_t f = 0; f < F; ++f) {
            slot.key_mask[f] = slot.frames[f].key.value_or(false);
            slot.key_count += slot.key_mask[f] ? 1 : 0;
        }
    }
    return slots;
}

}  // namespace mudt
