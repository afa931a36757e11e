#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mudt {

using FeatureId = std::uint32_t;
using FrameId = std::int64_t;

/// Immutable, sorted set of feature-point identifiers observed in one frame.
///
/// Copies share storage, so frames can be held by many graph snapshots and
/// experience records without duplicating the id lists.
class FeaturePointSet {
public:
    FeaturePointSet();

    /// Sorts `ids`; throws std::invalid_argument on duplicates.
    explicit FeaturePointSet(std::vector<FeatureId> ids);

    [[nodiscard]] std::span<const FeatureId> ids() const noexcept { return *ids_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_->size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_->empty(); }
    [[nodiscard]] bool contains(FeatureId id) const;

    friend bool operator==(const FeaturePointSet& a, const FeaturePointSet& b) {
        return a.ids_ == b.ids_ || *a.ids_ == *b.ids_;
    }

private:
    std::shared_ptr<const std::vector<FeatureId>> ids_;
};

struct Frame {
    FrameId frame_id = 0;
    FeaturePointSet fps;
    std::optional<bool> key;  ///< ground-truth key-frame label, when known

    friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameTrace {
    std::vector<Frame> frames;
    /// Slot indices in which the generator injected a viewpoint burst. Empty
    /// for traces read from disk.
    std::vector<std::size_t> burst_slots;

    [[nodiscard]] bool labeled() const;
    [[nodiscard]] bool empty() const noexcept { return frames.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return frames.size(); }
};

struct TraceSlot {
    std::size_t t = 0;
    std::vector<Frame> frames;
    std::vector<bool> key_mask;
    int key_count = 0;
};

struct GeneratorConfig {
    int world_fp_count = 4000;
    double view_radius = 0.08;
    double step_sigma = 0.006;
    double burst_prob = 0.03;  ///< per-slot chance of starting a burst
    double burst_jump = 1.2;   ///< total sweep distance of one burst
    int burst_length = 3;      ///< slots one burst sweep is spread over
    int frames_per_slot = 10;
    int slot_count = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct LabelingConfig {
    double theta_new = 0.6;
    double theta_overlap = 0.1;
    /// Number of most recent key frames a candidate is compared against;
    /// 0 compares against every key frame marked so far.
    std::size_t key_window = 0;

    void validate() const;
};

/// Raised for malformed trace input; `line()` is 1-based, 0 when not tied to
/// a specific line.
class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(const std::string& what, std::size_t line);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Reads a JSON-lines trace. When `frames_per_slot` is given and the trace
/// carries key labels, the frame count must be a multiple of it.
FrameTrace load_trace(const std::filesystem::path& path,
                      std::optional<int> frames_per_slot = std::nullopt);
FrameTrace read_trace(std::istream& in, std::optional<int> frames_per_slot = std::nullopt);

void write_trace(std::ostream& out, const FrameTrace& trace);
void save_trace(const std::filesystem::path& path, const FrameTrace& trace);

/// Viewpoint random walk over a unit torus scattered with feature points.
FrameTrace generate_trace(const GeneratorConfig& cfg);

/// Marks ground-truth key frames with the novelty/overlap rule and the
/// relocalization rule; existing labels are overwritten.
FrameTrace label_key_frames(const FrameTrace& trace, const LabelingConfig& cfg,
                            int frames_per_slot);

/// Groups frames into slots of `frames_per_slot`. A trailing partial slot is
/// dropped and reported through `dropped_frames` when non-null.
std::vector<TraceSlot> slotify(const FrameTrace& trace, int frames_per_slot,
                               std::size_t* dropped_frames = nullptr);

}  // namespace mudt
