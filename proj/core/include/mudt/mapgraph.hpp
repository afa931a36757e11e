#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mudt/trace.hpp"

namespace mudt {

/// |a ∩ b| / |a ∪ b|; defined as 0 when both sets are empty.
double jaccard(const FeaturePointSet& a, const FeaturePointSet& b);

/// Undirected graph over frames with Jaccard edge weights.
///
/// Values are immutable snapshots sharing their storage; copying is cheap.
/// Nodes are kept sorted by frame id and only non-zero edges are stored,
/// every other pair of nodes has implicit weight 0.
class WeightedFrameGraph {
public:
    struct Edge {
        FrameId a;  ///< a < b
        FrameId b;
        double weight;

        friend bool operator==(const Edge&, const Edge&) = default;
    };

    WeightedFrameGraph();

    /// Validates every invariant: unique nodes, no self edges, endpoints are
    /// nodes, weights in [0, 1], no duplicate pairs.
    WeightedFrameGraph(std::vector<Frame> nodes, std::vector<Edge> edges);

    [[nodiscard]] std::span<const Frame> nodes() const noexcept;
    [[nodiscard]] std::span<const Edge> edges() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return nodes().size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes().empty(); }
    [[nodiscard]] std::size_t pair_count() const noexcept {
        return size() < 2 ? 0 : size() * (size() - 1) / 2;
    }

    [[nodiscard]] bool contains(FrameId id) const;
    /// Throws std::out_of_range for unknown ids.
    [[nodiscard]] const Frame& node(FrameId id) const;
    /// Weight between two distinct nodes (0 when implicit).
    [[nodiscard]] double weight(FrameId a, FrameId b) const;
    /// Largest weight on any edge touching `id`; 0 for isolated nodes.
    [[nodiscard]] double max_incident_weight(FrameId id) const;

    friend bool operator==(const WeightedFrameGraph& a, const WeightedFrameGraph& b);

private:
    struct Data;
    std::shared_ptr<const Data> data_;
};

struct CullConfig {
    std::size_t max_map_size = 32;
    double redundancy_threshold = 0.9;

    void validate() const;
};

struct MapUpdate {
    WeightedFrameGraph map;
    std::vector<FrameId> culled;  ///< ascending
};

/// Complete Jaccard graph over `frames`.
WeightedFrameGraph build_graph(std::span<const Frame> frames);

/// Frames to drop so that no remaining node other than the newest is
/// redundant and the cap holds. Result is sorted ascending.
std::vector<FrameId> cull(const WeightedFrameGraph& map, const CullConfig& cfg);

/// Inserts `new_keys`, then removes the frames chosen by `cull`.
MapUpdate update_map(const WeightedFrameGraph& map, std::span<const Frame> new_keys, const CullConfig& cfg);

/// Graph restricted to the nodes not listed in `removed`.
WeightedFrameGraph remove_nodes(const WeightedFrameGraph& graph, std::span<const FrameId> removed);

/// Debug dump: header `frame_id_a,frame_id_b,weight` then one row per stored edge.
void write_graph_csv(std::ostream& out, const WeightedFrameGraph& graph);

}  // namespace mudt
