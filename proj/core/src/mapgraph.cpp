#include "mudt/mapgraph.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mudt {

double jaccard(const FeaturePointSet& a, const FeaturePointSet& b) {
    const auto x = a.ids();
    const auto y = b.ids();
    if (x.empty() && y.empty()) return 0.0;
    std::size_t common = 0;
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
}

struct WeightedFrameGraph::Data {
    std::vector<Frame> nodes;
    std::vector<Edge> edges;
};

namespace {

bool edge_less(const WeightedFrameGraph::Edge& l, const WeightedFrameGraph::Edge& r) {
    return l.a != r.a ? l.a < r.a : l.b < r.b;
}

}  // namespace

WeightedFrameGraph::WeightedFrameGraph() {
    static const auto empty = std::make_shared<const Data>();
    data_ = empty;
}

WeightedFrameGraph::WeightedFrameGraph(std::vector<Frame> nodes, std::vector<Edge> edges) {
    std::sort(nodes.begin(), nodes.end(), [](const Frame& l, const Frame& r) { return l.frame_id < r.frame_id; });
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].frame_id == nodes[i - 1].frame_id)
            throw std::invalid_argument("duplicate node " + std::to_string(nodes[i].frame_id));

    auto has_node = [&](FrameId id) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const Frame& f, FrameId v) { return f.frame_id < v; });
        return it != nodes.end() && it->frame_id == id;
    };

    std::vector<Edge> kept;
    kept.reserve(edges.size());
    for (auto e : edges) {
        if (e.a == e.b) throw std::invalid_argument("self edge on node " + std::to_string(e.a));
        if (e.a > e.b) std::swap(e.a, e.b);
        if (!has_node(e.a) || !has_node(e.b)) throw std::invalid_argument("edge endpoint is not a node");
        if (!(e.weight >= 0.0 && e.weight <= 1.0)) throw std::invalid_argument("edge weight outside [0, 1]");
        if (e.weight > 0.0) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end(), edge_less);
    for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i].a == kept[i - 1].a && kept[i].b == kept[i - 1].b)
            throw std::invalid_argument("duplicate edge");

    auto data = std::make_shared<Data>();
    data->nodes = std::move(nodes);
    data->edges = std::move(kept);
    data_ = std::move(data);
}

std::span<const Frame> WeightedFrameGraph::nodes() const noexcept { return data_->nodes; }
std::span<const WeightedFrameGraph::Edge> WeightedFrameGraph::edges() const noexcept { return data_->edges; }

bool WeightedFrameGraph::contains(FrameId id) const {
    const auto& n = data_->nodes;
    auto it = std::lower_bound(n.begin(), n.end(), id, [](const Frame& f, FrameId v) { return f.frame_id < v; });
    return it != n.end() && it->frame_id == id;
}

const Frame& WeightedFrameGraph::node(FrameId id) const {
    const auto& n = data_->nodes;
    auto it = std::lower_bound(n.begin(), n.end(), id, [](const Frame& f, FrameId v) { return f.frame_id < v; });
    if (it == n.end() || it->frame_id != id) throw std::out_of_range("no node " + std::to_string(id));
    return *it;
}

double WeightedFrameGraph::weight(FrameId a, FrameId b) const {
    if (!contains(a) || !contains(b)) throw std::out_of_range("weight(): unknown node");
    if (a == b) return 0.0;
    if (a > b) std::swap(a, b);
    const auto& e = data_->edges;
    auto it = std::lower_bound(e.begin(), e.end(), Edge{a, b, 0.0}, edge_less);
    return (it != e.end() && it->a == a && it->b == b) ? it->weight : 0.0;
}

double WeightedFrameGraph::max_incident_weight(FrameId id) const {
    if (!contains(id)) throw std::out_of_range("max_incident_weight(): unknown node");
    double best = 0.0;
    for (const auto& e : data_->edges)
        if (e.a == id || e.b == id) best = std::max(best, e.weight);
    return best;
}

bool operator==(const WeightedFrameGraph& a, const WeightedFrameGraph& b) {
    return a.data_ == b.data_ || (a.data_->nodes == b.data_->nodes && a.data_->edges == b.data_->edges);
}

void CullConfig::validate() const {
    if (max_map_size < 1) throw std::invalid_argument("map.max_map_size must be >= 1");
    if (!(redundancy_threshold >= 0.0 && redundancy_threshold <= 1.0))
        throw std::invalid_argument("map.redundancy_threshold must be in [0, 1]");
}

WeightedFrameGraph build_graph(std::span<const Frame> frames) {
    std::vector<WeightedFrameGraph::Edge> edges;
    for (std::size_t i = 0; i < frames.size(); ++i)
        for (std::size_t j = i + 1; j < frames.size(); ++j) {
            const double w = jaccard(frames[i].fps, frames[j].fps);
            if (w > 0.0) edges.push_back({frames[i].frame_id, frames[j].frame_id, w});
        }
    return WeightedFrameGraph(std::vector<Frame>(frames.begin(), frames.end()), std::move(edges));
}

std::vector<FrameId> cull(const WeightedFrameGraph& map, const CullConfig& cfg) {
    cfg.validate();
    const auto nodes = map.nodes();
    const std::size_t n = nodes.size();
    if (n <= 1) return {};

    // Dense copy of the weights; n is bounded by the map cap plus one slot.
    std::vector<double> w(n * n, 0.0);
    auto index_of = [&](FrameId id) {
        return static_cast<std::size_t>(
            std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const Frame& f, FrameId v) { return f.frame_id < v; }) -
            nodes.begin());
    };
    for (const auto& e : map.edges()) {
        const auto i = index_of(e.a);
        const auto j = index_of(e.b);
        w[i * n + j] = w[j * n + i] = e.weight;
    }

    std::vector<bool> alive(n, true);
    std::size_t alive_count = n;
    const std::size_t newest = n - 1;
    std::vector<FrameId> removed;

    // Redundancy pass: most redundant first, ties to the older frame.
    for (;;) {
        std::size_t pick = n;
        double pick_w = -1.0;
        for (std::size_t i = 0; i < newest; ++i) {
            if (!alive[i]) continue;
            double mw = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && alive[j]) mw = std::max(mw, w[i * n + j]);
            if (mw >= cfg.redundancy_threshold && mw > pick_w) {
                pick = i;
                pick_w = mw;
            }
        }
        if (pick == n) break;
        alive[pick] = false;
        --alive_count;
        removed.push_back(nodes[pick].frame_id);
    }

    // Size pass: oldest first, the newest frame is never a candidate.
    for (std::size_t i = 0; i < newest && alive_count > cfg.max_map_size; ++i) {
        if (!alive[i]) continue;
        alive[i] = false;
        --alive_count;
        removed.push_back(nodes[i].frame_id);
    }

    std::sort(removed.begin(), removed.end());
    return removed;
}

WeightedFrameGraph remove_nodes(const WeightedFrameGraph& graph, std::span<const FrameId> removed) {
    if (removed.empty()) return graph;
    std::vector<FrameId> gone(removed.begin(), removed.end());
    std::sort(gone.begin(), gone.end());
    auto is_gone = [&](FrameId id) { return std::binary_search(gone.begin(), gone.end(), id); };

    std::vector<Frame> nodes;
    for (const auto& f : graph.nodes())
        if (!is_gone(f.frame_id)) nodes.push_back(f);
    std::vector<WeightedFrameGraph::Edge> edges;
    for (const auto& e : graph.edges())
        if (!is_gone(e.a) && !is_gone(e.b)) edges.push_back(e);
    return WeightedFrameGraph(std::move(nodes), std::move(edges));
}

MapUpdate update_map(const WeightedFrameGraph& map, std::span<const Frame> new_keys, const CullConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 0; i < new_keys.size(); ++i) {
        if (map.contains(new_keys[i].frame_id))
            throw std::invalid_argument("frame " + std::to_string(new_keys[i].frame_id) + " is already in the map");
        for (std::size_t j = 0; j < i; ++j)
            if (new_keys[j].frame_id == new_keys[i].frame_id)
                throw std::invalid_argument("frame " + std::to_string(new_keys[i].frame_id) + " inserted twice");
    }

    std::vector<Frame> nodes(map.nodes().begin(), map.nodes().end());
    std::vector<WeightedFrameGraph::Edge> edges(map.edges().begin(), map.edges().end());
    for (std::size_t i = 0; i < new_keys.size(); ++i) {
        for (const auto& old : map.nodes()) {
            const double w = jaccard(old.fps, new_keys[i].fps);
            if (w > 0.0) edges.push_back({old.frame_id, new_keys[i].frame_id, w});
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double w = jaccard(new_keys[j].fps, new_keys[i].fps);
            if (w > 0.0) edges.push_back({new_keys[j].frame_id, new_keys[i].frame_id, w});
        }
        nodes.push_back(new_keys[i]);
    }

    MapUpdate out;
    const WeightedFrameGraph merged(std::move(nodes), std::move(edges));
    out.culled = cull(merged, cfg);
    out.map = remove_nodes(merged, out.culled);
    return out;
}

void write_graph_csv(std::ostream& out, const WeightedFrameGraph& graph) {
    out << "frame_id_a,frame_id_b,weight\n";
    const auto old_precision = out.precision(17);
    for (const auto& e : graph.edges()) out << e.a << ',' << e.b << ',' << e.weight << '\n';
    out.precision(old_precision);
}

}  // namespace mudt
