#pragma once

#include "maskfit/core.hpp"
#include "maskfit/mesh.hpp"

#include <unordered_map>

namespace maskfit {

/// Per-edge cotangent weights. Interior edges get (cot a + cot b)/2 over the
/// two angles opposite the edge, boundary edges cot a / 2. Weights are stored
/// once per undirected edge and are symmetric by construction. Negative
/// weights from obtuse triangles are kept as-is.
class CotangentWeights {
public:
    struct Edge {
        int i, j;  // i < j
        double w;
    };

    static CotangentWeights build(const TriangleMesh& mesh);

    // Exact symmetric lookup; throws InvalidArgument for a non-edge.
    double weight(int i, int j) const;
    bool has_edge(int i, int j) const;

    const std::vector<Edge>& edges() const { return edges_; }

    // Neighbor adjacency (symmetric), grouped per vertex in ascending
    // neighbor order. Used by the smoothness energy loops.
    struct Neighbor {
        int vertex;
        double w;
    };
    const std::vector<int>& offsets() const { return offsets_; }
    const std::vector<Neighbor>& neighbors() const { return neighbors_; }

private:
    static uint64_t key(int i, int j);
    std::vector<Edge> edges_;                    // sorted by (i, j)
    std::unordered_map<uint64_t, double> index_; // (min,max) -> weight
    std::vector<int> offsets_;
    std::vector<Neighbor> neighbors_;
};

} // namespace maskfit
