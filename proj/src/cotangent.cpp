#include "maskfit/cotangent.hpp"
#include "maskfit/errors.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace maskfit {

uint64_t CotangentWeights::key(int i, int j) {
    const uint32_t a = static_cast<uint32_t>(std::min(i, j));
    const uint32_t b = static_cast<uint32_t>(std::max(i, j));
    return (static_cast<uint64_t>(a) << 32) | b;
}

CotangentWeights CotangentWeights::build(const TriangleMesh& mesh) {
    validate_mesh(mesh);

    // cot of the angle at vertex a in triangle (a,b,c)
    auto cot_at = [&](int a, int b, int c) {
        const Vec3 u = mesh.vertices[b] - mesh.vertices[a];
        const Vec3 v = mesh.vertices[c] - mesh.vertices[a];
        const double cross = u.cross(v).norm();
        if (cross < 1e-12)
            throw ZeroAreaFace("degenerate triangle at vertex " + std::to_string(a));
        return u.dot(v) / cross;
    };

    // ordered map keeps the edge list deterministic regardless of face order
    std::map<std::pair<int, int>, std::pair<double, int>> acc; // edge -> (sum cot, face count)
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3], opp = f[(k + 2) % 3];
            const auto e = std::minmax(a, b);
            auto& slot = acc[{e.first, e.second}];
            slot.first += cot_at(opp, a, b);
            if (++slot.second > 2)
                throw NonManifoldEdge("edge (" + std::to_string(e.first) + "," +
                                      std::to_string(e.second) + ") borders more than 2 faces");
        }
    }

    CotangentWeights cw;
    cw.edges_.reserve(acc.size());
    for (const auto& [e, sum_count] : acc) {
        const double w = 0.5 * sum_count.first;
        cw.edges_.push_back({e.first, e.second, w});
        cw.index_.emplace(key(e.first, e.second), w);
    }

    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<int> counts(n + 1, 0);
    for (const Edge& e : cw.edges_) {
        ++counts[e.i + 1];
        ++counts[e.j + 1];
    }
    for (int i = 0; i < n; ++i)
        counts[i + 1] += counts[i];
    cw.offsets_ = counts;
    cw.neighbors_.resize(cw.edges_.size() * 2);
    std::vector<int> cursor(cw.offsets_.begin(), cw.offsets_.end() - 1);
    for (const Edge& e : cw.edges_) {
        cw.neighbors_[cursor[e.i]++] = {e.j, e.w};
        cw.neighbors_[cursor[e.j]++] = {e.i, e.w};
    }
    for (int v = 0; v < n; ++v)
        std::sort(cw.neighbors_.begin() + cw.offsets_[v],
                  cw.neighbors_.begin() + cw.offsets_[v + 1],
                  [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    return cw;
}

bool CotangentWeights::has_edge(int i, int j) const {
    return index_.count(key(i, j)) > 0;
}

double CotangentWeights::weight(int i, int j) const {
    auto it = index_.find(key(i, j));
    if (it == index_.end())
        throw InvalidArgument("no edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return it->second;
}

} // namespace maskfit
