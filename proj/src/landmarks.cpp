#include "maskfit/landmarks.hpp"
#include "maskfit/errors.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace maskfit {

void validate_landmark_set(const LandmarkSet& set, int template_vertex_count) {
    std::unordered_set<std::string> seen;
    for (const Landmark& lm : set.entries) {
        if (!seen.insert(lm.name).second)
            throw InvalidArgument("duplicate landmark name '" + lm.name + "'");
        if (template_vertex_count >= 0 &&
            (lm.template_vertex < 0 || lm.template_vertex >= template_vertex_count))
            throw InvalidArgument("landmark '" + lm.name + "' has template_vertex " +
                                  std::to_string(lm.template_vertex) + " outside [0," +
                                  std::to_string(template_vertex_count) + ")");
    }
}

DepthFilterResult filter_invalid_depth(std::span<const RawLandmark> raw,
                                       const RangeScan& scan) {
    if (!scan.has_grid())
        throw InvalidArgument("depth filtering requires a gridded scan");
    DepthFilterResult result;
    for (const RawLandmark& lm : raw) {
        if (!lm.pixel)
            throw InvalidArgument("landmark '" + lm.name + "' carries no pixel coordinates");
        const long u = std::lround(lm.pixel->x());
        const long v = std::lround(lm.pixel->y());
        int32_t idx = -1;
        if (u >= 0 && u < scan.width && v >= 0 && v < scan.height)
            idx = scan.at(static_cast<int>(u), static_cast<int>(v));
        if (idx < 0) {
            result.dropped.push_back(lm.name);
            continue;
        }
        result.kept.entries.push_back({lm.name, scan.points[idx], -1});
    }
    if (result.kept.size() < 3)
        throw TooFewLandmarks("only " + std::to_string(result.kept.size()) +
                              " landmarks carry valid depth; need at least 3");
    return result;
}

std::vector<LandmarkPair> pair_landmarks(const LandmarkSet& template_set,
                                         const LandmarkSet& scan_set) {
    if (template_set.entries.empty() || scan_set.entries.empty())
        throw InvalidArgument("cannot pair empty landmark sets");
    validate_landmark_set(template_set);
    validate_landmark_set(scan_set);

    std::unordered_map<std::string, const Landmark*> by_name;
    for (const Landmark& lm : scan_set.entries)
        by_name.emplace(lm.name, &lm);

    std::vector<LandmarkPair> pairs;
    for (const Landmark& tlm : template_set.entries) {
        auto it = by_name.find(tlm.name);
        if (it == by_name.end())
            continue;
        pairs.push_back({tlm.name, tlm.template_vertex, tlm.position, it->second->position});
    }
    if (pairs.size() < 3)
        throw TooFewLandmarks("name intersection has " + std::to_string(pairs.size()) +
                              " landmarks; need at least 3");
    return pairs;
}

} // namespace maskfit
