#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

// Validates ranges and normalizes longitude into (-180, 180].
GeoPoint make_geo_point(double lat_degrees, double lon_degrees);

// Great-circle distance on the sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

struct Neighbor {
    VoterId id{};
    double distance_km{};
};

struct NeighborList {
    VoterId ego_id{};
    std::vector<Neighbor> neighbors;  // ascending (distance, id)
    std::size_t k_requested{};
    std::size_t k_returned{};
};

// Immutable exact k-nearest-neighbor index over one state's voters.
// Queries never cross state boundaries; callers hold one index per state.
//
// Internally a kd-tree over unit-sphere coordinates. Pruning uses chord
// bounds; candidates that survive pruning are ranked by the same
// haversine_km the brute-force definition uses, with ties at equal distance
// broken by ascending voter id, so results are exact, not approximate.
class SpatialIndex {
public:
    struct Entry {
        VoterId id{};
        GeoPoint point;
    };

    // Points must be non-empty with unique ids; duplicate ids are a schema
    // error. Build is deterministic given input order.
    static SpatialIndex build(std::vector<Entry> points, std::string state_key);

    // Exact k nearest other points. The ego is never its own neighbor; when
    // the state population is below k+1, all others are returned and
    // k_returned reflects the truncation.
    NeighborList knn(VoterId ego_id, std::size_t k) const;

    // Same query for an arbitrary location, excluding one id (or none when
    // exclude < 0). Shared by knn and batch scoring.
    NeighborList knn_at(const GeoPoint& query, VoterId exclude, std::size_t k) const;

    std::size_t size() const { return entries_.size(); }
    const std::string& state_key() const { return state_key_; }
    bool contains(VoterId id) const { return id_to_entry_.count(id) > 0; }
    std::span<const Entry> entries() const { return entries_; }

private:
    struct Node {
        double bbox_min[3];
        double bbox_max[3];
        std::uint32_t begin{};
        std::uint32_t end{};
        std::int32_t left = -1;   // -1 marks a leaf
        std::int32_t right = -1;
    };

    SpatialIndex() = default;
    std::int32_t build_node(std::uint32_t begin, std::uint32_t end);
    static double min_dist_sq(const Node& node, const double q[3]);

    std::string state_key_;
    std::vector<Entry> entries_;               // input order
    std::vector<std::uint32_t> order_;         // tree order -> entry index
    std::vector<double> xyz_;                  // 3 per tree slot
    std::vector<Node> nodes_;
    std::unordered_map<VoterId, std::uint32_t> id_to_entry_;
};

}  // namespace segiso
