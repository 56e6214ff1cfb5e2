#include "segiso/geo_knn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "segiso/errors.hpp"

namespace segiso {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::uint32_t kLeafSize = 32;

void to_unit_sphere(const GeoPoint& p, double out[3]) {
    const double phi = p.lat * kDegToRad;
    const double lambda = p.lon * kDegToRad;
    const double cos_phi = std::cos(phi);
    out[0] = cos_phi * std::cos(lambda);
    out[1] = cos_phi * std::sin(lambda);
    out[2] = std::sin(phi);
}

// Squared chord length on the unit sphere for a great-circle distance d_km,
// inflated by a safety margin so kd-tree pruning never discards a candidate
// whose exact haversine rank would qualify. Admitted extras are rejected by
// the exact comparator, so the margin costs a few distance evaluations only.
double prune_bound_chord_sq(double d_km) {
    const double half_angle = d_km / (2.0 * kEarthRadiusKm);
    const double chord = 2.0 * std::sin(half_angle);
    return chord * chord * (1.0 + 1e-9) + 1e-13;
}

struct HeapEntry {
    double distance_km;
    VoterId id;
    bool operator<(const HeapEntry& o) const {
        if (distance_km != o.distance_km) return distance_km < o.distance_km;
        return id < o.id;
    }
};

}  // namespace

GeoPoint make_geo_point(double lat_degrees, double lon_degrees) {
    if (!std::isfinite(lat_degrees) || !std::isfinite(lon_degrees)) {
        throw_error(Errc::invalid_coordinate, "coordinates must be finite");
    }
    if (lat_degrees < -90.0 || lat_degrees > 90.0) {
        throw_error(Errc::invalid_coordinate,
                    "latitude out of range [-90, 90]: " + std::to_string(lat_degrees));
    }
    double lon = std::fmod(lon_degrees, 360.0);
    if (lon <= -180.0) lon += 360.0;
    if (lon > 180.0) lon -= 360.0;
    return GeoPoint{lat_degrees, lon};
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    if (!std::isfinite(a.lat) || !std::isfinite(a.lon) || !std::isfinite(b.lat) ||
        !std::isfinite(b.lon)) {
        throw_error(Errc::invalid_coordinate, "haversine_km: non-finite input");
    }
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

SpatialIndex SpatialIndex::build(std::vector<Entry> points, std::string state_key) {
    if (points.empty()) {
        throw_error(Errc::schema, "SpatialIndex: empty point set for state " + state_key);
    }
    SpatialIndex index;
    index.state_key_ = std::move(state_key);
    index.entries_ = std::move(points);

    index.id_to_entry_.reserve(index.entries_.size());
    for (std::uint32_t i = 0; i < index.entries_.size(); ++i) {
        const Entry& e = index.entries_[i];
        GeoPoint normalized = make_geo_point(e.point.lat, e.point.lon);
        index.entries_[i].point = normalized;
        if (!index.id_to_entry_.emplace(e.id, i).second) {
            throw_error(Errc::schema, "SpatialIndex: duplicate voter_id " + std::to_string(e.id) +
                                          " in state " + index.state_key_);
        }
    }

    const std::size_t n = index.entries_.size();
    index.order_.resize(n);
    index.xyz_.resize(3 * n);
    for (std::uint32_t i = 0; i < n; ++i) {
        index.order_[i] = i;
        to_unit_sphere(index.entries_[i].point, &index.xyz_[3 * i]);
    }
    index.nodes_.reserve(2 * n / kLeafSize + 2);
    index.build_node(0, static_cast<std::uint32_t>(n));
    return index;
}

std::int32_t SpatialIndex::build_node(std::uint32_t begin, std::uint32_t end) {
    const std::int32_t node_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    {
        Node& node = nodes_.back();
        node.begin = begin;
        node.end = end;
        for (int d = 0; d < 3; ++d) {
            node.bbox_min[d] = 1.0;
            node.bbox_max[d] = -1.0;
        }
        for (std::uint32_t i = begin; i < end; ++i) {
            const double* p = &xyz_[3 * order_[i]];
            for (int d = 0; d < 3; ++d) {
                node.bbox_min[d] = std::min(node.bbox_min[d], p[d]);
                node.bbox_max[d] = std::max(node.bbox_max[d], p[d]);
            }
        }
    }
    if (end - begin <= kLeafSize) return node_id;

    int split_dim = 0;
    {
        const Node& node = nodes_[node_id];
        double widest = -1.0;
        for (int d = 0; d < 3; ++d) {
            const double width = node.bbox_max[d] - node.bbox_min[d];
            if (width > widest) {
                widest = width;
                split_dim = d;
            }
        }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double va = xyz_[3 * a + split_dim];
                         const double vb = xyz_[3 * b + split_dim];
                         if (va != vb) return va < vb;
                         return entries_[a].id < entries_[b].id;
                     });
    const std::int32_t left = build_node(begin, mid);
    const std::int32_t right = build_node(mid, end);
    nodes_[node_id].left = left;
    nodes_[node_id].right = right;
    return node_id;
}

double SpatialIndex::min_dist_sq(const Node& node, const double q[3]) {
    double acc = 0.0;
    for (int d = 0; d < 3; ++d) {
        double diff = 0.0;
        if (q[d] < node.bbox_min[d]) {
            diff = node.bbox_min[d] - q[d];
        } else if (q[d] > node.bbox_max[d]) {
            diff = q[d] - node.bbox_max[d];
        }
        acc += diff * diff;
    }
    return acc;
}

NeighborList SpatialIndex::knn(VoterId ego_id, std::size_t k) const {
    auto it = id_to_entry_.find(ego_id);
    if (it == id_to_entry_.end()) {
        throw_error(Errc::not_found, "knn: unknown ego_id " + std::to_string(ego_id) +
                                         " in state " + state_key_);
    }
    return knn_at(entries_[it->second].point, ego_id, k);
}

NeighborList SpatialIndex::knn_at(const GeoPoint& query, VoterId exclude, std::size_t k) const {
    if (k < 1) throw_error(Errc::invalid_argument, "knn: k must be >= 1");

    const GeoPoint q = make_geo_point(query.lat, query.lon);
    double qv[3];
    to_unit_sphere(q, qv);

    NeighborList result;
    result.ego_id = exclude;
    result.k_requested = k;

    std::priority_queue<HeapEntry> heap;  // worst candidate on top
    double bound_chord_sq = 4.0 + 1.0;    // larger than any chord until heap fills

    // Iterative DFS, nearer child first.
    std::vector<std::int32_t> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
        const std::int32_t node_id = stack.back();
        stack.pop_back();
        const Node& node = nodes_[node_id];
        if (heap.size() == k && min_dist_sq(node, qv) > bound_chord_sq) continue;
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const Entry& entry = entries_[order_[i]];
                if (entry.id == exclude) continue;
                const HeapEntry cand{haversine_km(q, entry.point), entry.id};
                if (heap.size() < k) {
                    heap.push(cand);
                    if (heap.size() == k) bound_chord_sq = prune_bound_chord_sq(heap.top().distance_km);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                    bound_chord_sq = prune_bound_chord_sq(heap.top().distance_km);
                }
            }
        } else {
            const double dl = min_dist_sq(nodes_[node.left], qv);
            const double dr = min_dist_sq(nodes_[node.right], qv);
            // Push the farther child first so the nearer one is explored next.
            if (dl <= dr) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

    result.neighbors.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        const HeapEntry& top = heap.top();
        result.neighbors[i] = Neighbor{top.id, top.distance_km};
        heap.pop();
    }
    result.k_returned = result.neighbors.size();
    return result;
}

}  // namespace segiso
