#pragma once

#include "evl/delaunay.hpp"
#include "evl/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

namespace evl {

/// Triangles of a Delaunay triangulation whose circumradius is at most alpha.
struct AlphaComplex {
    const Triangulation2D* parent = nullptr;
    double alpha = 0.0;
    std::vector<std::size_t> retained_triangles;  ///< indices into parent->triangles
    std::vector<int> boundary_vertices;           ///< sorted vertex indices
};

inline AlphaComplex alpha_complex(const Triangulation2D& tri, double alpha) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha_complex: alpha must be positive");
    AlphaComplex ac;
    ac.parent = &tri;
    ac.alpha = alpha;

    const auto n = static_cast<std::uint64_t>(tri.vertices.size());
    std::unordered_map<std::uint64_t, int> edge_uses;
    std::vector<char> covered(tri.vertices.size(), 0);
    for (std::size_t i = 0; i < tri.triangles.size(); ++i) {
        const Triangle& t = tri.triangles[i];
        if (t.circumradius > alpha) continue;
        ac.retained_triangles.push_back(i);
        for (int e = 0; e < 3; ++e) {
            const auto a = static_cast<std::uint64_t>(t.v[e]);
            const auto b = static_cast<std::uint64_t>(t.v[(e + 1) % 3]);
            ++edge_uses[std::min(a, b) * n + std::max(a, b)];
            covered[static_cast<std::size_t>(t.v[e])] = 1;
        }
    }
    std::vector<char> boundary(tri.vertices.size(), 0);
    for (const auto& [key, uses] : edge_uses) {
        if (uses >= 2) continue;
        boundary[static_cast<std::size_t>(key / n)] = 1;
        boundary[static_cast<std::size_t>(key % n)] = 1;
    }
    for (std::size_t v = 0; v < boundary.size(); ++v)
        if (boundary[v] || !covered[v]) ac.boundary_vertices.push_back(static_cast<int>(v));
    return ac;
}

/// Twice the mean nearest-neighbor distance over distinct points; the default
/// alpha when none is configured.
inline double default_alpha(const PointSet& points) {
    std::vector<Vec2> uniq;
    for (const auto& p : points) {
        const Vec2 v(p[0], p[1]);
        if (std::find(uniq.begin(), uniq.end(), v) == uniq.end()) uniq.push_back(v);
    }
    if (uniq.size() < 2) return 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < uniq.size(); ++j)
            if (i != j) best = std::min(best, (uniq[i] - uniq[j]).squaredNorm());
        total += std::sqrt(best);
    }
    const double mean = total / static_cast<double>(uniq.size());
    return mean > 0.0 ? 2.0 * mean : 1.0;
}

/// Number of points core-support extraction keeps out of n.
inline std::size_t compaction_target(double cp, std::size_t n) {
    const double raw = cp * static_cast<double>(n);
    const auto target = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<std::size_t>(target, n == 0 ? 0 : 1, n);
}

/// Repeatedly peel the alpha-shape boundary until ceil(cp*n) points remain.
/// The last layer is trimmed farthest-from-centroid first so the count lands
/// exactly; exact duplicates share the fate of their twin. Stops early (keeping
/// the current survivors) once fewer than three distinct, non-collinear points
/// remain. Returns indices into `points`, ascending.
inline std::vector<std::size_t> peel_compaction_indices(const PointSet& points, double alpha, double cp) {
    if (!(cp > 0.0 && cp <= 1.0)) throw InvalidArgument("peel_compaction: cp must lie in (0, 1]");
    if (points.empty()) throw InvalidArgument("peel_compaction: no points");
    if (!(alpha > 0.0)) throw InvalidArgument("peel_compaction: alpha must be positive");
    for (const auto& p : points)
        if (p.size() != 2) throw InvalidArgument("peel_compaction: points must be 2-D");

    const std::size_t n = points.size();
    const std::size_t target = compaction_target(cp, n);

    // Distinct points, each with its original members.
    std::vector<Vec2> uniq;
    std::vector<std::vector<std::size_t>> members;
    {
        std::map<std::pair<double, double>, std::size_t> seen;
        for (std::size_t i = 0; i < n; ++i) {
            const auto key = std::pair{points[i][0], points[i][1]};
            auto [it, inserted] = seen.emplace(key, uniq.size());
            if (inserted) {
                uniq.emplace_back(key.first, key.second);
                members.emplace_back();
            }
            members[it->second].push_back(i);
        }
    }

    std::vector<std::size_t> alive(uniq.size());
    for (std::size_t u = 0; u < alive.size(); ++u) alive[u] = u;
    std::size_t alive_count = n;

    while (alive_count > target) {
        if (alive.size() < 3) break;
        std::vector<Vec2> layer;
        layer.reserve(alive.size());
        for (std::size_t u : alive) layer.push_back(uniq[u]);
        Triangulation2D tri;
        try {
            tri = delaunay_2d(layer);
        } catch (const DegenerateGeometry&) {
            break;
        }
        const AlphaComplex ac = alpha_complex(tri, alpha);

        std::size_t peel = 0;
        for (int v : ac.boundary_vertices) peel += members[alive[static_cast<std::size_t>(v)]].size();

        std::vector<char> remove(alive.size(), 0);
        if (alive_count - peel >= target) {
            for (int v : ac.boundary_vertices) remove[static_cast<std::size_t>(v)] = 1;
            alive_count -= peel;
        } else {
            Vec2 centroid = Vec2::Zero();
            for (std::size_t u : alive) centroid += uniq[u] * static_cast<double>(members[u].size());
            centroid /= static_cast<double>(alive_count);
            std::vector<int> ranked(ac.boundary_vertices);
            std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
                return (layer[static_cast<std::size_t>(a)] - centroid).squaredNorm() >
                       (layer[static_cast<std::size_t>(b)] - centroid).squaredNorm();
            });
            for (int v : ranked) {
                if (alive_count == target) break;
                const std::size_t mult = members[alive[static_cast<std::size_t>(v)]].size();
                if (alive_count - mult < target) continue;
                remove[static_cast<std::size_t>(v)] = 1;
                alive_count -= mult;
            }
            if (std::none_of(remove.begin(), remove.end(), [](char c) { return c != 0; })) break;
        }
        std::size_t w = 0;
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (!remove[i]) alive[w++] = alive[i];
        alive.resize(w);
    }

    std::vector<std::size_t> kept;
    for (std::size_t u : alive) kept.insert(kept.end(), members[u].begin(), members[u].end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

inline PointSet peel_compaction(const PointSet& points, double alpha, double cp) {
    PointSet out;
    for (std::size_t i : peel_compaction_indices(points, alpha, cp)) out.push_back(points[i]);
    return out;
}

}  // namespace evl
