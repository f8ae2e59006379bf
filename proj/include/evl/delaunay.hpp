#pragma once

// Planar Delaunay triangulation by Bowyer-Watson insertion.

#include "evl/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace evl {

using Vec2 = Eigen::Vector2d;

struct Triangle {
    std::array<int, 3> v;  ///< counter-clockwise vertex indices
    Vec2 circumcenter;
    double circumradius = 0.0;
};

struct Triangulation2D {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
};

namespace detail {

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

/// Orientation with a magnitude-relative dead band; 0 means "collinear".
inline int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double det = orient2d(a, b, c);
    const double scale = ((b - a).cwiseAbs().maxCoeff() + 1e-300) * ((c - a).cwiseAbs().maxCoeff() + 1e-300);
    if (std::abs(det) <= 1e-12 * scale) return 0;
    return det > 0 ? 1 : -1;
}

inline Triangle make_triangle(const std::vector<Vec2>& pts, int a, int b, int c) {
    if (orient2d(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)],
                 pts[static_cast<std::size_t>(c)]) < 0)
        std::swap(b, c);
    const Vec2& A = pts[static_cast<std::size_t>(a)];
    const Vec2& B = pts[static_cast<std::size_t>(b)];
    const Vec2& C = pts[static_cast<std::size_t>(c)];
    // Circumcenter relative to A for precision.
    const Vec2 b1 = B - A;
    const Vec2 c1 = C - A;
    const double det = 2.0 * (b1.x() * c1.y() - b1.y() * c1.x());
    const double bb = b1.squaredNorm();
    const double cc = c1.squaredNorm();
    const Vec2 rel((c1.y() * bb - b1.y() * cc) / det, (b1.x() * cc - c1.x() * bb) / det);
    Triangle t;
    t.v = {a, b, c};
    t.circumcenter = A + rel;
    t.circumradius = rel.norm();
    return t;
}

/// Strictly inside the circumcircle, with a relative tolerance so cocircular
/// points (square corners) count as "on" the circle.
inline bool in_circumcircle(const Triangle& t, const Vec2& p) {
    const double r2 = t.circumradius * t.circumradius;
    return (p - t.circumcenter).squaredNorm() < r2 * (1.0 - 1e-10);
}

}  // namespace detail

/// Delaunay triangulation of distinct planar points. Points are inserted in
/// lexicographic order, which fixes the choice among cocircular completions.
/// Throws DegenerateGeometry for fewer than three points or all-collinear input.
///
/// Insertion never needs a bounding super-triangle: each new point lies outside
/// the current hull, and hull edges act as the super-triangle's ghost faces
/// (an edge is "in conflict" when the new point sees it from outside).
inline Triangulation2D delaunay_2d(const std::vector<Vec2>& input) {
    Triangulation2D out;
    out.vertices = input;
    const auto& pts = out.vertices;
    if (pts.size() < 3) throw DegenerateGeometry("delaunay_2d: fewer than 3 points");

    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec2& p = pts[static_cast<std::size_t>(a)];
        const Vec2& q = pts[static_cast<std::size_t>(b)];
        return p.x() != q.x() ? p.x() < q.x() : p.y() < q.y();
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (pts[static_cast<std::size_t>(order[i])] == pts[static_cast<std::size_t>(order[i - 1])])
            throw InvalidArgument("delaunay_2d: duplicate points");

    // Seed: the collinear prefix fanned to the first point off its line.
    std::size_t first_off = 2;
    while (first_off < order.size() &&
           detail::orient_sign(pts[static_cast<std::size_t>(order[0])], pts[static_cast<std::size_t>(order[1])],
                               pts[static_cast<std::size_t>(order[first_off])]) == 0)
        ++first_off;
    if (first_off == order.size()) throw DegenerateGeometry("delaunay_2d: all points collinear");

    std::vector<Triangle> tris;
    for (std::size_t i = 0; i + 1 < first_off; ++i)
        tris.push_back(detail::make_triangle(pts, order[i], order[i + 1], order[first_off]));

    // Convex hull as a counter-clockwise doubly linked list; its edges carry the
    // same direction as in their owning (counter-clockwise) triangle.
    std::vector<int> next(pts.size(), -1), prev(pts.size(), -1);
    {
        std::vector<int> ring(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_off + 1));
        const bool apex_left = detail::orient2d(pts[static_cast<std::size_t>(order[0])],
                                                pts[static_cast<std::size_t>(order[1])],
                                                pts[static_cast<std::size_t>(order[first_off])]) > 0;
        if (!apex_left) std::reverse(ring.begin(), ring.end() - 1);
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const int a = ring[i];
            const int b = ring[(i + 1) % ring.size()];
            next[static_cast<std::size_t>(a)] = b;
            prev[static_cast<std::size_t>(b)] = a;
        }
    }
    int last = order[first_off];

    std::vector<std::size_t> bad;
    std::vector<std::pair<int, int>> bad_edges;
    std::vector<std::pair<int, int>> cavity;
    for (std::size_t oi = first_off + 1; oi < order.size(); ++oi) {
        const int pi = order[oi];
        const Vec2& p = pts[static_cast<std::size_t>(pi)];
        auto sees = [&](int a, int b) {
            return detail::orient_sign(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)], p) < 0;
        };

        // Visible hull chain lo -> ... -> hi. The previous point is always on the hull.
        int lo = last, hi = last;
        while (sees(hi, next[static_cast<std::size_t>(hi)]) && next[static_cast<std::size_t>(hi)] != lo)
            hi = next[static_cast<std::size_t>(hi)];
        while (sees(prev[static_cast<std::size_t>(lo)], lo) && prev[static_cast<std::size_t>(lo)] != hi)
            lo = prev[static_cast<std::size_t>(lo)];
        if (lo == hi) {
            int v = last;
            do {
                if (sees(v, next[static_cast<std::size_t>(v)])) break;
                v = next[static_cast<std::size_t>(v)];
            } while (v != last);
            lo = hi = v;
            while (sees(hi, next[static_cast<std::size_t>(hi)]) && next[static_cast<std::size_t>(hi)] != lo)
                hi = next[static_cast<std::size_t>(hi)];
            while (sees(prev[static_cast<std::size_t>(lo)], lo) && prev[static_cast<std::size_t>(lo)] != hi)
                lo = prev[static_cast<std::size_t>(lo)];
        }
        auto on_visible_chain = [&](int a, int b) {
            if (lo == hi || next[static_cast<std::size_t>(a)] != b) return false;
            for (int v = lo; v != hi; v = next[static_cast<std::size_t>(v)])
                if (v == a) return true;
            return false;
        };

        bad.clear();
        bad_edges.clear();
        for (std::size_t i = 0; i < tris.size(); ++i)
            if (detail::in_circumcircle(tris[i], p)) bad.push_back(i);
        for (std::size_t i : bad)
            for (int e = 0; e < 3; ++e) bad_edges.emplace_back(tris[i].v[e], tris[i].v[(e + 1) % 3]);
        auto shared_with_bad = [&](int a, int b) {
            for (const auto& [x, y] : bad_edges)
                if (x == b && y == a) return true;
            return false;
        };

        cavity.clear();
        for (const auto& [a, b] : bad_edges)
            if (!shared_with_bad(a, b) && !on_visible_chain(a, b)) cavity.emplace_back(a, b);
        if (lo != hi) {
            for (int a = lo; a != hi; a = next[static_cast<std::size_t>(a)]) {
                const int b = next[static_cast<std::size_t>(a)];
                const bool owned_by_bad =
                    std::find(bad_edges.begin(), bad_edges.end(), std::pair{a, b}) != bad_edges.end();
                if (!owned_by_bad) cavity.emplace_back(b, a);
            }
        }

        std::vector<char> drop(tris.size(), 0);
        for (std::size_t i : bad) drop[i] = 1;
        std::size_t w = 0;
        for (std::size_t i = 0; i < tris.size(); ++i)
            if (!drop[i]) tris[w++] = tris[i];
        tris.resize(w);
        for (const auto& [a, b] : cavity) {
            if (detail::orient_sign(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)], p) == 0)
                continue;
            tris.push_back(detail::make_triangle(pts, a, b, pi));
        }

        if (lo != hi) {
            next[static_cast<std::size_t>(lo)] = pi;
            prev[static_cast<std::size_t>(pi)] = lo;
            next[static_cast<std::size_t>(pi)] = hi;
            prev[static_cast<std::size_t>(hi)] = pi;
        }
        last = pi;
    }
    out.triangles = std::move(tris);
    return out;
}

inline Triangulation2D delaunay_2d(const PointSet& points) {
    std::vector<Vec2> v;
    v.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != 2) throw InvalidArgument("delaunay_2d: points must be 2-D");
        v.emplace_back(p[0], p[1]);
    }
    return delaunay_2d(v);
}

}  // namespace evl
