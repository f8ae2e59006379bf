#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>

using namespace evl;
using testing_support::pt;
using testing_support::uniform_square;

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

// Andrew's monotone chain; strictly convex vertices only.
std::vector<int> hull_indices(const std::vector<Vec2>& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return v[a].x() != v[b].x() ? v[a].x() < v[b].x() : v[a].y() < v[b].y();
    });
    std::vector<int> h(2 * v.size());
    std::size_t k = 0;
    for (int i : idx) {
        while (k >= 2 && cross(v[h[k - 2]], v[h[k - 1]], v[i]) <= 0) --k;
        h[k++] = i;
    }
    for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(v[h[k - 2]], v[h[k - 1]], v[idx[i]]) <= 0) --k;
        h[k++] = idx[i];
    }
    h.resize(k - 1);
    return h;
}

double polygon_area(const std::vector<Vec2>& v, const std::vector<int>& ring) {
    double a = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Vec2& p = v[ring[i]];
        const Vec2& q = v[ring[(i + 1) % ring.size()]];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return std::abs(a) / 2.0;
}

void expect_valid_delaunay(const Triangulation2D& tri, const std::string& what) {
    const auto& v = tri.vertices;
    double scale = 0.0;
    for (const auto& p : v) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    double area = 0.0;
    for (const auto& t : tri.triangles) {
        const Vec2 &a = v[t.v[0]], &b = v[t.v[1]], &c = v[t.v[2]];
        EXPECT_GT(cross(a, b, c), 0.0) << what << ": triangle not counter-clockwise";
        area += cross(a, b, c) / 2.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (static_cast<int>(i) == t.v[0] || static_cast<int>(i) == t.v[1] || static_cast<int>(i) == t.v[2])
                continue;
            EXPECT_GE((v[i] - t.circumcenter).norm(), t.circumradius - 1e-9 * std::max(1.0, scale))
                << what << ": vertex " << i << " inside a circumcircle";
        }
        EXPECT_NEAR((a - t.circumcenter).norm(), t.circumradius, 1e-9 * std::max(1.0, t.circumradius));
    }
    const auto hull = hull_indices(v);
    EXPECT_NEAR(area, polygon_area(v, hull), 1e-9 * std::max(1.0, scale * scale)) << what << ": hull not covered";
}

std::set<std::size_t> retained(const AlphaComplex& ac) {
    return {ac.retained_triangles.begin(), ac.retained_triangles.end()};
}

}  // namespace

TEST(Delaunay, ThreePointsOneTriangle) {
    const auto tri = delaunay_2d(PointSet{pt(0, 0), pt(1, 0), pt(0, 1)});
    ASSERT_EQ(tri.triangles.size(), 1u);
    EXPECT_NEAR(tri.triangles[0].circumradius, std::sqrt(0.5), 1e-12);
    EXPECT_LT((tri.triangles[0].circumcenter - Vec2(0.5, 0.5)).norm(), 1e-12);
}

TEST(Delaunay, SquareGivesTwoTriangles) {
    const auto tri = delaunay_2d(PointSet{pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)});
    EXPECT_EQ(tri.triangles.size(), 2u);
    expect_valid_delaunay(tri, "square");
    const auto again = delaunay_2d(PointSet{pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)});
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(tri.triangles[i].v, again.triangles[i].v);
}

TEST(Delaunay, DegenerateInputs) {
    EXPECT_THROW(delaunay_2d(PointSet{pt(0, 0), pt(1, 1)}), DegenerateGeometry);
    EXPECT_THROW(delaunay_2d(PointSet{pt(0, 0), pt(1, 1), pt(2, 2), pt(3, 3)}), DegenerateGeometry);
    EXPECT_THROW(delaunay_2d(PointSet{Point::Zero(3), Point::Ones(3), Point::Ones(3) * 2}), InvalidArgument);
}

TEST(Delaunay, CollinearPrefixThenApex) {
    const auto tri = delaunay_2d(PointSet{pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 0), pt(1.5, 2)});
    EXPECT_EQ(tri.triangles.size(), 3u);
    expect_valid_delaunay(tri, "fan");
}

TEST(Delaunay, RandomSetsPassEmptyCircumcircleOracle) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 3 + (seed * 37) % 198;
        const PointSet pts = uniform_square(n, seed + 900);
        const auto tri = delaunay_2d(pts);
        expect_valid_delaunay(tri, "seed " + std::to_string(seed));
        // Euler relation for points in general position: T = 2n - 2 - h.
        const auto h = hull_indices(tri.vertices).size();
        EXPECT_EQ(tri.triangles.size(), 2 * n - 2 - h) << "seed " << seed;
    }
}

TEST(Delaunay, CocircularLatticeStaysValid) {
    PointSet grid;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) grid.push_back(pt(i, j));
    const auto tri = delaunay_2d(grid);
    EXPECT_EQ(tri.triangles.size(), 2u * 7u * 7u);
    expect_valid_delaunay(tri, "lattice");
}

TEST(Delaunay, ClusteredAndLargeOffsetInputs) {
    PointSet pts = testing_support::gaussian_blob(120, pt(1e4, -1e4), 0.01, 3);
    expect_valid_delaunay(delaunay_2d(pts), "offset blob");
}

TEST(AlphaComplex, InfiniteAlphaIsConvexHull) {
    const PointSet pts = uniform_square(60, 12);
    const auto tri = delaunay_2d(pts);
    const auto ac = alpha_complex(tri, std::numeric_limits<double>::infinity());
    EXPECT_EQ(ac.retained_triangles.size(), tri.triangles.size());
    auto hull = hull_indices(tri.vertices);
    std::sort(hull.begin(), hull.end());
    EXPECT_EQ(ac.boundary_vertices, hull);
}

TEST(AlphaComplex, TinyAlphaRetainsNothing) {
    const PointSet pts = uniform_square(40, 13);
    const auto tri = delaunay_2d(pts);
    double min_r = std::numeric_limits<double>::infinity();
    for (const auto& t : tri.triangles) min_r = std::min(min_r, t.circumradius);
    const auto ac = alpha_complex(tri, min_r * 0.5);
    EXPECT_TRUE(ac.retained_triangles.empty());
    EXPECT_EQ(ac.boundary_vertices.size(), 40u);
    EXPECT_THROW(alpha_complex(tri, 0.0), InvalidArgument);
    EXPECT_THROW(alpha_complex(tri, -1.0), InvalidArgument);
}

TEST(AlphaComplex, RetentionRuleAndMonotonicity) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PointSet pts = uniform_square(150, seed + 40);
        const auto tri = delaunay_2d(pts);
        std::set<std::size_t> previous;
        for (int step = 1; step <= 10; ++step) {
            const double alpha = 0.01 * step * step;
            const auto ac = alpha_complex(tri, alpha);
            for (std::size_t i = 0; i < tri.triangles.size(); ++i)
                EXPECT_EQ(std::count(ac.retained_triangles.begin(), ac.retained_triangles.end(), i),
                          tri.triangles[i].circumradius <= alpha ? 1 : 0);
            const auto now = retained(ac);
            EXPECT_TRUE(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
            previous = now;
        }
    }
}

TEST(AlphaComplex, TwoBlobsGiveTwoComponents) {
    PointSet pts;
    std::mt19937_64 rng(8);
    for (const Vec2& c : {Vec2(0, 0), Vec2(10, 0)})
        for (int i = 0; i < 150; ++i) {
            const double r = std::sqrt(detail::uniform01(rng)), a = 2 * std::numbers::pi * detail::uniform01(rng);
            pts.push_back(pt(c.x() + r * std::cos(a), c.y() + r * std::sin(a)));
        }
    const auto tri = delaunay_2d(pts);
    const auto ac = alpha_complex(tri, 1.0);
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    std::set<int> touched;
    for (std::size_t t : ac.retained_triangles)
        for (int e = 0; e < 3; ++e) {
            parent[find(tri.triangles[t].v[e])] = find(tri.triangles[t].v[(e + 1) % 3]);
            touched.insert(tri.triangles[t].v[e]);
        }
    std::set<int> roots;
    for (int v : touched) roots.insert(find(v));
    EXPECT_EQ(roots.size(), 2u);
}

TEST(Peel, CompactionTarget) {
    EXPECT_EQ(compaction_target(0.5, 10), 5u);
    EXPECT_EQ(compaction_target(0.35, 20), 7u);
    EXPECT_EQ(compaction_target(0.3, 500), 150u);
    EXPECT_EQ(compaction_target(0.01, 10), 1u);
    EXPECT_EQ(compaction_target(1.0, 7), 7u);
}

TEST(Peel, FullRetentionAtCpOne) {
    const PointSet pts = uniform_square(30, 2);
    EXPECT_EQ(peel_compaction(pts, default_alpha(pts), 1.0).size(), 30u);
}

TEST(Peel, TenPointsHalfRetained) {
    const PointSet pts = uniform_square(10, 6);
    EXPECT_EQ(peel_compaction(pts, 10.0, 0.5).size(), 5u);
}

TEST(Peel, RejectsBadCp) {
    const PointSet pts = uniform_square(10, 6);
    EXPECT_THROW(peel_compaction(pts, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(peel_compaction(pts, 1.0, 1.5), InvalidArgument);
    EXPECT_THROW(peel_compaction(PointSet{}, 1.0, 0.5), InvalidArgument);
}

TEST(Peel, RetainsCentralPointsOfDisk) {
    std::mt19937_64 rng(31);
    PointSet disk;
    for (int i = 0; i < 500; ++i) {
        const double r = std::sqrt(detail::uniform01(rng)), a = 2 * std::numbers::pi * detail::uniform01(rng);
        disk.push_back(pt(r * std::cos(a), r * std::sin(a)));
    }
    const auto kept = peel_compaction_indices(disk, default_alpha(disk), 0.3);
    ASSERT_EQ(kept.size(), 150u);
    Point centroid = Point::Zero(2);
    for (const auto& p : disk) centroid += p;
    centroid /= 500.0;
    std::vector<bool> is_kept(500, false);
    for (auto i : kept) is_kept[i] = true;
    double in = 0, out = 0;
    for (std::size_t i = 0; i < 500; ++i) (is_kept[i] ? in : out) += (disk[i] - centroid).norm();
    EXPECT_LT(in / 150.0, out / 350.0);
}

TEST(Peel, SubsetBoundedAndDeterministic) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        PointSet pts = uniform_square(20 + seed * 5, seed + 300);
        pts.push_back(pts[3]);  // an exact duplicate must not break the peel
        const double cp = 0.1 + 0.03 * static_cast<double>(seed);
        const auto a = peel_compaction_indices(pts, default_alpha(pts), cp);
        const auto b = peel_compaction_indices(pts, default_alpha(pts), cp);
        EXPECT_EQ(a, b);
        EXPECT_LE(a.size(), compaction_target(cp, pts.size()));
        EXPECT_FALSE(a.empty());
        EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
        EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), a.size());
        for (auto i : a) EXPECT_LT(i, pts.size());
    }
}

TEST(Peel, CollinearInputReturnsSurvivors) {
    PointSet line;
    for (int i = 0; i < 12; ++i) line.push_back(pt(i, 0));
    EXPECT_EQ(peel_compaction(line, 1.0, 0.5).size(), 12u);
}
