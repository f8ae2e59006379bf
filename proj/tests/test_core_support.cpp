#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace evl;
using testing_support::gaussian_blob;
using testing_support::pt;
using testing_support::uniform_square;

namespace {

PointSet disk(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PointSet out;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(detail::uniform01(rng)), a = 2 * std::numbers::pi * detail::uniform01(rng);
        out.push_back(pt(r * std::cos(a), r * std::sin(a)));
    }
    return out;
}

Point centroid_of(const PointSet& pts) {
    Point c = Point::Zero(pts.front().size());
    for (const auto& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

CseParams params(CseMethod m, double cp) {
    CseParams p;
    p.method = m;
    p.cp = cp;
    return p;
}

}  // namespace

TEST(CoreSupport, IdentityKeepsEverything) {
    const PointSet pts = uniform_square(7, 3);
    const CoreSupports cs = extract_core_supports(pts, 4, params(CseMethod::identity, 0.1), 0);
    EXPECT_EQ(cs.instances, pts);
    EXPECT_EQ(cs.label, 4);
}

TEST(CoreSupport, GmmSingleComponentIsMahalanobisRanking) {
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 0.0, 0.8, 0.3;
    std::mt19937_64 rng(12);
    PointSet pts;
    for (int i = 0; i < 101; ++i) pts.push_back(pt(2, 1) + L * Eigen::Vector2d(detail::standard_normal(rng),
                                                                               detail::standard_normal(rng)));
    const auto kept = core_support_indices(pts, params(CseMethod::gmm_density, 0.5), 0);
    ASSERT_EQ(kept.size(), 51u);

    const Point mean = centroid_of(pts);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    cov /= 101.0;
    const Eigen::MatrixXd inv = cov.inverse();
    std::vector<std::pair<double, std::size_t>> m;
    for (std::size_t i = 0; i < pts.size(); ++i) m.emplace_back((pts[i] - mean).dot(inv * (pts[i] - mean)), i);
    std::sort(m.begin(), m.end());
    std::set<std::size_t> expected;
    for (std::size_t i = 0; i < 51; ++i) expected.insert(m[i].second);
    EXPECT_EQ(std::set<std::size_t>(kept.begin(), kept.end()), expected);
}

TEST(CoreSupport, GmmCountIsCeilCpN) {
    for (std::size_t n : {5u, 17u, 64u, 150u})
        for (double cp : {0.05, 0.35, 0.5, 0.99, 1.0}) {
            const PointSet pts = uniform_square(n, n);
            EXPECT_EQ(core_support_indices(pts, params(CseMethod::gmm_density, cp), 1).size(),
                      static_cast<std::size_t>(std::ceil(cp * static_cast<double>(n) - 1e-9)))
                << n << " " << cp;
        }
}

TEST(CoreSupport, AlphaShapeOnDiskKeepsCentralForty) {
    const PointSet pts = disk(200, 9);
    const auto kept = core_support_indices(pts, params(CseMethod::alpha_shape_2d, 0.4), 0);
    ASSERT_EQ(kept.size(), 80u);
    const Point c = centroid_of(pts);
    std::set<std::size_t> k(kept.begin(), kept.end());
    double in = 0, out = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) (k.count(i) ? in : out) += (pts[i] - c).norm();
    EXPECT_LT(in / 80.0, out / 120.0);
}

TEST(CoreSupport, OutputIsSubsetForAllMethods) {
    for (CseMethod m : {CseMethod::identity, CseMethod::gmm_density, CseMethod::alpha_shape_2d})
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            PointSet pts = uniform_square(30 + seed, seed + 70);
            pts.push_back(pts.front());
            const auto idx = core_support_indices(pts, params(m, 0.3), seed);
            EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
            EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), idx.size());
            for (auto i : idx) EXPECT_LT(i, pts.size());
            EXPECT_FALSE(idx.empty());
            EXPECT_EQ(idx, core_support_indices(pts, params(m, 0.3), seed));
        }
}

TEST(CoreSupport, GmmAndAlphaShapeCentroidsAgreeOnGaussian) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double sd = 1.5;
        const PointSet pts = gaussian_blob(400, pt(3, -1), sd, seed + 11);
        const auto g = extract_core_supports(pts, 0, params(CseMethod::gmm_density, 0.35), seed);
        const auto a = extract_core_supports(pts, 0, params(CseMethod::alpha_shape_2d, 0.35), seed);
        EXPECT_LT((centroid_of(g.instances) - centroid_of(a.instances)).norm(), 0.2 * sd) << "seed " << seed;
    }
}

TEST(CoreSupport, Errors) {
    EXPECT_THROW(core_support_indices({}, params(CseMethod::identity, 0.5), 0), InvalidArgument);
    PointSet three_d{Point::Zero(3), Point::Ones(3), Point::Constant(3, 2.0)};
    EXPECT_THROW(core_support_indices(three_d, params(CseMethod::alpha_shape_2d, 0.5), 0), InvalidArgument);
    CseParams gmm = params(CseMethod::gmm_density, 0.5);
    gmm.gmm_components = 5;
    EXPECT_THROW(core_support_indices(uniform_square(4, 1), gmm, 0), InvalidArgument);
    EXPECT_THROW(core_support_indices(uniform_square(4, 1), params(CseMethod::gmm_density, 0.0), 0),
                 InvalidArgument);
    CseParams bad_alpha = params(CseMethod::alpha_shape_2d, 0.5);
    bad_alpha.alpha = -1.0;
    EXPECT_THROW(core_support_indices(uniform_square(4, 1), bad_alpha, 0), InvalidArgument);
}
