#pragma once

#include "evl/evl.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline evl::Point pt(double x, double y) {
    evl::Point p(2);
    p << x, y;
    return p;
}

inline evl::PointSet uniform_square(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    evl::PointSet out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(pt(lo + (hi - lo) * evl::detail::uniform01(rng), lo + (hi - lo) * evl::detail::uniform01(rng)));
    return out;
}

inline evl::PointSet gaussian_blob(std::size_t n, const evl::Point& center, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    evl::PointSet out;
    for (std::size_t i = 0; i < n; ++i) {
        evl::Point p = center;
        for (Eigen::Index k = 0; k < p.size(); ++k) p[k] += sd * evl::detail::standard_normal(rng);
        out.push_back(p);
    }
    return out;
}

inline evl::StreamSpec translating(double rate, double overlap, std::uint64_t seed, long batches = 50,
                                   long batch = 100) {
    evl::StreamSpec s;
    s.family = evl::Family::translating_gaussians;
    s.class_count = 2;
    s.dimension = 2;
    s.batch_size = batch;
    s.total_instances = batch * batches;
    s.drift_rate = rate;
    s.class_overlap = overlap;
    s.seed = seed;
    return s;
}

/// Fresh empty directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("evl_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testing_support
