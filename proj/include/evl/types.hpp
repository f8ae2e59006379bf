#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evl {

using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;
using Label = int;
using LabelSet = std::vector<Label>;

/// Features paired with class labels (D_init, core supports, relabeled pools).
struct LabeledSet {
    PointSet points;
    LabelSet labels;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// A batch as seen by a learner: features only.
struct UnlabeledBatch {
    PointSet points;

    std::size_t size() const { return points.size(); }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or preconditions (maps to CLI usage errors).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Malformed or missing input data (maps to CLI data errors).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Fewer than three unique points, or all collinear.
class DegenerateGeometry : public Error {
  public:
    using Error::Error;
};

class SingularSystem : public Error {
  public:
    using Error::Error;
};

namespace detail {

inline double squared_distance(const Point& a, const Point& b) {
    return (a - b).squaredNorm();
}

/// Uniform double in [0,1) from the top 53 bits; portable across standard libraries.
template <class Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n) by rejection; portable across standard libraries.
template <class Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return static_cast<std::size_t>(v % bound);
}

/// Standard normal by Box-Muller over uniform01 (std::normal_distribution is not portable).
template <class Rng>
double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Per-step seed derivation (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline LabelSet distinct_labels(const LabelSet& labels) {
    LabelSet out(labels);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

}  // namespace evl
