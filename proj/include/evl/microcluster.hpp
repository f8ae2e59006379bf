#pragma once

// MClassification: online nearest-micro-cluster classification with a radius cap.

#include "evl/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace evl {

/// Sufficient statistics (N, LS, SS) of a labeled point set; SS is per coordinate.
struct MicroCluster {
    long count = 0;
    Point linear_sum;
    Point square_sum;
    Label label = 0;

    static MicroCluster singleton(const Point& x, Label y) {
        return MicroCluster{1, x, x.cwiseProduct(x), y};
    }

    void absorb(const Point& x) {
        ++count;
        linear_sum += x;
        square_sum += x.cwiseProduct(x);
    }

    /// Fold in another cluster's sums (labels are not reconciled).
    void merge_sums(const MicroCluster& other) {
        count += other.count;
        linear_sum += other.linear_sum;
        square_sum += other.square_sum;
    }
};

inline Point mc_centroid(const MicroCluster& mc) {
    if (mc.count <= 0) throw InvalidArgument("mc_centroid: empty micro-cluster");
    return mc.linear_sum / static_cast<double>(mc.count);
}

/// Euclidean norm of the per-coordinate deviations sqrt(SS_j/N - (LS_j/N)^2),
/// with negative round-off clamped to zero.
inline double mc_radius(const MicroCluster& mc) {
    if (mc.count <= 0) throw InvalidArgument("mc_radius: empty micro-cluster");
    const double n = static_cast<double>(mc.count);
    double total = 0.0;
    for (Eigen::Index j = 0; j < mc.linear_sum.size(); ++j) {
        const double mean = mc.linear_sum[j] / n;
        total += std::max(0.0, mc.square_sum[j] / n - mean * mean);
    }
    return std::sqrt(total);
}

struct MCState {
    std::vector<MicroCluster> clusters;
    double r = 0.1;
};

inline MCState mclass_init(const LabeledSet& initial, double r) {
    if (initial.empty()) throw InvalidArgument("mclass_init: empty initial labeled set");
    if (initial.points.size() != initial.labels.size())
        throw InvalidArgument("mclass_init: labels do not match points");
    if (!(r > 0.0)) throw InvalidArgument("mclass_init: radius threshold must be positive");
    MCState s;
    s.r = r;
    s.clusters.reserve(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i)
        s.clusters.push_back(MicroCluster::singleton(initial.points[i], initial.labels[i]));
    return s;
}

/// Classify x by its nearest micro-cluster centroid (ties to the lowest index),
/// then grow that cluster if its radius stays within r, else open a new one
/// carrying the predicted label. Updates `state` in place.
inline Label mclass_step(MCState& state, const Point& x) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.clusters.size(); ++i) {
        const MicroCluster& mc = state.clusters[i];
        const double d = (mc.linear_sum / static_cast<double>(mc.count) - x).squaredNorm();
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    const Label predicted = state.clusters[nearest].label;
    MicroCluster trial = state.clusters[nearest];
    trial.absorb(x);
    if (mc_radius(trial) > state.r)
        state.clusters.push_back(MicroCluster::singleton(x, predicted));
    else
        state.clusters[nearest] = std::move(trial);
    return predicted;
}

inline LabelSet mclass_process(MCState& state, const UnlabeledBatch& batch) {
    if (!state.clusters.empty()) {
        const Eigen::Index d = state.clusters.front().linear_sum.size();
        for (const auto& x : batch.points)
            if (x.size() != d) throw InvalidArgument("mclass_step: feature dimension mismatch");
    }
    LabelSet out;
    out.reserve(batch.size());
    for (const auto& x : batch.points) out.push_back(mclass_step(state, x));
    return out;
}

}  // namespace evl
