#pragma once

#include "evl/types.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace evl {

struct KMeansOptions {
    int max_iter = 100;
    double tol = 1e-10;  ///< stop once no centroid moves farther than this
    int restarts = 10;   ///< independent k-means++ seedings; lowest SSE wins
};

struct KMeansModel {
    PointSet centroids;
    std::vector<int> assignment;
    double sse = 0.0;
    std::vector<double> sse_trace;  ///< SSE after every assignment pass of the winning restart
    int iterations = 0;
};

namespace detail {

inline int nearest_index(const PointSet& centers, const Point& x, double* best_d2 = nullptr) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double d = squared_distance(centers[j], x);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    if (best_d2) *best_d2 = best_d;
    return best;
}

template <class Rng>
PointSet kmeanspp_seed(const PointSet& points, int k, Rng& rng) {
    PointSet centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(points[uniform_index(rng, points.size())]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0.0) {
            double u = uniform01(rng) * total;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (d2[i] <= 0.0) continue;
                if (u < d2[i]) {
                    pick = i;
                    break;
                }
                u -= d2[i];
            }
            while (d2[pick] <= 0.0 && pick > 0) --pick;
        } else {
            pick = uniform_index(rng, points.size());
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i)
            d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
    return centers;
}

/// Single-point transfers that lower the SSE, applied until none remains. Each
/// accepted move is exact: moving x from a to b changes the SSE by
/// n_b/(n_b+1)|x-c_b|^2 - n_a/(n_a-1)|x-c_a|^2.
inline void hartigan_refine(const PointSet& points, PointSet& centers, KMeansModel& m) {
    const std::size_t n = points.size();
    const std::size_t k = centers.size();
    if (k < 2) return;
    const Eigen::Index d = points.front().size();
    std::vector<Point> sums(k, Point::Zero(d));
    std::vector<double> counts(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sums[static_cast<std::size_t>(m.assignment[i])] += points[i];
        counts[static_cast<std::size_t>(m.assignment[i])] += 1.0;
    }
    for (std::size_t j = 0; j < k; ++j)
        if (counts[j] > 0) centers[j] = sums[j] / counts[j];

    bool moved = true;
    for (std::size_t pass = 0; moved && pass < 10 * n; ++pass) {
        moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(m.assignment[i]);
            if (counts[a] <= 1.0) continue;
            const double leave = counts[a] / (counts[a] - 1.0) * squared_distance(points[i], centers[a]);
            double best_gain = 0.0;
            std::size_t best = a;
            for (std::size_t b = 0; b < k; ++b) {
                if (b == a) continue;
                const double join = counts[b] / (counts[b] + 1.0) * squared_distance(points[i], centers[b]);
                const double gain = leave - join;
                if (gain > best_gain + 1e-12 * std::max(1.0, leave)) {
                    best_gain = gain;
                    best = b;
                }
            }
            if (best == a) continue;
            sums[a] -= points[i];
            counts[a] -= 1.0;
            sums[best] += points[i];
            counts[best] += 1.0;
            centers[a] = sums[a] / counts[a];
            centers[best] = sums[best] / counts[best];
            m.assignment[i] = static_cast<int>(best);
            moved = true;
        }
        if (moved) {
            double sse = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sse += squared_distance(points[i], centers[static_cast<std::size_t>(m.assignment[i])]);
            m.sse = sse;
            m.sse_trace.push_back(sse);
        }
    }
}

/// Lloyd iterations from the given centers until the assignment is a fixed point,
/// followed by Hartigan transfers.
inline KMeansModel lloyd(const PointSet& points, PointSet centers, const KMeansOptions& opt) {
    const std::size_t n = points.size();
    const std::size_t k = centers.size();
    KMeansModel m;
    m.assignment.assign(n, -1);
    std::vector<double> dist(n);

    auto assign = [&]() {
        bool changed = false;
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int j = nearest_index(centers, points[i], &dist[i]);
            if (j != m.assignment[i]) changed = true;
            m.assignment[i] = j;
            sse += dist[i];
        }
        m.sse = sse;
        m.sse_trace.push_back(sse);
        return changed;
    };

    assign();
    const Eigen::Index d = points.front().size();
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        m.iterations = iter + 1;
        std::vector<Point> sums(k, Point::Zero(d));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(m.assignment[i])] += points[i];
            ++counts[static_cast<std::size_t>(m.assignment[i])];
        }
        double movement = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            Point next;
            if (counts[j] == 0) {
                // Empty cluster: take over the point farthest from its centroid.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (dist[i] > dist[far]) far = i;
                next = points[far];
                dist[far] = 0.0;
            } else {
                next = sums[j] / static_cast<double>(counts[j]);
            }
            movement = std::max(movement, (next - centers[j]).norm());
            centers[j] = std::move(next);
        }
        const bool changed = assign();
        if (!changed || movement < opt.tol) break;
    }
    hartigan_refine(points, centers, m);
    m.centroids = std::move(centers);
    return m;
}

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding and a Hartigan transfer pass. Deterministic for a fixed seed;
/// distance ties go to the lowest cluster index.
inline KMeansModel kmeans(const PointSet& points, int k, const KMeansOptions& opt, std::uint64_t seed) {
    if (points.empty()) throw InvalidArgument("kmeans: empty input");
    if (k < 1) throw InvalidArgument("kmeans: k must be at least 1");
    if (static_cast<std::size_t>(k) > points.size())
        throw InvalidArgument("kmeans: k=" + std::to_string(k) + " exceeds point count " +
                              std::to_string(points.size()));
    std::mt19937_64 rng(seed);
    KMeansModel best;
    bool have = false;
    const int restarts = std::max(1, opt.restarts);
    for (int r = 0; r < restarts; ++r) {
        KMeansModel m = detail::lloyd(points, detail::kmeanspp_seed(points, k, rng), opt);
        if (!have || m.sse < best.sse) {
            best = std::move(m);
            have = true;
        }
    }
    return best;
}

inline KMeansModel kmeans(const PointSet& points, int k, int max_iter, double tol, std::uint64_t seed) {
    KMeansOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    return kmeans(points, k, opt, seed);
}

/// Cluster-and-label: k-means over labeled ∪ unlabeled, each cluster takes the
/// majority label of its labeled members (ties to the smallest label), clusters
/// without labeled members borrow from the nearest labeled cluster. Returns one
/// label per unlabeled point.
inline LabelSet cluster_and_label(const LabeledSet& labeled, const PointSet& unlabeled, int k, std::uint64_t seed,
                                  const KMeansOptions& opt = {}) {
    if (labeled.empty()) throw InvalidArgument("cluster_and_label: no labeled points");
    if (labeled.points.size() != labeled.labels.size())
        throw InvalidArgument("cluster_and_label: labels do not match points");
    if (unlabeled.empty()) return {};

    PointSet all;
    all.reserve(labeled.size() + unlabeled.size());
    all.insert(all.end(), labeled.points.begin(), labeled.points.end());
    all.insert(all.end(), unlabeled.begin(), unlabeled.end());
    if (static_cast<std::size_t>(k) > all.size())
        throw InvalidArgument("cluster_and_label: k exceeds the number of points");

    const KMeansModel model = kmeans(all, k, opt, seed);
    std::vector<std::map<Label, std::size_t>> votes(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labeled.size(); ++i) ++votes[static_cast<std::size_t>(model.assignment[i])][labeled.labels[i]];

    std::vector<Label> cluster_label(static_cast<std::size_t>(k), 0);
    std::vector<bool> has_label(static_cast<std::size_t>(k), false);
    for (std::size_t j = 0; j < votes.size(); ++j) {
        std::size_t best = 0;
        // std::map iterates labels ascending, so strict '>' keeps the smallest on ties.
        for (const auto& [label, count] : votes[j]) {
            if (count > best) {
                best = count;
                cluster_label[j] = label;
                has_label[j] = true;
            }
        }
    }
    for (std::size_t j = 0; j < votes.size(); ++j) {
        if (has_label[j]) continue;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < votes.size(); ++o) {
            if (!has_label[o]) continue;
            const double d = detail::squared_distance(model.centroids[j], model.centroids[o]);
            if (d < best_d) {
                best_d = d;
                cluster_label[j] = cluster_label[o];
            }
        }
    }

    LabelSet out(unlabeled.size());
    for (std::size_t u = 0; u < unlabeled.size(); ++u)
        out[u] = cluster_label[static_cast<std::size_t>(model.assignment[labeled.size() + u])];
    return out;
}

}  // namespace evl
