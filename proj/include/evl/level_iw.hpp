#pragma once

// LEVEL_IW: importance-weighted least-squares probabilistic classification
// between consecutive batches, with predicted labels carried forward.
//
// Importance weights come from unconstrained least-squares importance fitting
// (uLSIF) over Gaussian kernels centred on test points; the classifier solves
// one weighted kernel ridge problem per class.

#include "evl/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace evl {

struct LevelIwParams {
    double sigma = 1.0;
    double lambda = 0.1;
    int basis_count = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(sigma > 0.0)) throw InvalidArgument("level-iw: sigma must be positive");
        if (!(lambda >= 0.0)) throw InvalidArgument("level-iw: lambda must be non-negative");
        if (basis_count < 1) throw InvalidArgument("level-iw: basis count must be positive");
    }
};

struct PosteriorModel {
    PointSet centers;
    Eigen::MatrixXd coefficients;  ///< centers x classes
    LabelSet classes;
    double sigma = 1.0;
};

namespace detail {

inline Eigen::MatrixXd gaussian_kernel(const PointSet& rows, const PointSet& centers, double sigma) {
    const double scale = -1.0 / (2.0 * sigma * sigma);
    Eigen::MatrixXd K(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(centers.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t l = 0; l < centers.size(); ++l)
            K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
                std::exp(scale * squared_distance(rows[i], centers[l]));
    return K;
}

/// Solve (A + lambda I) x = B; throws SingularSystem when the factorization fails.
inline Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda) {
    Eigen::MatrixXd M = A;
    M.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularSystem("ridge system is singular");
    const Eigen::VectorXd dvals = ldlt.vectorD().cwiseAbs();
    if (dvals.minCoeff() <= 1e-14 * std::max(1.0, dvals.maxCoeff()))
        throw SingularSystem("ridge system is singular");
    return ldlt.solve(B);
}

}  // namespace detail

/// Density-ratio weights p_test(x)/p_train(x) at every training point.
/// Centers: min(b, |test|) test points drawn without replacement.
inline std::vector<double> ulsif_weights(const PointSet& train_x, const PointSet& test_x, double sigma,
                                         double lambda, int basis_count, std::uint64_t seed) {
    if (train_x.empty() || test_x.empty()) throw InvalidArgument("ulsif_weights: empty sample");
    if (!(sigma > 0.0)) throw InvalidArgument("ulsif_weights: sigma must be positive");
    if (basis_count < 1) throw InvalidArgument("ulsif_weights: basis count must be positive");

    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(basis_count), test_x.size());
    std::vector<std::size_t> idx(test_x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < b; ++i) std::swap(idx[i], idx[i + detail::uniform_index(rng, idx.size() - i)]);
    PointSet centers;
    centers.reserve(b);
    for (std::size_t i = 0; i < b; ++i) centers.push_back(test_x[idx[i]]);

    const Eigen::MatrixXd Ktr = detail::gaussian_kernel(train_x, centers, sigma);
    const Eigen::MatrixXd Kte = detail::gaussian_kernel(test_x, centers, sigma);
    const Eigen::MatrixXd H = (Ktr.transpose() * Ktr) / static_cast<double>(train_x.size());
    const Eigen::VectorXd h = Kte.colwise().mean().transpose();
    const Eigen::VectorXd beta = detail::ridge_solve(H, h, lambda);
    const Eigen::VectorXd w = (Ktr * beta).cwiseMax(0.0);
    return {w.data(), w.data() + w.size()};
}

/// Weighted kernel ridge fit of each class indicator, kernel centers at the
/// training points. `classes` fixes the output columns; a class missing from
/// train_y gets all-zero coefficients.
inline PosteriorModel iwlspc_fit(const PointSet& train_x, const LabelSet& train_y, const std::vector<double>& weights,
                                 double sigma, double lambda, LabelSet classes = {}) {
    if (train_x.empty()) throw InvalidArgument("iwlspc_fit: empty training set");
    if (train_x.size() != train_y.size() || train_x.size() != weights.size())
        throw InvalidArgument("iwlspc_fit: features, labels and weights differ in length");
    if (!(sigma > 0.0)) throw InvalidArgument("iwlspc_fit: sigma must be positive");
    if (classes.empty()) classes = detail::distinct_labels(train_y);

    const auto n = static_cast<Eigen::Index>(train_x.size());
    const Eigen::MatrixXd K = detail::gaussian_kernel(train_x, train_x, sigma);
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), n);
    const Eigen::MatrixXd WK = w.asDiagonal() * K;
    const Eigen::MatrixXd A = K.transpose() * WK;

    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(classes.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), train_y[static_cast<std::size_t>(i)]);
        if (it != classes.end() && *it == train_y[static_cast<std::size_t>(i)])
            targets(i, it - classes.begin()) = 1.0;
    }
    PosteriorModel model;
    model.centers = train_x;
    model.classes = std::move(classes);
    model.sigma = sigma;
    model.coefficients = detail::ridge_solve(A, WK.transpose() * targets, lambda);
    return model;
}

struct Posterior {
    Label label = 0;
    std::vector<double> probabilities;  ///< aligned with PosteriorModel::classes
};

/// Scores clipped at zero and normalized; uniform when every score clips.
inline Posterior iwlspc_predict(const PosteriorModel& model, const Point& x) {
    if (!model.centers.empty() && x.size() != model.centers.front().size())
        throw InvalidArgument("iwlspc_predict: feature dimension mismatch");
    const double scale = -1.0 / (2.0 * model.sigma * model.sigma);
    Eigen::VectorXd k(static_cast<Eigen::Index>(model.centers.size()));
    for (std::size_t l = 0; l < model.centers.size(); ++l)
        k[static_cast<Eigen::Index>(l)] = std::exp(scale * detail::squared_distance(model.centers[l], x));
    const Eigen::VectorXd scores = (model.coefficients.transpose() * k).cwiseMax(0.0);
    Posterior out;
    const double total = scores.sum();
    const std::size_t C = model.classes.size();
    out.probabilities.assign(C, C ? 1.0 / static_cast<double>(C) : 0.0);
    if (total > 0.0)
        for (std::size_t c = 0; c < C; ++c) out.probabilities[c] = scores[static_cast<Eigen::Index>(c)] / total;
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
        if (out.probabilities[c] > out.probabilities[best]) best = c;
    out.label = C ? model.classes[best] : 0;
    return out;
}

struct LevelIwState {
    PointSet previous_x;
    LabelSet previous_y;
    LabelSet classes;
    LevelIwParams params;
    std::uint64_t step = 0;
    std::size_t class_loss_events = 0;
};

inline LevelIwState leveliw_init(const LabeledSet& initial, const LevelIwParams& params) {
    if (initial.empty()) throw InvalidArgument("leveliw_init: empty initial labeled set");
    if (initial.points.size() != initial.labels.size())
        throw InvalidArgument("leveliw_init: labels do not match points");
    params.validate();
    LevelIwState s;
    s.previous_x = initial.points;
    s.previous_y = initial.labels;
    s.classes = detail::distinct_labels(initial.labels);
    s.params = params;
    return s;
}

struct LevelIwStepResult {
    LabelSet predictions;
    LevelIwState next;
};

inline LevelIwStepResult leveliw_step(const LevelIwState& state, const UnlabeledBatch& batch) {
    if (batch.points.empty()) throw InvalidArgument("leveliw_step: empty batch");
    const LevelIwParams& p = state.params;
    const std::uint64_t seed = detail::mix_seed(p.seed, state.step);

    std::vector<double> weights;
    double lambda = p.lambda;
    try {
        weights = ulsif_weights(state.previous_x, batch.points, p.sigma, lambda, p.basis_count, seed);
    } catch (const SingularSystem&) {
        lambda = std::max(lambda, 1e-6);
        weights = ulsif_weights(state.previous_x, batch.points, p.sigma, lambda, p.basis_count, seed);
    }
    PosteriorModel model;
    try {
        model = iwlspc_fit(state.previous_x, state.previous_y, weights, p.sigma, p.lambda, state.classes);
    } catch (const SingularSystem&) {
        model = iwlspc_fit(state.previous_x, state.previous_y, weights, p.sigma, std::max(p.lambda, 1e-6),
                           state.classes);
    }

    LevelIwStepResult out;
    out.predictions.reserve(batch.size());
    for (const auto& x : batch.points) out.predictions.push_back(iwlspc_predict(model, x).label);

    out.next = state;
    out.next.step = state.step + 1;
    const LabelSet before = detail::distinct_labels(state.previous_y);
    const LabelSet after = detail::distinct_labels(out.predictions);
    for (Label c : before)
        if (!std::binary_search(after.begin(), after.end(), c)) ++out.next.class_loss_events;
    out.next.previous_x = batch.points;
    out.next.previous_y = out.predictions;
    return out;
}

}  // namespace evl
