#pragma once

#include "evl/kmeans.hpp"
#include "evl/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace evl {

/// Mixture parameters: weights sum to one, covariances symmetric positive-definite.
struct GmmModel {
    std::vector<double> weights;
    PointSet means;
    std::vector<Eigen::MatrixXd> covariances;

    int components() const { return static_cast<int>(weights.size()); }
    int dimension() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
};

struct GmmOptions {
    int max_iter = 200;
    double tol = 1e-8;         ///< stop once the log-likelihood gain drops below this
    double cov_floor = 1e-6;   ///< minimum covariance eigenvalue
};

struct GmmFit {
    GmmModel model;
    std::vector<double> loglik_trace;  ///< total log-likelihood before each M-step, then final
};

namespace detail {

/// Raise every eigenvalue of a symmetric matrix to at least `floor`; untouched otherwise.
inline Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& cov, double floor) {
    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() >= floor) return sym;
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Caches Cholesky factors so many points can be scored against one model.
class GmmScorer {
  public:
    explicit GmmScorer(const GmmModel& model) : model_(model) {
        const double d = model.dimension();
        for (int k = 0; k < model.components(); ++k) {
            Eigen::LLT<Eigen::MatrixXd> llt(model.covariances[static_cast<std::size_t>(k)]);
            if (llt.info() != Eigen::Success) throw InvalidArgument("gmm: covariance is not positive-definite");
            const Eigen::MatrixXd L = llt.matrixL();
            const double log_det = 2.0 * L.diagonal().array().log().sum();
            const double w = model.weights[static_cast<std::size_t>(k)];
            log_norm_.push_back((w > 0 ? std::log(w) : -std::numeric_limits<double>::infinity()) -
                                0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det));
            factors_.push_back(std::move(llt));
        }
    }

    /// log N(x; mu_k, Sigma_k) + log pi_k for every component.
    void component_log_terms(const Point& x, std::vector<double>& out) const {
        out.resize(factors_.size());
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            const Eigen::VectorXd z = factors_[k].matrixL().solve(x - model_.means[k]);
            out[k] = log_norm_[k] - 0.5 * z.squaredNorm();
        }
    }

    double logpdf(const Point& x) const {
        if (x.size() != model_.dimension())
            throw InvalidArgument("gmm_logpdf: point has dimension " + std::to_string(x.size()) + ", model has " +
                                  std::to_string(model_.dimension()));
        std::vector<double> terms;
        component_log_terms(x, terms);
        return log_sum_exp(terms);
    }

    static double log_sum_exp(const std::vector<double>& terms) {
        double peak = -std::numeric_limits<double>::infinity();
        for (double t : terms) peak = std::max(peak, t);
        if (!std::isfinite(peak)) return peak;
        double s = 0.0;
        for (double t : terms) s += std::exp(t - peak);
        return peak + std::log(s);
    }

  private:
    const GmmModel& model_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
    std::vector<double> log_norm_;
};

/// log of sum_k pi_k N(x; mu_k, Sigma_k), evaluated with log-sum-exp.
inline double gmm_logpdf(const GmmModel& model, const Point& x) { return GmmScorer(model).logpdf(x); }

/// EM from a k-means start. Log-likelihood is non-decreasing per iteration.
inline GmmFit gmm_fit_traced(const PointSet& points, int K, const GmmOptions& opt, std::uint64_t seed) {
    if (points.empty()) throw InvalidArgument("gmm_fit: empty input");
    if (K < 1) throw InvalidArgument("gmm_fit: K must be at least 1");
    if (static_cast<std::size_t>(K) > points.size())
        throw InvalidArgument("gmm_fit: K=" + std::to_string(K) + " exceeds point count " +
                              std::to_string(points.size()));

    const std::size_t n = points.size();
    const Eigen::Index d = points.front().size();
    const auto Ku = static_cast<std::size_t>(K);

    GmmFit fit;
    GmmModel& model = fit.model;
    std::vector<std::vector<double>> resp(n, std::vector<double>(Ku, 0.0));
    if (K == 1) {
        for (auto& r : resp) r[0] = 1.0;
    } else {
        const KMeansModel km = kmeans(points, K, KMeansOptions{}, seed);
        for (std::size_t i = 0; i < n; ++i) resp[i][static_cast<std::size_t>(km.assignment[i])] = 1.0;
    }

    auto m_step = [&]() {
        model.weights.assign(Ku, 0.0);
        model.means.assign(Ku, Point::Zero(d));
        model.covariances.assign(Ku, Eigen::MatrixXd::Zero(d, d));
        for (std::size_t k = 0; k < Ku; ++k) {
            double nk = 0.0;
            Point mean = Point::Zero(d);
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i][k];
                mean += resp[i][k] * points[i];
            }
            if (nk <= std::numeric_limits<double>::min()) {
                // Dead component: park it on the data mean with unit spread and no weight.
                Point all = Point::Zero(d);
                for (const auto& p : points) all += p;
                model.means[k] = all / static_cast<double>(n);
                model.covariances[k] = Eigen::MatrixXd::Identity(d, d);
                continue;
            }
            mean /= nk;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
            for (std::size_t i = 0; i < n; ++i) {
                const Point diff = points[i] - mean;
                cov.noalias() += resp[i][k] * diff * diff.transpose();
            }
            cov /= nk;
            model.weights[k] = nk / static_cast<double>(n);
            model.means[k] = std::move(mean);
            model.covariances[k] = detail::floor_eigenvalues(cov, opt.cov_floor);
        }
        double total = 0.0;
        for (double w : model.weights) total += w;
        for (double& w : model.weights) w /= total;
    };

    auto e_step = [&]() {
        GmmScorer scorer(model);
        std::vector<double> terms;
        double loglik = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            scorer.component_log_terms(points[i], terms);
            const double lse = GmmScorer::log_sum_exp(terms);
            loglik += lse;
            for (std::size_t k = 0; k < Ku; ++k) resp[i][k] = std::exp(terms[k] - lse);
        }
        return loglik;
    };

    m_step();
    double prev = e_step();
    fit.loglik_trace.push_back(prev);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        m_step();
        const double cur = e_step();
        fit.loglik_trace.push_back(cur);
        if (cur - prev < opt.tol) break;
        prev = cur;
    }
    return fit;
}

inline GmmModel gmm_fit(const PointSet& points, int K, int max_iter, double tol, double cov_floor,
                        std::uint64_t seed) {
    GmmOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    opt.cov_floor = cov_floor;
    return gmm_fit_traced(points, K, opt, seed).model;
}

}  // namespace evl
