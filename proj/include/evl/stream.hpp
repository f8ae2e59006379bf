#pragma once

// Synthetic drifting streams and CSV ingestion.

#include "evl/types.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace evl {

enum class Family {
    translating_gaussians,
    rotating_classes,
    crossing_surround,
    multimodal_gaussians,
    gears_ring,
};

inline constexpr std::array<std::pair<Family, std::string_view>, 5> kFamilyNames{{
    {Family::translating_gaussians, "translating-gaussians"},
    {Family::rotating_classes, "rotating-classes"},
    {Family::crossing_surround, "crossing-surround"},
    {Family::multimodal_gaussians, "multimodal-gaussians"},
    {Family::gears_ring, "gears-ring"},
}};

inline std::string to_string(Family f) {
    for (const auto& [family, name] : kFamilyNames)
        if (family == f) return std::string(name);
    return "unknown";
}

inline Family family_from_string(std::string_view name) {
    for (const auto& [family, n] : kFamilyNames)
        if (n == name) return family;
    throw InvalidArgument("unknown stream family '" + std::string(name) + "'");
}

/// Parameters of a synthetic stream. Distances are in units of the initial
/// inter-class spacing (1.0); class_overlap is the isotropic component std-dev.
struct StreamSpec {
    Family family = Family::translating_gaussians;
    int class_count = 2;
    int modes_per_class = 1;
    int dimension = 2;
    long total_instances = 15000;  ///< unlabeled instances, excluding the labeled initial batch
    long batch_size = 150;
    double drift_rate = 0.0;
    double class_overlap = 0.1;
    std::uint64_t seed = 0;

    long batch_count() const { return batch_size > 0 ? total_instances / batch_size : 0; }

    void validate() const {
        if (batch_size <= 0) throw InvalidArgument("batch_size must be positive");
        if (total_instances <= 0) throw InvalidArgument("total_instances must be positive");
        if (total_instances % batch_size != 0)
            throw InvalidArgument("total_instances must be a multiple of batch_size");
        if (class_count < 2) throw InvalidArgument("class_count must be at least 2");
        if (modes_per_class < 1) throw InvalidArgument("modes_per_class must be positive");
        if (dimension < 1) throw InvalidArgument("dimension must be positive");
        if (drift_rate < 0.0) throw InvalidArgument("drift_rate must be non-negative");
        if (class_overlap < 0.0) throw InvalidArgument("class_overlap must be non-negative");
        if (family != Family::translating_gaussians && dimension < 2)
            throw InvalidArgument("family " + to_string(family) + " requires dimension >= 2");
        if (family == Family::multimodal_gaussians && modes_per_class < 2)
            throw InvalidArgument("multimodal-gaussians requires modes_per_class >= 2");
        if (batch_size < static_cast<long>(class_count) * modes_per_class)
            throw InvalidArgument("batch_size must cover every class and mode at least once");
    }
};

inline void to_json(nlohmann::json& j, const StreamSpec& s) {
    j = nlohmann::json{{"family", to_string(s.family)},
                       {"class_count", s.class_count},
                       {"modes_per_class", s.modes_per_class},
                       {"dimension", s.dimension},
                       {"total_instances", s.total_instances},
                       {"batch_size", s.batch_size},
                       {"drift_rate", s.drift_rate},
                       {"class_overlap", s.class_overlap},
                       {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, StreamSpec& s) {
    static constexpr std::array<std::string_view, 9> kFields{
        "family",          "class_count", "modes_per_class", "dimension",   "total_instances",
        "batch_size",      "drift_rate",  "class_overlap",   "seed"};
    if (!j.is_object()) throw DataError("stream spec must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(kFields.begin(), kFields.end(), it.key()) == kFields.end())
            throw DataError("unknown stream spec field '" + it.key() + "'");
    }
    try {
        s.family = family_from_string(j.at("family").get<std::string>());
        s.class_count = j.at("class_count").get<int>();
        s.modes_per_class = j.at("modes_per_class").get<int>();
        s.dimension = j.at("dimension").get<int>();
        s.total_instances = j.at("total_instances").get<long>();
        s.batch_size = j.at("batch_size").get<long>();
        s.drift_rate = j.at("drift_rate").get<double>();
        s.class_overlap = j.at("class_overlap").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid stream spec: ") + e.what());
    }
}

/// An initially labeled stream followed by unlabeled batches. Immutable once built.
/// Learners only ever receive `initial_labeled()` and `next_batch(t)`; ground truth
/// for batch t is reachable solely through `hidden_labels(t)`, which the harness
/// uses for scoring.
class DriftStream {
  public:
    DriftStream() = default;
    DriftStream(LabeledSet initial, std::vector<UnlabeledBatch> batches, std::vector<LabelSet> hidden,
                int modes_per_class, std::string id)
        : initial_(std::move(initial)),
          batches_(std::move(batches)),
          hidden_(std::move(hidden)),
          modes_per_class_(modes_per_class),
          id_(std::move(id)) {
        if (batches_.size() != hidden_.size()) throw InvalidArgument("hidden labels must align with batches");
        for (std::size_t t = 0; t < batches_.size(); ++t)
            if (batches_[t].size() != hidden_[t].size())
                throw InvalidArgument("hidden labels must align with batch " + std::to_string(t));
        if (initial_.points.size() != initial_.labels.size())
            throw InvalidArgument("initial labeled set has mismatched labels");
        classes_ = detail::distinct_labels(initial_.labels);
    }

    const LabeledSet& initial_labeled() const { return initial_; }

    const UnlabeledBatch& next_batch(std::size_t t) const {
        if (t >= batches_.size())
            throw InvalidArgument("batch index " + std::to_string(t) + " out of range (" +
                                  std::to_string(batches_.size()) + " batches)");
        return batches_[t];
    }

    const LabelSet& hidden_labels(std::size_t t) const {
        if (t >= hidden_.size()) throw InvalidArgument("batch index " + std::to_string(t) + " out of range");
        return hidden_[t];
    }

    std::size_t batch_count() const { return batches_.size(); }
    int dimension() const {
        if (!initial_.empty()) return static_cast<int>(initial_.points.front().size());
        return batches_.empty() || batches_.front().points.empty()
                   ? 0
                   : static_cast<int>(batches_.front().points.front().size());
    }
    const LabelSet& classes() const { return classes_; }
    int modes_per_class() const { return modes_per_class_; }
    const std::string& id() const { return id_; }

    /// Copy with every hidden label replaced by `transform(label)`; features untouched.
    template <class F>
    DriftStream with_relabeled_hidden(F transform) const {
        DriftStream copy(*this);
        for (auto& batch : copy.hidden_)
            for (auto& y : batch) y = transform(y);
        return copy;
    }

    /// Copy with every feature vector mapped through `transform`.
    template <class F>
    DriftStream with_transformed_features(F transform) const {
        DriftStream copy(*this);
        for (auto& p : copy.initial_.points) p = transform(p);
        for (auto& batch : copy.batches_)
            for (auto& p : batch.points) p = transform(p);
        return copy;
    }

  private:
    LabeledSet initial_;
    std::vector<UnlabeledBatch> batches_;
    std::vector<LabelSet> hidden_;
    LabelSet classes_;
    int modes_per_class_ = 1;
    std::string id_;
};

namespace detail {

constexpr double kPi = std::numbers::pi;

/// Planar center of component (class c, mode m) at time step t (t = 0 is the labeled batch).
inline Eigen::Vector2d component_center(const StreamSpec& s, int c, int m, long t) {
    const int C = s.class_count;
    const int M = s.modes_per_class;
    const double step = s.drift_rate * static_cast<double>(t);
    const double mode_offset = 2.0 * (static_cast<double>(m) - 0.5 * (M - 1));
    switch (s.family) {
        case Family::translating_gaussians: {
            // Classes start one unit apart on the x axis and move diagonally toward
            // the middle; two classes meet after 1/(sqrt(2)*rate) steps.
            const double x0 = static_cast<double>(c) - 0.5 * (C - 1);
            const double side = x0 > 0 ? 1.0 : (x0 < 0 ? -1.0 : 0.0);
            const double along = step / std::numbers::sqrt2;
            return {x0 - side * along, mode_offset + along};
        }
        case Family::rotating_classes: {
            const double radius = 0.5 / std::sin(kPi / C);
            const double angle = 2.0 * kPi * c / C + step;
            const double r = radius + 2.0 * m;
            return {r * std::cos(angle), r * std::sin(angle)};
        }
        case Family::crossing_surround: {
            if (c == 0) return {std::sin(step), mode_offset};
            const double angle = step + 2.0 * kPi * (c - 1) / (C - 1);
            const double r = 1.0 + 2.0 * m;
            return {r * std::cos(angle), r * std::sin(angle)};
        }
        case Family::multimodal_gaussians: {
            const int n = C * M;
            const int j = m * C + c;
            const double radius = 0.5 / std::sin(kPi / n) + step;
            const double angle = 2.0 * kPi * j / n;
            return {radius * std::cos(angle), radius * std::sin(angle)};
        }
        case Family::gears_ring: {
            if (c == 0) return {0.0, 0.0};
            const double direction = (c % 2 == 1) ? 1.0 : -1.0;
            const double angle = 2.0 * kPi * m / M + direction * step;
            return {std::cos(angle) * c, std::sin(angle) * c};
        }
    }
    return {0.0, 0.0};
}

template <class Rng>
Point sample_component(const StreamSpec& s, int c, int m, long t, Rng& rng) {
    Point x(s.dimension);
    const double sd = s.class_overlap;
    if (s.family == Family::gears_ring && c > 0) {
        // Ring of radius c; each mode is an angular "tooth" turning with the ring.
        const int M = s.modes_per_class;
        const double direction = (c % 2 == 1) ? 1.0 : -1.0;
        const double center = 2.0 * kPi * m / M + direction * s.drift_rate * static_cast<double>(t);
        const double angle = center + standard_normal(rng) * (kPi / (2.0 * M));
        const double rho = c + sd * standard_normal(rng);
        x[0] = rho * std::cos(angle);
        x[1] = rho * std::sin(angle);
        for (int k = 2; k < s.dimension; ++k) x[k] = sd * standard_normal(rng);
        return x;
    }
    const Eigen::Vector2d center = component_center(s, c, m, t);
    if (s.dimension == 1) {
        // Only translating-gaussians reaches here: motion along the single axis.
        const double x0 = static_cast<double>(c) - 0.5 * (s.class_count - 1);
        const double side = x0 > 0 ? 1.0 : (x0 < 0 ? -1.0 : 0.0);
        x[0] = x0 - side * s.drift_rate * static_cast<double>(t) + sd * standard_normal(rng);
        return x;
    }
    x[0] = center.x() + sd * standard_normal(rng);
    x[1] = center.y() + sd * standard_normal(rng);
    for (int k = 2; k < s.dimension; ++k) x[k] = sd * standard_normal(rng);
    return x;
}

template <class Rng>
LabeledSet sample_time_step(const StreamSpec& s, long t, Rng& rng) {
    const int components = s.class_count * s.modes_per_class;
    std::vector<int> order(static_cast<std::size_t>(s.batch_size));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i % components);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    LabeledSet out;
    out.points.reserve(order.size());
    out.labels.reserve(order.size());
    for (int component : order) {
        const int c = component % s.class_count;
        const int m = component / s.class_count;
        out.points.push_back(sample_component(s, c, m, t, rng));
        out.labels.push_back(c);
    }
    return out;
}

inline std::string spec_id(const StreamSpec& s) {
    std::ostringstream os;
    os << to_string(s.family) << "_" << s.class_count << "C_" << s.dimension << "D_seed" << s.seed;
    return os.str();
}

}  // namespace detail

/// Draw a stream: one labeled batch at time 0, then total_instances/batch_size
/// unlabeled batches at times 1..T. Class labels are 0..class_count-1.
inline DriftStream generate_stream(const StreamSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    LabeledSet initial = detail::sample_time_step(spec, 0, rng);
    const long T = spec.batch_count();
    std::vector<UnlabeledBatch> batches;
    std::vector<LabelSet> hidden;
    batches.reserve(static_cast<std::size_t>(T));
    hidden.reserve(static_cast<std::size_t>(T));
    for (long t = 1; t <= T; ++t) {
        LabeledSet step = detail::sample_time_step(spec, t, rng);
        batches.push_back(UnlabeledBatch{std::move(step.points)});
        hidden.push_back(std::move(step.labels));
    }
    return DriftStream(std::move(initial), std::move(batches), std::move(hidden), spec.modes_per_class,
                       detail::spec_id(spec));
}

/// Class-conditional component centers at time t (dims 0-1; used by tests and plots).
inline std::vector<Eigen::Vector2d> class_centers(const StreamSpec& spec, long t) {
    std::vector<Eigen::Vector2d> out;
    for (int c = 0; c < spec.class_count; ++c) {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int m = 0; m < spec.modes_per_class; ++m) sum += detail::component_center(spec, c, m, t);
        out.push_back(sum / spec.modes_per_class);
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_double_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const std::string t = trim(cell);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size())
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                        ": non-numeric value '" + t + "'");
    return v;
}

inline int parse_label_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const std::string t = trim(cell);
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size())
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                        ": label must be an integer, got '" + t + "'");
    return static_cast<int>(v);
}

}  // namespace detail

/// Read a chronological CSV (d feature columns then an integer label column).
/// The first `labeled_prefix_count` rows form the labeled set; the rest are cut
/// into batches of `batch_size`, the last one possibly short. Rows are 1-based in
/// error messages and count the header line when present.
inline DriftStream load_csv_stream(const std::string& path, long labeled_prefix_count, long batch_size,
                                   bool header = false) {
    if (labeled_prefix_count <= 0) throw InvalidArgument("labeled prefix count must be positive");
    if (batch_size <= 0) throw InvalidArgument("batch_size must be positive");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    PointSet points;
    LabelSet labels;
    std::string line;
    std::size_t row = 0;
    std::size_t arity = 0;
    while (std::getline(in, line)) {
        ++row;
        if (header && row == 1) continue;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (arity == 0) {
            if (cells.size() < 2)
                throw DataError("row " + std::to_string(row) + ": label column missing (need features then label)");
            arity = cells.size();
        } else if (cells.size() != arity) {
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(arity) +
                            " columns, got " + std::to_string(cells.size()));
        }
        Point x(static_cast<Eigen::Index>(arity - 1));
        for (std::size_t col = 0; col + 1 < arity; ++col)
            x[static_cast<Eigen::Index>(col)] = detail::parse_double_cell(cells[col], row, col + 1);
        points.push_back(std::move(x));
        labels.push_back(detail::parse_label_cell(cells[arity - 1], row, arity));
    }
    if (points.empty()) throw DataError("'" + path + "' contains no rows");
    if (static_cast<std::size_t>(labeled_prefix_count) > points.size())
        throw DataError("labeled prefix count " + std::to_string(labeled_prefix_count) + " exceeds row count " +
                        std::to_string(points.size()) + " in '" + path + "'");

    const auto prefix = static_cast<std::size_t>(labeled_prefix_count);
    LabeledSet initial;
    initial.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(prefix));
    initial.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(prefix));
    std::vector<UnlabeledBatch> batches;
    std::vector<LabelSet> hidden;
    for (std::size_t start = prefix; start < points.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(points.size(), start + static_cast<std::size_t>(batch_size));
        UnlabeledBatch b;
        b.points.assign(points.begin() + static_cast<std::ptrdiff_t>(start),
                        points.begin() + static_cast<std::ptrdiff_t>(end));
        batches.push_back(std::move(b));
        hidden.emplace_back(labels.begin() + static_cast<std::ptrdiff_t>(start),
                            labels.begin() + static_cast<std::ptrdiff_t>(end));
    }
    std::string id = path;
    if (const auto slash = id.find_last_of('/'); slash != std::string::npos) id = id.substr(slash + 1);
    return DriftStream(std::move(initial), std::move(batches), std::move(hidden), 1, id);
}

/// Write the labeled batch then every batch with its ground truth, in the layout
/// `load_csv_stream` reads. Values are printed with round-trip precision.
inline void write_csv_stream(const DriftStream& stream, std::ostream& out) {
    auto emit = [&out](const Point& x, Label y) {
        char buf[40];
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", x[k]);
            out << buf << ',';
        }
        out << y << '\n';
    };
    const auto& init = stream.initial_labeled();
    for (std::size_t i = 0; i < init.size(); ++i) emit(init.points[i], init.labels[i]);
    for (std::size_t t = 0; t < stream.batch_count(); ++t) {
        const auto& b = stream.next_batch(t);
        const auto& y = stream.hidden_labels(t);
        for (std::size_t i = 0; i < b.size(); ++i) emit(b.points[i], y[i]);
    }
}

/// Per-feature min-max scaling to [0,1], fitted on every feature vector of the
/// stream (labels are not consulted). Constant features map to 0.
inline DriftStream minmax_normalized(const DriftStream& stream) {
    const int d = stream.dimension();
    Point lo = Point::Constant(d, std::numeric_limits<double>::infinity());
    Point hi = Point::Constant(d, -std::numeric_limits<double>::infinity());
    auto visit = [&](const Point& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    for (const auto& p : stream.initial_labeled().points) visit(p);
    for (std::size_t t = 0; t < stream.batch_count(); ++t)
        for (const auto& p : stream.next_batch(t).points) visit(p);
    Point span = hi - lo;
    for (int k = 0; k < d; ++k)
        if (!(span[k] > 0.0)) span[k] = 1.0;
    return stream.with_transformed_features([&](const Point& p) -> Point {
        return (p - lo).cwiseQuotient(span);
    });
}

}  // namespace evl
