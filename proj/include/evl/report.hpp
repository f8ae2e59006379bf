#pragma once

// Report rendering: CSV records, Markdown tables, SVG accuracy-over-time plots.

#include "evl/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace evl {

struct SweepTable {
    std::string algorithm;
    std::string dataset;
    std::string parameter;
    std::vector<double> values;
    std::vector<RunResult> results;  ///< aligned with values
};

inline void to_json(nlohmann::json& j, const SweepTable& s) {
    j = nlohmann::json{{"algorithm", s.algorithm},
                       {"dataset", s.dataset},
                       {"parameter", s.parameter},
                       {"values", s.values},
                       {"results", s.results}};
}

inline void from_json(const nlohmann::json& j, SweepTable& s) {
    j.at("algorithm").get_to(s.algorithm);
    j.at("dataset").get_to(s.dataset);
    j.at("parameter").get_to(s.parameter);
    j.at("values").get_to(s.values);
    j.at("results").get_to(s.results);
}

struct ReportBundle {
    std::vector<RunResult> results;
    std::vector<SweepTable> sweeps;
    std::string output_dir;
};

inline void to_json(nlohmann::json& j, const ReportBundle& b) {
    j = nlohmann::json{{"results", b.results}, {"sweeps", b.sweeps}};
}

inline void from_json(const nlohmann::json& j, ReportBundle& b) {
    if (j.contains("results")) j.at("results").get_to(b.results);
    if (j.contains("sweeps")) j.at("sweeps").get_to(b.sweeps);
}

namespace detail {

inline std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// 1, 2.5, 3.3333: ranks as short as they can be written.
inline std::string rank_text(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", r);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Split one CSV record, honouring double-quoted fields.
inline std::vector<std::string> parse_csv_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted) throw DataError("unterminated quoted CSV field");
    out.push_back(std::move(cell));
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string file_stem(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DataError("bad number '" + s + "' in " + what);
    }
    if (used != s.size()) throw DataError("bad number '" + s + "' in " + what);
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw DataError("bad integer '" + s + "' in " + what);
    }
    if (used != s.size() || s.empty() || s[0] == '-') throw DataError("bad integer '" + s + "' in " + what);
    return v;
}

}  // namespace detail

inline constexpr const char* kRunsCsvHeader =
    "algorithm,fingerprint,dataset,dataset_fingerprint,seed,average_accuracy,wall_seconds,class_loss_events,"
    "per_batch_accuracy";

/// One row per run; per-batch accuracies are ';'-joined in the last column.
inline void write_runs_csv(const std::vector<RunResult>& results, std::ostream& out) {
    out << kRunsCsvHeader << '\n';
    for (const auto& r : results) {
        std::string series;
        for (std::size_t i = 0; i < r.per_batch_accuracy.size(); ++i) {
            if (i) series += ';';
            series += detail::full_precision(r.per_batch_accuracy[i]);
        }
        out << detail::csv_field(r.algorithm) << ',' << detail::csv_field(r.fingerprint) << ','
            << detail::csv_field(r.dataset) << ',' << detail::csv_field(r.dataset_fingerprint) << ',' << r.seed
            << ',' << detail::full_precision(r.average_accuracy) << ',' << detail::full_precision(r.wall_seconds)
            << ',' << r.class_loss_events << ',' << series << '\n';
    }
}

/// Inverse of write_runs_csv (predictions are not part of the record).
inline std::vector<RunResult> parse_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("runs CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRunsCsvHeader) throw DataError("runs CSV has an unexpected header");
    std::vector<RunResult> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::parse_csv_record(line);
        const std::string where = "runs CSV row " + std::to_string(row);
        if (cells.size() != 9)
            throw DataError(where + ": expected 9 columns, got " + std::to_string(cells.size()));
        RunResult r;
        r.algorithm = cells[0];
        r.fingerprint = cells[1];
        r.dataset = cells[2];
        r.dataset_fingerprint = cells[3];
        r.seed = detail::parse_unsigned(cells[4], where);
        r.average_accuracy = detail::parse_number(cells[5], where);
        r.wall_seconds = detail::parse_number(cells[6], where);
        r.class_loss_events = detail::parse_unsigned(cells[7], where);
        std::istringstream series(cells[8]);
        std::string item;
        while (std::getline(series, item, ';')) r.per_batch_accuracy.push_back(detail::parse_number(item, where));
        out.push_back(std::move(r));
    }
    return out;
}

/// Dataset rows, algorithm columns, value and rank per cell.
inline void write_rank_csv(const RankTable& table, std::ostream& out) {
    out << "dataset";
    for (const auto& a : table.algorithms) out << ',' << detail::csv_field(a) << ',' << detail::csv_field(a + " rank");
    out << '\n';
    for (const auto& ds : table.datasets) {
        out << detail::csv_field(ds);
        for (const auto& a : table.algorithms)
            out << ',' << detail::full_precision(table.score.at(ds).at(a)) << ','
                << detail::full_precision(table.rank.at(ds).at(a));
        out << '\n';
    }
    out << "average_rank";
    for (const auto& a : table.algorithms) out << ",," << detail::full_precision(table.average_rank.at(a));
    out << '\n';
}

inline void write_sweep_csv(const SweepTable& sweep, std::ostream& out) {
    out << "algorithm,dataset,parameter,value,average_accuracy,wall_seconds\n";
    for (std::size_t i = 0; i < sweep.values.size(); ++i)
        out << detail::csv_field(sweep.algorithm) << ',' << detail::csv_field(sweep.dataset) << ','
            << detail::csv_field(sweep.parameter) << ',' << detail::full_precision(sweep.values[i]) << ','
            << detail::full_precision(sweep.results[i].average_accuracy) << ','
            << detail::full_precision(sweep.results[i].wall_seconds) << '\n';
}

/// Rank-table layout: datasets down, algorithms across, "value(rank)" cells and
/// an average-rank footer. `decimals` formats the value; accuracies are percent.
inline std::string rank_table_markdown(const RankTable& table, const std::string& title, bool as_percent,
                                       int decimals = 2) {
    std::ostringstream md;
    md << "## " << title << "\n\n| DATASETS |";
    for (const auto& a : table.algorithms) md << ' ' << display_name(a) << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < table.algorithms.size(); ++i) md << "---|";
    md << '\n';
    for (const auto& ds : table.datasets) {
        md << "| " << ds << " |";
        for (const auto& a : table.algorithms) {
            const double v = table.score.at(ds).at(a) * (as_percent ? 100.0 : 1.0);
            md << ' ' << detail::fixed(v, decimals) << '(' << detail::rank_text(table.rank.at(ds).at(a)) << ") |";
        }
        md << '\n';
    }
    md << "| Average Rank (lower is better) |";
    for (const auto& a : table.algorithms) md << ' ' << detail::fixed(table.average_rank.at(a), 4) << " |";
    md << '\n';
    return md.str();
}

/// One row per swept value.
inline std::string sweep_markdown(const SweepTable& sweep) {
    std::ostringstream md;
    md << "## " << display_name(sweep.algorithm) << " sensitivity to " << sweep.parameter << " on " << sweep.dataset
       << "\n\n| " << sweep.parameter << " | Average accuracy (%) | Time (s) |\n|---|---|---|\n";
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        char v[32];
        std::snprintf(v, sizeof v, "%g", sweep.values[i]);
        md << "| " << v << " | " << detail::fixed(sweep.results[i].average_accuracy * 100.0, 2) << " | "
           << detail::fixed(sweep.results[i].wall_seconds, 2) << " |\n";
    }
    return md.str();
}

/// Accuracy against batch index, one polyline per run.
inline std::string accuracy_svg(const std::vector<const RunResult*>& runs, const std::string& title) {
    constexpr double W = 640, H = 360, left = 50, right = 20, top = 30, bottom = 40;
    std::size_t longest = 1;
    for (const auto* r : runs) longest = std::max(longest, r->per_batch_accuracy.size());
    const double span = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\">\n"
        << "<title>" << detail::xml_escape(title) << "</title>\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << (W / 2) << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">batch</text>\n"
        << "<text x=\"14\" y=\"" << (H / 2) << "\" transform=\"rotate(-90 14 " << (H / 2)
        << ")\" text-anchor=\"middle\">accuracy</text>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">1</text>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << H - bottom + 4 << "\" text-anchor=\"end\">0</text>\n";
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::size_t n = 0;
    for (const auto* r : runs) {
        svg << "<polyline fill=\"none\" stroke=\"" << colors[n++ % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < r->per_batch_accuracy.size(); ++i) {
            const double x = left + (W - left - right) * static_cast<double>(i) / span;
            const double y = (H - bottom) - (H - top - bottom) * std::clamp(r->per_batch_accuracy[i], 0.0, 1.0);
            svg << (i ? " " : "") << detail::fixed(x, 2) << ',' << detail::fixed(y, 2);
        }
        svg << "\"><title>" << detail::xml_escape(r->fingerprint) << "</title></polyline>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

/// Write runs.csv, accuracy/runtime rank CSVs, one CSV per sweep, tables.md and
/// one SVG per (algorithm, dataset). Everything is validated and rendered in
/// memory first, so a bad bundle leaves no files behind. Returns written paths.
inline std::vector<std::string> render_report(const ReportBundle& bundle) {
    if (bundle.results.empty() && bundle.sweeps.empty()) throw InvalidArgument("render_report: bundle is empty");
    if (bundle.output_dir.empty()) throw InvalidArgument("render_report: no output directory");
    auto check = [](const RunResult& r) {
        if (r.per_batch_accuracy.empty())
            throw InvalidArgument("render_report: run " + r.algorithm + " on " + r.dataset +
                                  " has an empty accuracy list");
    };
    for (const auto& r : bundle.results) check(r);
    for (const auto& s : bundle.sweeps) {
        if (s.values.size() != s.results.size() || s.values.empty())
            throw InvalidArgument("render_report: sweep values and results differ in length");
        for (const auto& r : s.results) check(r);
    }

    std::vector<std::pair<std::string, std::string>> files;
    std::string markdown;
    if (!bundle.results.empty()) {
        const RankTable acc = average_rank(bundle.results, RankMetric::accuracy);
        const RankTable time = average_rank(bundle.results, RankMetric::runtime);
        std::ostringstream runs, acc_csv, time_csv;
        write_runs_csv(bundle.results, runs);
        write_rank_csv(acc, acc_csv);
        write_rank_csv(time, time_csv);
        files.emplace_back("runs.csv", runs.str());
        files.emplace_back("accuracy_ranks.csv", acc_csv.str());
        files.emplace_back("runtime_ranks.csv", time_csv.str());
        markdown += rank_table_markdown(acc, "Average classification accuracy (%)", true) + "\n";
        markdown += rank_table_markdown(time, "Average execution time (in seconds)", false) + "\n";

        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& r : bundle.results)
            if (std::find(pairs.begin(), pairs.end(), std::make_pair(r.algorithm, r.dataset)) == pairs.end())
                pairs.emplace_back(r.algorithm, r.dataset);
        for (const auto& [algo, ds] : pairs) {
            std::vector<const RunResult*> runs_for;
            for (const auto& r : bundle.results)
                if (r.algorithm == algo && r.dataset == ds) runs_for.push_back(&r);
            files.emplace_back(detail::file_stem(algo + "__" + ds) + ".svg",
                               accuracy_svg(runs_for, display_name(algo) + " on " + ds));
        }
    }
    for (const auto& s : bundle.sweeps) {
        std::ostringstream csv;
        write_sweep_csv(s, csv);
        files.emplace_back(detail::file_stem("sweep_" + s.algorithm + "_" + s.parameter + "_" + s.dataset) + ".csv",
                           csv.str());
        markdown += sweep_markdown(s) + "\n";
    }
    files.emplace_back("tables.md", markdown);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(bundle.output_dir, ec);
    if (ec || !fs::is_directory(bundle.output_dir))
        throw DataError("cannot create output directory '" + bundle.output_dir + "'");
    std::vector<std::string> written;
    for (const auto& [name, content] : files) {
        const std::string path = (fs::path(bundle.output_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << content)) throw DataError("cannot write '" + path + "'");
        written.push_back(path);
    }
    return written;
}

}  // namespace evl
