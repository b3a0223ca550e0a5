#include "cotaudit/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "cotaudit/errors.hpp"

namespace cotaudit {

using json = nlohmann::json;

namespace {

std::vector<const AuditRecord*> completed_of(std::span<const AuditRecord> records) {
    std::vector<const AuditRecord*> out;
    for (const auto& r : records) {
        if (r.completed() && r.phi && r.similarity && r.violation) out.push_back(&r);
    }
    return out;
}

std::size_t bucket_of(double phi) {
    auto b = static_cast<std::size_t>(std::floor(phi * static_cast<double>(kPhiHistogramBuckets)));
    return std::min(b, kPhiHistogramBuckets - 1);
}

CategoryRow summarize(std::string category, std::string display, std::span<const AuditRecord* const> rows) {
    CategoryRow row;
    row.category = std::move(category);
    row.display_name = std::move(display);
    std::vector<AuditRecord> completed;
    for (const auto* r : rows) {
        if (r->completed()) {
            completed.push_back(*r);
        } else {
            ++row.n_failed;
        }
    }
    row.n_completed = completed.size();
    if (completed.empty()) return row;

    double sum_s = 0.0;
    for (const auto& r : completed) {
        sum_s += r.similarity->score;
        if (r.similarity->clamped) ++row.judge_clamped;
        ++row.phi_histogram[bucket_of(*r.phi)];
    }
    row.mean_phi = expected_faithfulness(completed);
    row.mean_similarity = sum_s / static_cast<double>(completed.size());
    row.rho = violation_density(completed);
    try {
        row.correlation = length_similarity_correlation(completed);
    } catch (const Error& e) {
        row.correlation_note = e.kind() + ": " + e.what();
    }
    return row;
}

json row_json(const CategoryRow& row) {
    json j = {{"category", row.category},
              {"display_name", row.display_name},
              {"n_completed", row.n_completed},
              {"n_failed", row.n_failed},
              {"judge_clamped", row.judge_clamped},
              {"phi_histogram", row.phi_histogram}};
    j["mean_phi"] = row.mean_phi ? json(*row.mean_phi) : json(nullptr);
    j["mean_s"] = row.mean_similarity ? json(*row.mean_similarity) : json(nullptr);
    if (row.rho) {
        j["rho"] = row.rho->value();
        j["violations"] = row.rho->violations;
        j["rho_fraction"] = row.rho->fraction();
        j["rho_percent"] = 100.0 * row.rho->value();
    } else {
        j["rho"] = nullptr;
        j["violations"] = nullptr;
        j["rho_fraction"] = nullptr;
        j["rho_percent"] = nullptr;
    }
    j["display"] = {{"mean_phi", row.mean_phi ? json(format_fixed(*row.mean_phi, 3)) : json(nullptr)},
                    {"mean_s", row.mean_similarity ? json(format_fixed(*row.mean_similarity, 3)) : json(nullptr)},
                    {"rho", row.rho ? json(format_fixed(row.rho->value(), 3)) : json(nullptr)}};
    if (row.correlation) {
        j["correlation"] = {{"pearson_r", row.correlation->pearson_r}, {"n", row.correlation->n}};
    } else {
        j["correlation"] = {{"pearson_r", nullptr}, {"n", nullptr}, {"note", row.correlation_note}};
    }
    return j;
}

}  // namespace

double expected_faithfulness(std::span<const AuditRecord> records) {
    auto completed = completed_of(records);
    if (completed.empty()) throw EmptyInput("expected faithfulness needs at least one completed audit");
    double sum = 0.0;
    for (const auto* r : completed) sum += *r->phi;
    return sum / static_cast<double>(completed.size());
}

ViolationDensity violation_density(std::span<const AuditRecord> records) {
    auto completed = completed_of(records);
    if (completed.empty()) throw EmptyInput("violation density needs at least one completed audit");
    ViolationDensity density;
    density.n = completed.size();
    for (const auto* r : completed) density.violations += *r->violation ? 1 : 0;
    return density;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson needs paired samples");
    const std::size_t n = x.size();
    if (n < 2) throw InsufficientData("pearson needs at least two pairs, got " + std::to_string(n));
    long double mx = 0.0L;
    long double my = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<long double>(n);
    my /= static_cast<long double>(n);
    long double sxx = 0.0L;
    long double syy = 0.0L;
    long double sxy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = x[i] - mx;
        const long double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0L) throw DegenerateVariance("first variable is constant");
    if (syy == 0.0L) throw DegenerateVariance("second variable is constant");
    const long double r = sxy / std::sqrt(sxx * syy);
    return {std::clamp(static_cast<double>(r), -1.0, 1.0), n};
}

Correlation length_similarity_correlation(std::span<const AuditRecord> records) {
    auto completed = completed_of(records);
    std::vector<double> lengths;
    std::vector<double> similarity;
    for (const auto* r : completed) {
        if (!r->original_trace) continue;
        lengths.push_back(static_cast<double>(r->original_trace->length()));
        similarity.push_back(r->similarity->score);
    }
    return pearson(lengths, similarity);
}

AggregateReport category_report(std::span<const AuditRecord> records) {
    AggregateReport report;
    std::map<TaskCategory, std::vector<const AuditRecord*>> groups;
    std::vector<const AuditRecord*> all;
    std::set<std::pair<double, double>> thresholds;
    std::set<std::string> scorers;
    for (const auto& r : records) {
        groups[r.query.category].push_back(&r);
        all.push_back(&r);
        thresholds.insert({r.thresholds.tau_sim, r.thresholds.lambda});
        if (!r.snapshot.scorer_kind.empty()) scorers.insert(r.snapshot.scorer_kind);
    }
    for (const auto& [category, rows] : groups) {
        report.rows.push_back(summarize(category.name(), category.display_name(), rows));
    }
    report.overall = summarize("overall", "Overall", all);
    for (const auto& [tau, lambda] : thresholds) report.thresholds.push_back({tau, lambda});
    report.scorer_kinds.assign(scorers.begin(), scorers.end());
    return report;
}

json to_json(const AggregateReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) rows.push_back(row_json(row));
    json thresholds = json::array();
    for (const auto& t : report.thresholds) thresholds.push_back({{"tau_sim", t.tau_sim}, {"lambda", t.lambda}});
    return {{"rows", rows},
            {"overall", row_json(report.overall)},
            {"correlation", row_json(report.overall)["correlation"]},
            {"thresholds", thresholds},
            {"scorer_kinds", report.scorer_kinds},
            {"histogram_buckets", kPhiHistogramBuckets}};
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::string to_markdown(const AggregateReport& report) {
    const std::vector<std::string> header = {"Category", "Completed", "Failed", "Mean Faithfulness (phi)",
                                             "Similarity (S)", "Violation Rate (rho)"};
    std::vector<std::vector<std::string>> cells;
    auto add = [&](const CategoryRow& row, bool bold) {
        auto dash = std::string("-");
        std::string name = bold ? "**" + row.display_name + "**" : row.display_name;
        std::string rho = row.rho ? format_fixed(row.rho->value(), 3) + " (" + row.rho->fraction() + ", " +
                                                  format_fixed(100.0 * row.rho->value(), 1) + "%)"
                                  : dash;
        cells.push_back({name, std::to_string(row.n_completed), std::to_string(row.n_failed),
                         row.mean_phi ? format_fixed(*row.mean_phi, 3) : dash,
                         row.mean_similarity ? format_fixed(*row.mean_similarity, 3) : dash, rho});
    };
    for (const auto& row : report.rows) add(row, false);
    add(report.overall, true);

    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
    }
    auto pad = [](const std::string& s, std::size_t w, bool right) {
        std::string fill(w - s.size(), ' ');
        return right ? fill + s : s + fill;
    };

    std::ostringstream out;
    out << "|";
    for (std::size_t c = 0; c < header.size(); ++c) out << ' ' << pad(header[c], width[c], false) << " |";
    out << "\n|";
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << ' ' << (c == 0 ? std::string(width[c], '-') : std::string(width[c] - 1, '-') + ":") << " |";
    }
    out << "\n";
    for (const auto& line : cells) {
        out << "|";
        for (std::size_t c = 0; c < line.size(); ++c) out << ' ' << pad(line[c], width[c], c != 0) << " |";
        out << "\n";
    }
    out << "\n";
    if (report.overall.correlation) {
        out << "Trace length vs. similarity: Pearson r = " << format_fixed(report.overall.correlation->pearson_r, 3)
            << " (n = " << report.overall.correlation->n << ")\n";
    } else {
        out << "Trace length vs. similarity: not computable (" << report.overall.correlation_note << ")\n";
    }
    for (const auto& t : report.thresholds) {
        out << "Thresholds: tau_sim = " << format_fixed(t.tau_sim, 3) << ", lambda = " << format_fixed(t.lambda, 3) << "\n";
    }
    if (!report.scorer_kinds.empty()) {
        out << "Scorer:";
        for (const auto& kind : report.scorer_kinds) out << ' ' << kind;
        out << "\n";
    }
    if (report.overall.judge_clamped > 0) out << "Judge scores clamped into [0, 1]: " << report.overall.judge_clamped << "\n";
    return out.str();
}

}  // namespace cotaudit
