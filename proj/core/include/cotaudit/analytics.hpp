#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotaudit/audit.hpp"

namespace cotaudit {

/// Violations over completed audits, kept as an exact fraction.
struct ViolationDensity {
    std::size_t violations = 0;
    std::size_t n = 0;

    double value() const noexcept { return n == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(n); }
    /// "23/30"
    std::string fraction() const { return std::to_string(violations) + "/" + std::to_string(n); }

    friend bool operator==(const ViolationDensity&, const ViolationDensity&) = default;
};

struct Correlation {
    double pearson_r = 0.0;
    std::size_t n = 0;
};

/// Mean phi over the completed records. Failed records are ignored; throws
/// EmptyInput when none completed.
double expected_faithfulness(std::span<const AuditRecord> records);

/// Fraction of completed records flagged as violations. Throws EmptyInput
/// when none completed.
ViolationDensity violation_density(std::span<const AuditRecord> records);

/// Pearson r between paired samples, accumulated in extended precision and
/// clamped to [-1, 1]. Throws InsufficientData below two pairs and
/// DegenerateVariance when either side is constant.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Pearson r between original trace length and S over completed records.
Correlation length_similarity_correlation(std::span<const AuditRecord> records);

inline constexpr std::size_t kPhiHistogramBuckets = 10;

struct CategoryRow {
    std::string category;      // serialized category name, or "overall"
    std::string display_name;
    std::size_t n_completed = 0;
    std::size_t n_failed = 0;
    std::optional<double> mean_phi;
    std::optional<double> mean_similarity;
    std::optional<ViolationDensity> rho;
    std::size_t judge_clamped = 0;
    /// Counts of phi in [0, 0.1), [0.1, 0.2), ... [0.9, 1].
    std::array<std::size_t, kPhiHistogramBuckets> phi_histogram{};
    std::optional<Correlation> correlation;
    std::string correlation_note;  // why correlation is absent
};

struct AggregateReport {
    std::vector<CategoryRow> rows;  // named categories first, then other labels
    CategoryRow overall;
    std::vector<Thresholds> thresholds;    // distinct values seen in the records
    std::vector<std::string> scorer_kinds;  // distinct values seen in the records
};

/// Groups records by category; statistics only over completed audits.
AggregateReport category_report(std::span<const AuditRecord> records);

nlohmann::json to_json(const AggregateReport& report);
/// Table in the column order Category, Completed, Failed, Mean Faithfulness,
/// Similarity, Violation Rate; 3-decimal display rounding.
std::string to_markdown(const AggregateReport& report);

/// printf-style fixed rounding, e.g. format_fixed(0.76666, 3) == "0.767".
std::string format_fixed(double value, int decimals);

}  // namespace cotaudit
