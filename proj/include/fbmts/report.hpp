#pragma once

// JSON / CSV / Markdown renderings of analysis results. JSON documents carry
// a top-level "schema_version".

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fbmts/error.hpp"
#include "fbmts/hurst_estimate.hpp"
#include "fbmts/hypothesis_test.hpp"
#include "fbmts/pipeline.hpp"

namespace fbmts {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

enum class ReportFormat { json, csv, md };

inline ReportFormat parse_report_format(std::string_view text)
{
    if (text == "json") {
        return ReportFormat::json;
    }
    if (text == "csv") {
        return ReportFormat::csv;
    }
    if (text == "md") {
        return ReportFormat::md;
    }
    throw Error(ErrorKind::configuration, "unknown report format '" + std::string(text) + "'");
}

namespace detail {

template <typename T>
Json optional_json(const std::optional<T>& value)
{
    return value ? Json(*value) : Json(nullptr);
}

inline Json optional_json(const std::optional<Verdict>& value)
{
    return value ? Json(std::string(to_string(*value))) : Json(nullptr);
}

} // namespace detail

inline Json to_json(const HurstEstimate& estimate)
{
    Json grid = Json::array();
    for (const auto& point : estimate.grid) {
        grid.push_back(Json{{"hurst", point.hurst}, {"q", point.q}});
    }
    return Json{{"h_hat", estimate.h_hat},
                {"q_at_hat", estimate.q_at_hat},
                {"r1", estimate.r1},
                {"m", estimate.m},
                {"grid", std::move(grid)}};
}

inline Json to_json(const HypothesisStats& stats)
{
    return Json{{"m", stats.m},
                {"c", stats.c},
                {"a_n", stats.a_n},
                {"b_n", detail::optional_json(stats.b_n)},
                {"d_n", detail::optional_json(stats.d_n)},
                {"a_limit", stats.a_limit},
                {"delta", stats.delta},
                {"sigma", stats.sigma},
                {"beta0", stats.beta0},
                {"beta1", detail::optional_json(stats.beta1)},
                {"beta2", detail::optional_json(stats.beta2)},
                {"h_used", stats.h_used},
                {"verdict", std::string(to_string(stats.verdict))},
                {"branch", std::string(to_string(stats.branch))}};
}

inline Json to_json(const BuildingReport& report)
{
    Json out{{"building_id", report.building_id},
             {"quantity", std::string(to_string(report.quantity))},
             {"m", report.m},
             {"lambda", detail::optional_json(report.lambda)},
             {"achieved_ratio", detail::optional_json(report.achieved_ratio)},
             {"h_hat", detail::optional_json(report.h_hat)},
             {"q_at_hat", detail::optional_json(report.q_at_hat)},
             {"c", detail::optional_json(report.c)},
             {"a_n", detail::optional_json(report.a_n)},
             {"a_limit", detail::optional_json(report.a_limit)},
             {"delta", detail::optional_json(report.delta)},
             {"b_n", detail::optional_json(report.b_n)},
             {"d_n", detail::optional_json(report.d_n)},
             {"beta0", detail::optional_json(report.beta0)},
             {"beta1", detail::optional_json(report.beta1)},
             {"beta2", detail::optional_json(report.beta2)},
             {"verdict", detail::optional_json(report.verdict)}};
    if (report.classification) {
        out["persistence"] = std::string(to_string(report.classification->persistence));
        out["memory_class"] = std::string(to_string(report.classification->memory));
        out["noise_label"] = std::string(to_string(report.classification->noise));
        out["forecastable"] = report.classification->forecastable;
    }
    else {
        out["persistence"] = nullptr;
        out["memory_class"] = nullptr;
        out["noise_label"] = nullptr;
        out["forecastable"] = nullptr;
    }
    out["warnings"] = report.warnings;
    return out;
}

namespace detail {

inline const std::vector<std::string>& report_columns()
{
    static const std::vector<std::string> columns{
        "building_id", "quantity", "m",     "lambda", "achieved_ratio", "h_hat",       "q_at_hat",
        "c",           "a_n",      "a_limit", "delta", "b_n",           "d_n",         "beta0",
        "beta1",       "beta2",    "verdict", "persistence", "memory_class", "noise_label", "forecastable",
        "warnings"};
    return columns;
}

inline std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        out += ch;
        if (ch == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

inline std::string csv_cell(const Json& value)
{
    if (value.is_null()) {
        return {};
    }
    if (value.is_string()) {
        return csv_escape(value.get<std::string>());
    }
    if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
            if (!joined.empty()) {
                joined += "; ";
            }
            joined += item.get<std::string>();
        }
        return csv_escape(joined);
    }
    return value.dump();
}

inline std::string md_number(const std::optional<double>& value)
{
    if (!value) {
        return "-";
    }
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", *value);
    return buffer;
}

inline std::string md_escape(const std::string& text)
{
    std::string out;
    for (char ch : text) {
        if (ch == '|') {
            out += "\\|";
        }
        else if (ch == '\n') {
            out += ' ';
        }
        else {
            out += ch;
        }
    }
    return out;
}

} // namespace detail

inline std::string render_json(std::span<const BuildingReport> reports)
{
    Json doc{{"schema_version", kSchemaVersion}, {"reports", Json::array()}};
    for (const auto& report : reports) {
        doc["reports"].push_back(to_json(report));
    }
    return doc.dump(2) + "\n";
}

inline std::string render_csv(std::span<const BuildingReport> reports)
{
    std::ostringstream out;
    const auto& columns = detail::report_columns();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << columns[i];
    }
    out << "\n";
    for (const auto& report : reports) {
        const auto row = to_json(report);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << detail::csv_cell(row.at(columns[i]));
        }
        out << "\n";
    }
    return out.str();
}

/// Table with the columns Ĥ, A_n, B_n, A, β₁, β₂ and the verdict.
inline std::string render_markdown(std::span<const BuildingReport> reports)
{
    std::ostringstream out;
    out << "| Building | Quantity | m | Ĥ | A_n | B_n | D_n | A | β₁ | β₂ | Verdict | Forecastable | Warnings |\n";
    out << "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---|---|---|\n";
    for (const auto& r : reports) {
        std::string warnings;
        for (const auto& w : r.warnings) {
            warnings += (warnings.empty() ? "" : "; ") + w;
        }
        out << "| " << detail::md_escape(r.building_id) << " | " << to_string(r.quantity) << " | " << r.m << " | "
            << detail::md_number(r.h_hat) << " | " << detail::md_number(r.a_n) << " | " << detail::md_number(r.b_n)
            << " | " << detail::md_number(r.d_n) << " | " << detail::md_number(r.a_limit) << " | "
            << detail::md_number(r.beta1) << " | " << detail::md_number(r.beta2) << " | "
            << (r.verdict ? std::string(to_string(*r.verdict)) : "-") << " | "
            << (r.classification ? (r.classification->forecastable ? "yes" : "no") : "-") << " | "
            << detail::md_escape(warnings) << " |\n";
    }
    return out.str();
}

/// Rows are ordered by (building_id, quantity) whatever the input order.
inline std::string render_report(std::span<const BuildingReport> reports, ReportFormat format)
{
    std::vector<BuildingReport> ordered(reports.begin(), reports.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const BuildingReport& a, const BuildingReport& b) {
        return std::tie(a.building_id, a.quantity) < std::tie(b.building_id, b.quantity);
    });
    switch (format) {
    case ReportFormat::json: return render_json(ordered);
    case ReportFormat::csv: return render_csv(ordered);
    case ReportFormat::md: return render_markdown(ordered);
    }
    return {};
}

} // namespace fbmts
