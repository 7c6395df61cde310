#pragma once

#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mapn {

struct ReportVariant {
    std::size_t rank = 0; // 1-based
    std::string key;
    std::vector<std::string> channels;
    Evaluations evals;
    bool feasible = true;
};

struct ReportStats {
    std::size_t processes = 0;
    std::size_t channels = 0;
    std::size_t colors = 0;
    std::size_t forks = 0;
    std::size_t joins = 0;
    /// Variants considered before constraints and truncation.
    std::uint64_t variants = 0;
};

struct Report {
    std::string command;
    std::vector<std::string> metrics; // priority order
    std::vector<std::string> targets;
    std::size_t targetIndex = 0;
    std::vector<ReportVariant> variants;
    ReportStats stats;
    std::vector<std::string> flagged;
    /// (phase, milliseconds); omitted from output when empty.
    std::vector<std::pair<std::string, double>> timings;
};

enum class ReportFormat { Text, Json };

ReportStats graphStats(const MapnGraph& g);

Report makeReport(std::string command, const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                  const ExplorationConfig& cfg, const std::vector<Variant>& ranked, std::uint64_t considered);

/// Text is a table ordered by rank; `ansi` adds bold headings. JSON keeps a
/// fixed key order.
std::string writeReport(const Report& r, ReportFormat format, bool ansi = false);

} // namespace mapn
