#pragma once

#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mapn {

struct EnumerationOptions {
    /// Upper bound on fork-choice assignments explored; exceeding it throws.
    std::uint64_t maxAssignments = 1'000'000;
    /// Try fork colors in descending instead of ascending order.
    bool reverseChoiceOrder = false;
};

struct EnumerationResult {
    /// Distinct variants in discovery order, without evaluations.
    std::vector<Variant> variants;
    /// Keys of kept variants in which some process reads complete channel
    /// groups of two or more colors. Empty for well-formed graphs.
    std::vector<std::string> flagged;
    std::uint64_t assignments = 0;
};

/// Brute-force ground truth: every assignment of reachable forks to one of
/// their outgoing colors, closed from the source. Throws EnumerationError on
/// cyclic input, on several sources/sinks, or past the assignment cap.
EnumerationResult enumerateVariants(const MapnGraph& g, const EnumerationOptions& opts = {});

/// Same traversal as enumerateVariants, counting instead of collecting.
std::uint64_t countVariants(const MapnGraph& g, const EnumerationOptions& opts = {});

/// aggregateVariant on each, then checkFeasible, then rankVariants.
std::vector<Variant> evaluateAndRank(std::vector<Variant> variants, const MapnGraph& g, const MetricSet& metrics,
                                     const AnnotationTable& ann, const ExplorationConfig& cfg);

} // namespace mapn
