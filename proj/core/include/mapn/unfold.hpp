#pragma once

#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace mapn {

enum class LaneRole { Distribute, Duplicate, Gather };

std::string_view toString(LaneRole r);

struct Provenance {
    std::string original;
    int degree = 0;
    LaneRole role = LaneRole::Duplicate;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Parallel processes replaced by one lane per degree. For process p and
/// degree d the lane is p.i<d> -> p.<d>.1 .. p.<d>.d -> p.o<d>; the lane of
/// the smallest degree keeps p's colors, every other lane is colored "p∥d".
struct UnfoldedGraph {
    MapnGraph graph;
    AnnotationTable annotations;
    std::map<std::string, Provenance> provenance; // keyed by new process id
};

std::string laneColor(std::string_view process, int degree);

/// Throws UnfoldError when a parallel process is a fork/join or lies on the
/// graph boundary, or when a rule or annotation is missing; throws
/// ValidationError when the unfolded graph is not well-formed.
UnfoldedGraph unfoldGraph(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                          const ParallelRules& rules);

/// Topology only: annotations are left empty.
UnfoldedGraph unfoldTopology(const MapnGraph& g);

/// Number of variants of the unfolded graph, counted without materializing
/// them. Throws EnumerationError past `maxAssignments` closures.
std::uint64_t countUnfoldedVariants(const MapnGraph& g, std::uint64_t maxAssignments = 1'000'000);

} // namespace mapn
