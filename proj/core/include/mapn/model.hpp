#pragma once

#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

namespace mapn {

/// Everything one graph document describes.
struct Model {
    MapnGraph graph;
    MetricSet metrics;
    AnnotationTable annotations;
    ParallelRules rules;

    friend bool operator==(const Model&, const Model&) = default;
};

} // namespace mapn
