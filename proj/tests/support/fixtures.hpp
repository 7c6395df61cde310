#pragma once

#include <mapn/graph.hpp>
#include <mapn/metrics.hpp>
#include <mapn/model.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mapn::testing {

/// Graph of the given channels; endpoints are declared on first use.
MapnGraph edges(const std::vector<ChannelSpec>& channels);

/// Reference graph: 24 processes, forks {b,c,p,v,g}, joins
/// {d,e,f,j,u}, parallel process t with degrees {1,2,4}.
std::string referenceText();
Model reference();

/// The reference graph plus a "dark_orange" alternative f -> f1 -> f2 -> f3 -> o that
/// breaks the structured-block rule.
std::string blockViolatorText();
Model blockViolator();

/// a -> b -> c, one metric "time".
std::string chainText();

/// a(1) -> {b(2), c(5)} -> d(1), all one color.
Model diamond();

/// A minimal graph violating exactly the given property (1..6).
std::string violatorText(int property);

/// Source 0, sink n-1, every other node with a predecessor below and a
/// successor above it. Single color "k", names "v<i>".
MapnGraph randomDag(std::mt19937_64& rng, int n, double extraEdgeProbability);

/// Max over source-to-sink paths of the sum of node values (merge=max,
/// compose=sum), by exhaustive path enumeration.
double longestPath(const MapnGraph& g, const std::vector<double>& nodeValue);

/// Annotates every process with `metric` values drawn from [lo, hi].
void randomAnnotations(const MapnGraph& g, const MetricSet& metrics, AnnotationTable& ann, std::mt19937_64& rng,
                       int lo = 1, int hi = 100);

/// Unfolded generated model ready for enumeration and exploration.
struct Prepared {
    Model model;
    MapnGraph graph;
    AnnotationTable annotations;
};
Prepared prepare(Model m);

Model generated(std::uint64_t targetVariants, std::uint64_t seed, int parallelCount = 0, bool withEnergy = false);

} // namespace mapn::testing
