#pragma once

#include "mapn/metrics.hpp"
#include "mapn/model.hpp"
#include "mapn/unfold.hpp"

#include <map>
#include <string>
#include <string_view>

namespace mapn {

/// Parses a graph document:
///
///     mapn 1
///     process <id> [parallel <d1> <d2> ...]
///     channel <writer> <reader> <color>
///     metric <name> [priority=<k>] [merge=<op>] [compose=<op>] [direction=<lower|higher>]
///     target <label>
///     annotate <process> <metric> <v0> [<v1> ...]
///     par_rule <process> <metric> dup=<divide|replicate|constant:<c>> [in=<c0>,<c1>] [out=<c0>,<c1>]
///
/// One statement per line, '#' starts a comment. Statements may appear in
/// any order after the header; references are resolved at the end. Metric
/// defaults: priority = declaration index, merge=max, compose=sum,
/// direction=lower. Without target lines there is a single target "default".
/// Throws ParseError carrying the offending line.
Model parseGraph(std::string_view text);

/// Canonical text: header, processes, channels, metrics, targets,
/// annotations, rules, each block sorted. Optional provenance adds a
/// trailing comment to unfolded processes.
std::string serializeGraph(const Model& m, const std::map<std::string, Provenance>* provenance = nullptr);

/// Same graph, metrics, targets, annotations and rules.
bool semanticallyEqual(const Model& a, const Model& b);

/// Parses `constraint <metric> <op> <number>`, `best <b>`, `target <label>`
/// and `mode <exact|beam>` lines against known metrics and targets.
ExplorationConfig parseConstraints(std::string_view text, const MetricSet& metrics, const AnnotationTable& ann);

std::string serializeConstraints(const ExplorationConfig& cfg, const AnnotationTable& ann);

/// Shortest representation that reads back to the same double.
std::string formatNumber(double v);

} // namespace mapn
