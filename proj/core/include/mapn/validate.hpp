#pragma once

#include "mapn/error.hpp"
#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

#include <span>
#include <string>
#include <vector>

namespace mapn {

enum class Severity { Error, Warning };

/// One well-formedness finding. `property` follows the 1..6 numbering of the
/// well-formed mAPN definition.
struct Diagnostic {
    int property = 0;
    Severity severity = Severity::Error;
    std::string message;
    std::vector<std::string> processes;
    std::vector<ChannelSpec> channels;

    /// "P<k> <severity>: <message> [offenders...]"
    std::string render() const;
};

/// Checks properties 1..6 in order and returns every finding. An empty
/// result means the graph is well-formed; warnings alone do not block.
std::vector<Diagnostic> validate(const MapnGraph& g);

bool hasErrors(std::span<const Diagnostic> diagnostics);

/// Thrown when a transformation cannot produce a well-formed result.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

inline constexpr std::string_view kFictiveSource = "__src";
inline constexpr std::string_view kFictiveSink = "__snk";

/// Adds a fictive "__src" (resp. "__snk") when the graph has several sources
/// (resp. sinks). Each new channel takes the unique outgoing color of the
/// former source (incoming color of the former sink). Throws ValidationError
/// with a property-3 diagnostic when no such single color exists.
MapnGraph normalizeSourceSink(const MapnGraph& g);

/// Gives the fictive processes present in g zero values for every metric.
void annotateFictiveProcesses(const MapnGraph& g, const MetricSet& metrics, AnnotationTable& ann);

} // namespace mapn
