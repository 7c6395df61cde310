#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mapn {

using ProcessIndex = std::uint32_t;
using ChannelIndex = std::uint32_t;
using ColorIndex = std::uint32_t;

/// Process names: letters, digits, '_' and '.'.
bool isValidProcessName(std::string_view name);

/// Color names follow the process grammar; the reserved separator "∥" is
/// additionally accepted so that unfolded lane colors round-trip.
bool isValidColorName(std::string_view name);

struct Process {
    std::string id;
    /// Strictly increasing degrees; empty means the process is not parallel.
    std::vector<int> parallelDegrees;

    bool isParallel() const noexcept { return !parallelDegrees.empty(); }
    friend bool operator==(const Process&, const Process&) = default;
};

struct Channel {
    ProcessIndex writer;
    ProcessIndex reader;
    ColorIndex color;
};

/// A channel spelled by names, independent of any graph's indexing.
struct ChannelSpec {
    std::string writer;
    std::string reader;
    std::string color;

    /// "writer>reader#color"
    std::string label() const;
    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

class MapnGraph;

/// Collects processes and channels, then checks the structural invariants
/// once in build(). Throws ModelError on any violation.
class GraphBuilder {
public:
    GraphBuilder& addProcess(std::string id, std::vector<int> parallelDegrees = {});
    GraphBuilder& addChannel(std::string writer, std::string reader, std::string color);

    /// Declares the process if it does not exist yet.
    GraphBuilder& ensureProcess(std::string_view id);

    bool hasProcess(std::string_view id) const;

    MapnGraph build() const;

private:
    std::vector<Process> processes_;
    std::vector<ChannelSpec> channels_;
};

/// Immutable multi-alternative process network. Processes are indexed in
/// name order, colors in name order and channels in canonical label order,
/// so every derived listing is deterministic.
class MapnGraph {
public:
    MapnGraph() = default;

    std::size_t processCount() const noexcept { return processes_.size(); }
    std::size_t channelCount() const noexcept { return channels_.size(); }
    std::size_t colorCount() const noexcept { return colors_.size(); }

    std::span<const Process> processes() const noexcept { return processes_; }
    std::span<const Channel> channels() const noexcept { return channels_; }
    std::span<const std::string> colors() const noexcept { return colors_; }

    const Process& process(ProcessIndex p) const { return processes_.at(p); }
    const Channel& channel(ChannelIndex c) const { return channels_.at(c); }
    const std::string& color(ColorIndex c) const { return colors_.at(c); }
    const std::string& processName(ProcessIndex p) const { return processes_.at(p).id; }

    std::optional<ProcessIndex> findProcess(std::string_view id) const;
    std::optional<ColorIndex> findColor(std::string_view name) const;
    /// Throws ModelError for unknown names.
    ProcessIndex processIndex(std::string_view id) const;
    ColorIndex colorIndex(std::string_view name) const;

    std::span<const ChannelIndex> writeChannels(ProcessIndex p) const { return write_.at(p); }
    std::span<const ChannelIndex> readChannels(ProcessIndex p) const { return read_.at(p); }
    std::span<const ColorIndex> outgoingColors(ProcessIndex p) const { return outColors_.at(p); }
    std::span<const ColorIndex> incomingColors(ProcessIndex p) const { return inColors_.at(p); }
    std::span<const ChannelIndex> channelsOfColor(ColorIndex c) const { return byColor_.at(c); }

    bool isFork(ProcessIndex p) const { return outColors_.at(p).size() >= 2; }
    bool isJoin(ProcessIndex p) const { return inColors_.at(p).size() >= 2; }

    ChannelSpec channelSpec(ChannelIndex c) const;
    std::vector<ChannelSpec> channelSpecs() const;
    /// "writer>reader#color"; the element of canonical keys.
    const std::string& channelLabel(ChannelIndex c) const { return labels_.at(c); }

    /// Processes in a topological order (ties broken by index), or nullopt
    /// when the graph has a directed cycle.
    std::optional<std::vector<ProcessIndex>> topologicalOrder() const;

    friend bool operator==(const MapnGraph& a, const MapnGraph& b);

private:
    friend class GraphBuilder;

    std::vector<Process> processes_;
    std::vector<Channel> channels_;
    std::vector<std::string> colors_;
    std::vector<std::string> labels_;
    std::vector<std::vector<ChannelIndex>> write_;
    std::vector<std::vector<ChannelIndex>> read_;
    std::vector<std::vector<ColorIndex>> outColors_;
    std::vector<std::vector<ColorIndex>> inColors_;
    std::vector<std::vector<ChannelIndex>> byColor_;
};

struct ProcessQuery {
    std::vector<ChannelSpec> writeChannels;
    std::vector<ChannelSpec> readChannels;
    std::vector<std::string> outgoingColors;
    std::vector<std::string> incomingColors;
};

ProcessQuery graphQueries(const MapnGraph& g, std::string_view process);

struct Endpoints {
    std::vector<std::string> sources;
    std::vector<std::string> sinks;
};

Endpoints sourcesAndSinks(const MapnGraph& g);

struct ForkJoinSets {
    std::vector<std::string> forks;
    std::vector<std::string> joins;
};

ForkJoinSets forkJoinSets(const MapnGraph& g);

/// Channels of one color together with their endpoints.
struct ColoredSubgraph {
    ColorIndex color = 0;
    std::vector<ChannelIndex> channels;
    std::vector<ProcessIndex> processes;
    std::vector<ProcessIndex> sources;
    std::vector<ProcessIndex> sinks;
    bool connected = false;

    /// Connected with a unique source and a unique sink.
    bool isAlternative() const noexcept { return connected && sources.size() == 1 && sinks.size() == 1; }
};

ColoredSubgraph coloredSubgraph(const MapnGraph& g, ColorIndex color);
ColoredSubgraph coloredSubgraph(const MapnGraph& g, std::string_view color);

/// Per-metric, per-target values: evals[metric][target].
using Evaluations = std::vector<std::vector<double>>;

/// A single-choice end-to-end subgraph of a specific graph.
struct Variant {
    std::vector<ChannelIndex> channels; // ascending, i.e. canonical order
    std::string key;
    Evaluations evals;
};

/// Sorted "writer>reader#color" labels joined with ';'.
std::string canonicalKey(std::span<const ChannelSpec> channels);
std::string canonicalKey(const MapnGraph& g, std::span<const ChannelIndex> channels);
inline std::string canonicalKey(const MapnGraph& g, const Variant& v) { return canonicalKey(g, v.channels); }

/// Processes touched by a channel subset, ascending.
std::vector<ProcessIndex> inducedProcesses(const MapnGraph& g, std::span<const ChannelIndex> channels);

} // namespace mapn
