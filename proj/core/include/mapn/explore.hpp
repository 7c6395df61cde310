#pragma once

#include "mapn/graph.hpp"
#include "mapn/metrics.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mapn {

/// Fixed-width set of channel indices.
class ChannelSet {
public:
    ChannelSet() = default;
    explicit ChannelSet(std::size_t channelCount) : words_((channelCount + 63) / 64, 0) {}

    void insert(ChannelIndex c) { words_[c / 64] |= std::uint64_t{1} << (c % 64); }
    bool contains(ChannelIndex c) const { return (words_[c / 64] >> (c % 64)) & 1U; }
    ChannelSet& operator|=(const ChannelSet& o);
    std::size_t count() const;
    std::vector<ChannelIndex> indices() const;
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    /// Wraps raw words, e.g. from a record pool.
    static ChannelSet fromWords(std::span<const std::uint64_t> words);

    friend bool operator==(const ChannelSet&, const ChannelSet&) = default;

private:
    std::vector<std::uint64_t> words_;
};

/// A source-rooted partial subgraph ending at `frontier`, with the metric
/// values aggregated up to the frontier.
struct AlternativeRecord {
    ChannelSet channels;
    /// Chosen outgoing color per fork (indexed by fork ordinal), -1 if the
    /// fork is not part of the record or has no chosen channel yet.
    std::vector<std::int16_t> choices;
    std::vector<double> evals; // metric-major: evals[m * targets + t]
    ProcessIndex frontier = 0;
    bool isSink = false;
    ColorIndex labelColor = 0;
    std::uint32_t label = 0;
};

struct PruneOptions {
    /// Metric indices whose values never decrease along a variant.
    std::vector<bool> monotone;
    std::size_t targets = 1;
    /// Beam truncation applies to intermediate frontiers in beam mode only.
    bool atSink = false;
};

/// True when some upper-bound constraint on a monotone metric is already violated.
bool violatesMonotoneBound(std::span<const double> evals, const MetricSet& metrics, const ExplorationConfig& cfg,
                           const PruneOptions& opts);

/// Drops records that can no longer become feasible; in beam mode (or at the
/// sink) keeps the cfg.best best ones when cfg.best > 0.
std::vector<AlternativeRecord> prune(const MapnGraph& g, std::vector<AlternativeRecord> records,
                                     const MetricSet& metrics, const ExplorationConfig& cfg,
                                     const PruneOptions& opts);

/// Per metric: true when merge/compose and the annotations make the value
/// non-decreasing from predecessor to successor.
std::vector<bool> monotoneMetrics(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                                  std::size_t targetIndex);

struct TraceEvent {
    enum class Kind { PushQ, PopQ, SkipQ, Propagate, Ready };
    Kind kind;
    ProcessIndex process = 0;
    ColorIndex color = 0;
    ChannelIndex channel = 0;
};

/// Queue-driven exploration of an unfolded, well-formed, acyclic graph.
/// The outer queue holds (process, color) pairs ordered by the process's
/// topological rank; each pop walks the channels of that color with an inner
/// FIFO queue, updating the outer queue and propagating alternatives.
class Explorer {
public:
    Explorer(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann, ExplorationConfig cfg);

    /// Seeds the source record and pushes its outgoing colors.
    void initialize();
    /// Pops and walks one queue entry; false once the queue is empty.
    bool step();
    /// initialize() if needed, then step() to completion; returns results().
    std::vector<Variant> run();

    /// Gated on every read channel of `reader` having been visited, counting
    /// `incoming` (the channel being processed) as visited.
    void updateExplorationQueue(ProcessIndex reader, ColorIndex color, ChannelIndex incoming);
    /// Propagates the writer's records over `ch`; true when the reader has
    /// been visited on all its read channels of ch's color.
    bool propagateAlternatives(ChannelIndex ch);

    /// Feasible variants at the sink, ranked and truncated to cfg.best.
    std::vector<Variant> results() const;

    /// Records currently held at p, materialized.
    std::vector<AlternativeRecord> alternatives(ProcessIndex p) const;
    std::size_t alternativeCount(ProcessIndex p) const { return pools_.at(p).size(); }
    Evaluations evaluations(const AlternativeRecord& r) const;
    std::size_t visitCount(ChannelIndex c) const { return visits_.at(c); }
    std::size_t pushCount(ProcessIndex p, ColorIndex c) const { return pushes_.at(slot(p, c)); }
    std::vector<std::pair<ProcessIndex, ColorIndex>> queue() const;
    bool treated(ColorIndex c) const { return treated_.at(c); }

    void enableTrace(bool on) { tracing_ = on; }
    const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
    std::string describe(const TraceEvent& e) const;

private:
    using Entry = std::pair<std::size_t, ColorIndex>; // (topological rank, color)

    /// Flat storage of the records at one process.
    struct Pool {
        std::vector<std::uint64_t> bits;   // words per record
        std::vector<std::int16_t> choices; // one slot per fork
        std::vector<double> evals;         // metrics * targets
        std::vector<std::uint32_t> labels;
        std::vector<ColorIndex> labelColors;
        std::size_t size() const noexcept { return labels.size(); }
    };

    /// Writer records selected for one channel, split into those already
    /// combined at the reader and those not yet combined.
    struct Pending {
        std::vector<std::uint32_t> combined;
        std::vector<std::uint32_t> fresh;
        std::vector<char> member; // indexed by writer record
        std::uint64_t version = ~std::uint64_t{0};
    };

    std::size_t slot(ProcessIndex p, ColorIndex c) const { return std::size_t{p} * g_.colorCount() + c; }
    void push(ProcessIndex p, ColorIndex c);
    void walk(ProcessIndex p, ColorIndex c);
    bool hasAlternativeOfColor(ProcessIndex p, ChannelIndex incoming) const;
    void combine(ProcessIndex reader, ColorIndex color);
    void record(TraceEvent::Kind kind, ProcessIndex p, ColorIndex c, ChannelIndex ch = 0);
    AlternativeRecord materialize(ProcessIndex p, std::uint32_t i) const;
    const double* evalsOf(ProcessIndex p, std::uint32_t i) const { return &pools_[p].evals[i * evalWidth_]; }

    const MapnGraph& g_;
    const MetricSet& metrics_;
    ExplorationConfig cfg_;
    std::size_t targets_ = 1;
    std::size_t words_ = 0;
    std::size_t forks_ = 0;
    std::size_t evalWidth_ = 0;
    ProcessIndex source_ = 0;
    ProcessIndex sink_ = 0;
    std::vector<std::size_t> rank_;
    std::vector<ProcessIndex> byRank_;
    std::vector<std::int32_t> forkOrdinal_;
    std::vector<std::int32_t> colorSink_; // sink of each colored subgraph, -1 if not unique
    std::vector<std::vector<double>> nu_;  // nu_[p][m * targets + t]
    PruneOptions pruneOpts_;

    std::set<Entry> queue_;
    std::vector<bool> treated_;
    std::vector<std::uint32_t> nextLabel_;
    std::vector<std::size_t> visits_;
    std::vector<Pool> pools_;
    std::vector<std::uint64_t> version_;
    std::vector<std::uint64_t> walked_; // per (process, color): version last walked
    std::vector<std::size_t> pushes_;   // per (process, color)
    std::vector<Pending> pending_;      // per channel
    bool initialized_ = false;
    bool tracing_ = false;
    std::vector<TraceEvent> trace_;
};

std::vector<Variant> exploreGraph(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                                  const ExplorationConfig& cfg);

} // namespace mapn
