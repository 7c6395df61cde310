#include "mapn/oracle.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace mapn {

namespace {

enum class Closure { Invalid, Valid, Mixed };

class Enumerator {
public:
    Enumerator(const MapnGraph& g, const EnumerationOptions& opts) : g_(g), opts_(opts) {
        auto order = g.topologicalOrder();
        if (!order)
            throw EnumerationError("cannot enumerate variants of a cyclic graph");
        order_ = std::move(*order);
        std::vector<ProcessIndex> sources, sinks;
        for (ProcessIndex p = 0; p < g.processCount(); ++p) {
            if (g.readChannels(p).empty())
                sources.push_back(p);
            if (g.writeChannels(p).empty())
                sinks.push_back(p);
        }
        if (sources.size() != 1 || sinks.size() != 1)
            throw EnumerationError("enumeration needs exactly one source and one sink");
        source_ = sources.front();
        sink_ = sinks.front();
    }

    void run(const std::function<void(const std::vector<char>&, Closure)>& onLeaf) {
        onLeaf_ = &onLeaf;
        std::vector<char> reached(g_.processCount(), 0);
        std::vector<char> included(g_.channelCount(), 0);
        reached[source_] = 1;
        walk(0, reached, included);
    }

    std::uint64_t assignments() const noexcept { return assignments_; }

private:
    void include(ChannelIndex c, std::vector<char>& reached, std::vector<char>& included) const {
        included[c] = 1;
        reached[g_.channel(c).reader] = 1;
    }

    void walk(std::size_t pos, std::vector<char>& reached, std::vector<char>& included) {
        for (; pos < order_.size(); ++pos) {
            const ProcessIndex p = order_[pos];
            if (!reached[p])
                continue;
            if (g_.isFork(p)) {
                auto colors = g_.outgoingColors(p);
                std::vector<ColorIndex> choices(colors.begin(), colors.end());
                if (opts_.reverseChoiceOrder)
                    std::reverse(choices.begin(), choices.end());
                for (ColorIndex color : choices) {
                    std::vector<char> r = reached;
                    std::vector<char> inc = included;
                    for (ChannelIndex c : g_.writeChannels(p))
                        if (g_.channel(c).color == color)
                            include(c, r, inc);
                    walk(pos + 1, r, inc);
                }
                return;
            }
            for (ChannelIndex c : g_.writeChannels(p))
                include(c, reached, included);
        }
        if (++assignments_ > opts_.maxAssignments)
            throw EnumerationError("enumeration exceeded " + std::to_string(opts_.maxAssignments) +
                                   " fork-choice assignments");
        (*onLeaf_)(included, classify(reached, included));
    }

    Closure classify(const std::vector<char>& reached, const std::vector<char>& included) const {
        if (!reached[sink_])
            return Closure::Invalid;
        bool mixed = false;
        for (ProcessIndex p = 0; p < g_.processCount(); ++p) {
            if (!reached[p] || p == source_)
                continue;
            if (g_.writeChannels(p).empty() && p != sink_)
                return Closure::Invalid;
            // In-closure reads must cover every read channel of their colors.
            std::vector<ColorIndex> present;
            for (ChannelIndex c : g_.readChannels(p))
                if (included[c])
                    present.push_back(g_.channel(c).color);
            std::sort(present.begin(), present.end());
            present.erase(std::unique(present.begin(), present.end()), present.end());
            for (ChannelIndex c : g_.readChannels(p))
                if (!included[c] && std::binary_search(present.begin(), present.end(), g_.channel(c).color))
                    return Closure::Invalid;
            mixed = mixed || present.size() > 1;
        }
        return mixed ? Closure::Mixed : Closure::Valid;
    }

    const MapnGraph& g_;
    EnumerationOptions opts_;
    std::vector<ProcessIndex> order_;
    ProcessIndex source_ = 0;
    ProcessIndex sink_ = 0;
    std::uint64_t assignments_ = 0;
    const std::function<void(const std::vector<char>&, Closure)>* onLeaf_ = nullptr;
};

} // namespace

EnumerationResult enumerateVariants(const MapnGraph& g, const EnumerationOptions& opts) {
    EnumerationResult result;
    std::unordered_set<std::string> seen;
    Enumerator e(g, opts);
    e.run([&](const std::vector<char>& included, Closure kind) {
        if (kind == Closure::Invalid)
            return;
        Variant v;
        for (ChannelIndex c = 0; c < included.size(); ++c)
            if (included[c])
                v.channels.push_back(c);
        v.key = canonicalKey(g, v.channels);
        if (!seen.insert(v.key).second)
            return;
        if (kind == Closure::Mixed)
            result.flagged.push_back(v.key);
        result.variants.push_back(std::move(v));
    });
    result.assignments = e.assignments();
    return result;
}

std::uint64_t countVariants(const MapnGraph& g, const EnumerationOptions& opts) {
    // Distinct assignments always close over distinct channel sets: the first
    // fork where two assignments differ contributes different channels.
    std::uint64_t count = 0;
    Enumerator e(g, opts);
    e.run([&](const std::vector<char>&, Closure kind) { count += kind != Closure::Invalid; });
    return count;
}

std::vector<Variant> evaluateAndRank(std::vector<Variant> variants, const MapnGraph& g, const MetricSet& metrics,
                                     const AnnotationTable& ann, const ExplorationConfig& cfg) {
    checkConfig(cfg, metrics, ann);
    std::vector<Variant> feasible;
    feasible.reserve(variants.size());
    for (Variant& v : variants) {
        v.evals = aggregateVariant(g, v.channels, metrics, ann);
        if (checkFeasible(v.evals, metrics, cfg))
            feasible.push_back(std::move(v));
    }
    return rankVariants(std::move(feasible), metrics, cfg);
}

} // namespace mapn
