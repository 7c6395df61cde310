#include "mapn/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace mapn {

namespace {

std::vector<std::string> namesOf(const MapnGraph& g, const std::vector<ProcessIndex>& ps) {
    std::vector<std::string> out;
    out.reserve(ps.size());
    for (ProcessIndex p : ps)
        out.push_back(g.processName(p));
    std::sort(out.begin(), out.end());
    return out;
}

Diagnostic error(int property, std::string message, std::vector<std::string> processes,
                 std::vector<ChannelSpec> channels = {}) {
    return Diagnostic{property, Severity::Error, std::move(message), std::move(processes), std::move(channels)};
}

void checkColorConnectivity(const MapnGraph& g, std::vector<Diagnostic>& out) {
    for (ColorIndex c = 0; c < g.colorCount(); ++c) {
        const ColoredSubgraph sub = coloredSubgraph(g, c);
        if (!sub.connected)
            out.push_back(error(1, "color '" + g.color(c) + "' is reused in disjoint subgraphs",
                                namesOf(g, sub.processes)));
    }
}

/// Forward or backward reachability from `start`, optionally restricted to one color.
std::vector<bool> reach(const MapnGraph& g, ProcessIndex start, bool forward, std::optional<ColorIndex> color) {
    std::vector<bool> seen(g.processCount(), false);
    std::vector<ProcessIndex> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const ProcessIndex p = stack.back();
        stack.pop_back();
        for (ChannelIndex c : forward ? g.writeChannels(p) : g.readChannels(p)) {
            const Channel& ch = g.channel(c);
            if (color && ch.color != *color)
                continue;
            const ProcessIndex next = forward ? ch.reader : ch.writer;
            if (!seen[next]) {
                seen[next] = true;
                stack.push_back(next);
            }
        }
    }
    return seen;
}

void checkCycles(const MapnGraph& g, std::vector<Diagnostic>& out) {
    if (g.topologicalOrder())
        return;
    // Group processes lying on cycles by strongly connected component.
    const std::size_t n = g.processCount();
    std::vector<bool> assigned(n, false);
    for (ProcessIndex p = 0; p < n; ++p) {
        if (assigned[p])
            continue;
        const std::vector<bool> fwd = reach(g, p, true, std::nullopt);
        const std::vector<bool> bwd = reach(g, p, false, std::nullopt);
        std::vector<ProcessIndex> component;
        for (ProcessIndex q = 0; q < n; ++q)
            if (fwd[q] && bwd[q])
                component.push_back(q);
        if (component.size() < 2)
            continue;
        for (ProcessIndex q : component)
            assigned[q] = true;
        out.push_back(error(2, "directed cycle through " + std::to_string(component.size()) + " processes",
                            namesOf(g, component)));
    }
}

void checkEndpoints(const MapnGraph& g, std::vector<Diagnostic>& out) {
    std::vector<ProcessIndex> sources, sinks;
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (g.readChannels(p).empty())
            sources.push_back(p);
        if (g.writeChannels(p).empty())
            sinks.push_back(p);
    }
    std::vector<ProcessIndex> everyone(g.processCount());
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        everyone[p] = p;
    if (sources.size() != 1)
        out.push_back(error(3, "graph has " + std::to_string(sources.size()) + " source processes, expected 1",
                            namesOf(g, sources.empty() ? everyone : sources)));
    if (sinks.size() != 1)
        out.push_back(error(3, "graph has " + std::to_string(sinks.size()) + " sink processes, expected 1",
                            namesOf(g, sinks.empty() ? everyone : sinks)));
}

void checkRates(const MapnGraph& g, std::vector<Diagnostic>& out) {
    auto check = [&](ProcessIndex p, std::span<const ChannelIndex> chans, const char* what) {
        std::map<ColorIndex, std::size_t> perColor;
        for (ChannelIndex c : chans)
            ++perColor[g.channel(c).color];
        if (perColor.size() < 2)
            return;
        std::set<std::size_t> counts;
        for (const auto& [color, count] : perColor)
            counts.insert(count);
        if (counts.size() == 1)
            return;
        std::ostringstream msg;
        msg << (what[0] == 'w' ? "fork" : "join") << " '" << g.processName(p) << "' " << what
            << " an unequal number of channels per color (";
        bool first = true;
        for (const auto& [color, count] : perColor) {
            msg << (first ? "" : ", ") << g.color(color) << ": " << count;
            first = false;
        }
        msg << ")";
        std::vector<ChannelSpec> specs;
        for (ChannelIndex c : chans)
            specs.push_back(g.channelSpec(c));
        out.push_back(error(4, msg.str(), {g.processName(p)}, std::move(specs)));
    };
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        check(p, g.writeChannels(p), "writes");
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        check(p, g.readChannels(p), "reads");
}

void checkParallel(const MapnGraph& g, std::vector<Diagnostic>& out) {
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (!g.process(p).isParallel())
            continue;
        if (g.isFork(p) || g.isJoin(p))
            out.push_back(error(5,
                                "parallel process '" + g.processName(p) + "' is a " +
                                    (g.isFork(p) ? (g.isJoin(p) ? "fork and join" : "fork") : "join") + " process",
                                {g.processName(p)}));
    }
}

struct BlockSums {
    std::size_t writes = 0;
    std::size_t reads = 0;
};

BlockSums interiorSums(const MapnGraph& g, const std::vector<ProcessIndex>& interior, ColorIndex color) {
    BlockSums s;
    for (ProcessIndex p : interior) {
        for (ChannelIndex c : g.writeChannels(p))
            s.writes += g.channel(c).color == color;
        for (ChannelIndex c : g.readChannels(p))
            s.reads += g.channel(c).color == color;
    }
    return s;
}

void checkStructuredBlocks(const MapnGraph& g, std::vector<Diagnostic>& out) {
    std::set<std::tuple<ColorIndex, ProcessIndex, ProcessIndex>> reported;
    for (ColorIndex alt = 0; alt < g.colorCount(); ++alt) {
        const ColoredSubgraph sub = coloredSubgraph(g, alt);
        if (!sub.isAlternative())
            continue;
        const ProcessIndex s = sub.sources.front();
        const ProcessIndex t = sub.sinks.front();
        if (s == t)
            continue;
        auto outs = g.outgoingColors(s);
        auto ins = g.incomingColors(t);
        for (ColorIndex other : outs) {
            if (other == alt || !std::binary_search(ins.begin(), ins.end(), other))
                continue;

            // Each member of the (alternative, substituted) pair is checked in
            // its own color over its processes strictly between s and t.
            auto checkMember = [&](ColorIndex color, const std::vector<ProcessIndex>& interior) {
                const BlockSums sums = interiorSums(g, interior, color);
                if (sums.writes == sums.reads || interior.empty())
                    return;
                if (!reported.insert({color, s, t}).second)
                    return;
                std::ostringstream msg;
                msg << "alternative '" << g.color(alt) << "' from " << g.processName(s) << " to "
                    << g.processName(t) << " and the '" << g.color(other)
                    << "' subgraph it substitutes do not form a structured block ('" << g.color(color)
                    << "' interior writes " << sums.writes << " channels but reads " << sums.reads << ")";
                out.push_back(error(6, msg.str(), namesOf(g, interior)));
            };

            std::vector<ProcessIndex> altInterior;
            for (ProcessIndex p : sub.processes)
                if (p != s && p != t)
                    altInterior.push_back(p);

            const std::vector<bool> fromS = reach(g, s, true, other);
            const std::vector<bool> toT = reach(g, t, false, other);
            std::vector<ProcessIndex> regionInterior;
            for (ProcessIndex p = 0; p < g.processCount(); ++p)
                if (fromS[p] && toT[p] && p != s && p != t)
                    regionInterior.push_back(p);

            checkMember(alt, altInterior);
            checkMember(other, regionInterior);
        }
    }
}

void checkUnreferenced(const MapnGraph& g, std::vector<Diagnostic>& out) {
    if (g.processCount() < 2)
        return;
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        if (g.readChannels(p).empty() && g.writeChannels(p).empty())
            out.push_back(Diagnostic{3, Severity::Warning,
                                     "process '" + g.processName(p) + "' is declared but has no channels",
                                     {g.processName(p)},
                                     {}});
}

} // namespace

std::string Diagnostic::render() const {
    std::ostringstream os;
    os << 'P' << property << ' ' << (severity == Severity::Error ? "error" : "warning") << ": " << message << " [";
    bool first = true;
    for (const std::string& p : processes) {
        os << (first ? "" : ", ") << p;
        first = false;
    }
    for (const ChannelSpec& c : channels) {
        os << (first ? "" : ", ") << c.label();
        first = false;
    }
    os << ']';
    return os.str();
}

std::vector<Diagnostic> validate(const MapnGraph& g) {
    std::vector<Diagnostic> out;
    checkColorConnectivity(g, out);
    checkCycles(g, out);
    checkEndpoints(g, out);
    checkUnreferenced(g, out);
    checkRates(g, out);
    checkParallel(g, out);
    checkStructuredBlocks(g, out);
    return out;
}

bool hasErrors(std::span<const Diagnostic> diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

std::string summarize(const std::vector<Diagnostic>& ds) {
    std::string s = "graph is not well-formed";
    for (const Diagnostic& d : ds)
        s += "\n  " + d.render();
    return s;
}

} // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

MapnGraph normalizeSourceSink(const MapnGraph& g) {
    std::vector<ProcessIndex> sources, sinks;
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (g.readChannels(p).empty())
            sources.push_back(p);
        if (g.writeChannels(p).empty())
            sinks.push_back(p);
    }
    if (sources.size() <= 1 && sinks.size() <= 1)
        return g;

    std::vector<Diagnostic> problems;
    auto singleColor = [&](const std::vector<ProcessIndex>& ends, bool outgoing, std::string_view role) {
        std::vector<ProcessIndex> bad;
        for (ProcessIndex p : ends) {
            const auto colors = outgoing ? g.outgoingColors(p) : g.incomingColors(p);
            if (colors.size() != 1)
                bad.push_back(p);
        }
        if (!bad.empty())
            problems.push_back(error(3, std::string("cannot add a fictive ") + std::string(role) +
                                            ": former " + std::string(role) +
                                            "s without exactly one connecting color",
                                     namesOf(g, bad)));
    };
    if (sources.size() > 1)
        singleColor(sources, true, "source");
    if (sinks.size() > 1)
        singleColor(sinks, false, "sink");
    if ((sources.size() > 1 && g.findProcess(kFictiveSource)) || (sinks.size() > 1 && g.findProcess(kFictiveSink)))
        problems.push_back(error(3, "fictive process name already in use", {std::string(kFictiveSource)}));
    if (!problems.empty())
        throw ValidationError(std::move(problems));

    GraphBuilder b;
    for (const Process& p : g.processes())
        b.addProcess(p.id, p.parallelDegrees);
    for (const ChannelSpec& c : g.channelSpecs())
        b.addChannel(c.writer, c.reader, c.color);
    if (sources.size() > 1) {
        b.addProcess(std::string(kFictiveSource));
        for (ProcessIndex s : sources)
            b.addChannel(std::string(kFictiveSource), g.processName(s), g.color(g.outgoingColors(s).front()));
    }
    if (sinks.size() > 1) {
        b.addProcess(std::string(kFictiveSink));
        for (ProcessIndex s : sinks)
            b.addChannel(g.processName(s), std::string(kFictiveSink), g.color(g.incomingColors(s).front()));
    }
    return b.build();
}

void annotateFictiveProcesses(const MapnGraph& g, const MetricSet& metrics, AnnotationTable& ann) {
    for (std::string_view name : {kFictiveSource, kFictiveSink}) {
        if (!g.findProcess(name))
            continue;
        for (const Metric& m : metrics.metrics())
            ann.set(std::string(name), m.name, std::vector<double>(ann.targetCount(), 0.0));
    }
}

} // namespace mapn
