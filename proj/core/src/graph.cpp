#include "mapn/graph.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace mapn {

namespace {

constexpr std::string_view kLaneSeparator = "∥"; // ∥

bool isTokenChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
}

} // namespace

bool isValidProcessName(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), isTokenChar);
}

bool isValidColorName(std::string_view name) {
    if (name.empty())
        return false;
    std::size_t i = 0;
    while (i < name.size()) {
        if (name.substr(i, kLaneSeparator.size()) == kLaneSeparator) {
            i += kLaneSeparator.size();
        } else if (isTokenChar(name[i])) {
            ++i;
        } else {
            return false;
        }
    }
    return true;
}

std::string ChannelSpec::label() const { return writer + ">" + reader + "#" + color; }

GraphBuilder& GraphBuilder::addProcess(std::string id, std::vector<int> parallelDegrees) {
    processes_.push_back(Process{std::move(id), std::move(parallelDegrees)});
    return *this;
}

GraphBuilder& GraphBuilder::addChannel(std::string writer, std::string reader, std::string color) {
    channels_.push_back(ChannelSpec{std::move(writer), std::move(reader), std::move(color)});
    return *this;
}

GraphBuilder& GraphBuilder::ensureProcess(std::string_view id) {
    if (!hasProcess(id))
        addProcess(std::string(id));
    return *this;
}

bool GraphBuilder::hasProcess(std::string_view id) const {
    return std::any_of(processes_.begin(), processes_.end(), [&](const Process& p) { return p.id == id; });
}

MapnGraph GraphBuilder::build() const {
    if (processes_.empty())
        throw ModelError("graph has no processes");

    MapnGraph g;
    g.processes_ = processes_;
    std::sort(g.processes_.begin(), g.processes_.end(),
              [](const Process& a, const Process& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < g.processes_.size(); ++i) {
        const Process& p = g.processes_[i];
        if (!isValidProcessName(p.id))
            throw ModelError("invalid process name '" + p.id + "'");
        if (i > 0 && g.processes_[i - 1].id == p.id)
            throw ModelError("duplicate process '" + p.id + "'");
        for (std::size_t k = 0; k < p.parallelDegrees.size(); ++k) {
            if (p.parallelDegrees[k] < 1)
                throw ModelError("process '" + p.id + "': parallel degrees must be >= 1");
            if (k > 0 && p.parallelDegrees[k] <= p.parallelDegrees[k - 1])
                throw ModelError("process '" + p.id + "': parallel degrees must be strictly increasing");
        }
    }

    std::set<std::string> colorSet;
    for (const ChannelSpec& c : channels_) {
        if (!isValidColorName(c.color))
            throw ModelError("invalid color name '" + c.color + "'");
        colorSet.insert(c.color);
    }
    g.colors_.assign(colorSet.begin(), colorSet.end());

    std::vector<ChannelSpec> specs = channels_;
    for (const ChannelSpec& c : specs) {
        if (!g.findProcess(c.writer))
            throw ModelError("channel " + c.label() + ": unknown writer '" + c.writer + "'");
        if (!g.findProcess(c.reader))
            throw ModelError("channel " + c.label() + ": unknown reader '" + c.reader + "'");
        if (c.writer == c.reader)
            throw ModelError("channel " + c.label() + ": self-loop channels are not supported");
    }
    std::vector<std::pair<std::string, std::size_t>> keyed;
    keyed.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i)
        keyed.emplace_back(specs[i].label(), i);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 1; i < keyed.size(); ++i)
        if (keyed[i].first == keyed[i - 1].first)
            throw ModelError("duplicate channel " + keyed[i].first);

    const std::size_t n = g.processes_.size();
    g.write_.assign(n, {});
    g.read_.assign(n, {});
    g.outColors_.assign(n, {});
    g.inColors_.assign(n, {});
    g.byColor_.assign(g.colors_.size(), {});
    for (const auto& [label, idx] : keyed) {
        const ChannelSpec& s = specs[idx];
        const auto ci = static_cast<ChannelIndex>(g.channels_.size());
        Channel ch{*g.findProcess(s.writer), *g.findProcess(s.reader), *g.findColor(s.color)};
        g.channels_.push_back(ch);
        g.labels_.push_back(label);
        g.write_[ch.writer].push_back(ci);
        g.read_[ch.reader].push_back(ci);
        g.byColor_[ch.color].push_back(ci);
    }
    auto colorsOf = [&](const std::vector<ChannelIndex>& chans) {
        std::vector<ColorIndex> out;
        for (ChannelIndex c : chans)
            out.push_back(g.channels_[c].color);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    for (std::size_t p = 0; p < n; ++p) {
        g.outColors_[p] = colorsOf(g.write_[p]);
        g.inColors_[p] = colorsOf(g.read_[p]);
    }
    return g;
}

std::optional<ProcessIndex> MapnGraph::findProcess(std::string_view id) const {
    auto it = std::lower_bound(processes_.begin(), processes_.end(), id,
                               [](const Process& p, std::string_view v) { return p.id < v; });
    if (it == processes_.end() || it->id != id)
        return std::nullopt;
    return static_cast<ProcessIndex>(it - processes_.begin());
}

std::optional<ColorIndex> MapnGraph::findColor(std::string_view name) const {
    auto it = std::lower_bound(colors_.begin(), colors_.end(), name);
    if (it == colors_.end() || *it != name)
        return std::nullopt;
    return static_cast<ColorIndex>(it - colors_.begin());
}

ProcessIndex MapnGraph::processIndex(std::string_view id) const {
    if (auto p = findProcess(id))
        return *p;
    throw ModelError("unknown process '" + std::string(id) + "'");
}

ColorIndex MapnGraph::colorIndex(std::string_view name) const {
    if (auto c = findColor(name))
        return *c;
    throw ModelError("unknown color '" + std::string(name) + "'");
}

ChannelSpec MapnGraph::channelSpec(ChannelIndex c) const {
    const Channel& ch = channels_.at(c);
    return ChannelSpec{processes_[ch.writer].id, processes_[ch.reader].id, colors_[ch.color]};
}

std::vector<ChannelSpec> MapnGraph::channelSpecs() const {
    std::vector<ChannelSpec> out;
    out.reserve(channels_.size());
    for (ChannelIndex c = 0; c < channels_.size(); ++c)
        out.push_back(channelSpec(c));
    return out;
}

std::optional<std::vector<ProcessIndex>> MapnGraph::topologicalOrder() const {
    const std::size_t n = processes_.size();
    std::vector<std::size_t> indegree(n);
    for (const Channel& c : channels_)
        ++indegree[c.reader];
    std::priority_queue<ProcessIndex, std::vector<ProcessIndex>, std::greater<>> ready;
    for (ProcessIndex p = 0; p < n; ++p)
        if (indegree[p] == 0)
            ready.push(p);
    std::vector<ProcessIndex> order;
    order.reserve(n);
    while (!ready.empty()) {
        ProcessIndex p = ready.top();
        ready.pop();
        order.push_back(p);
        for (ChannelIndex c : write_[p])
            if (--indegree[channels_[c].reader] == 0)
                ready.push(channels_[c].reader);
    }
    if (order.size() != n)
        return std::nullopt;
    return order;
}

bool operator==(const MapnGraph& a, const MapnGraph& b) {
    return a.processes_ == b.processes_ && a.labels_ == b.labels_;
}

ProcessQuery graphQueries(const MapnGraph& g, std::string_view process) {
    const ProcessIndex p = g.processIndex(process);
    ProcessQuery q;
    for (ChannelIndex c : g.writeChannels(p))
        q.writeChannels.push_back(g.channelSpec(c));
    for (ChannelIndex c : g.readChannels(p))
        q.readChannels.push_back(g.channelSpec(c));
    for (ColorIndex c : g.outgoingColors(p))
        q.outgoingColors.push_back(g.color(c));
    for (ColorIndex c : g.incomingColors(p))
        q.incomingColors.push_back(g.color(c));
    return q;
}

Endpoints sourcesAndSinks(const MapnGraph& g) {
    Endpoints e;
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (g.readChannels(p).empty())
            e.sources.push_back(g.processName(p));
        if (g.writeChannels(p).empty())
            e.sinks.push_back(g.processName(p));
    }
    return e;
}

ForkJoinSets forkJoinSets(const MapnGraph& g) {
    ForkJoinSets s;
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (g.isFork(p))
            s.forks.push_back(g.processName(p));
        if (g.isJoin(p))
            s.joins.push_back(g.processName(p));
    }
    return s;
}

ColoredSubgraph coloredSubgraph(const MapnGraph& g, ColorIndex color) {
    ColoredSubgraph sub;
    sub.color = color;
    auto chans = g.channelsOfColor(color);
    sub.channels.assign(chans.begin(), chans.end());
    sub.processes = inducedProcesses(g, sub.channels);

    std::map<ProcessIndex, std::pair<int, int>> degree; // in, out within the color
    for (ChannelIndex c : sub.channels) {
        ++degree[g.channel(c).reader].first;
        ++degree[g.channel(c).writer].second;
    }
    for (ProcessIndex p : sub.processes) {
        if (degree[p].first == 0)
            sub.sources.push_back(p);
        if (degree[p].second == 0)
            sub.sinks.push_back(p);
    }

    // Weak connectivity via union-find over the induced processes.
    std::map<ProcessIndex, ProcessIndex> parent;
    for (ProcessIndex p : sub.processes)
        parent[p] = p;
    auto find = [&](ProcessIndex x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (ChannelIndex c : sub.channels)
        parent[find(g.channel(c).writer)] = find(g.channel(c).reader);
    std::set<ProcessIndex> roots;
    for (ProcessIndex p : sub.processes)
        roots.insert(find(p));
    sub.connected = roots.size() == 1;
    return sub;
}

ColoredSubgraph coloredSubgraph(const MapnGraph& g, std::string_view color) {
    return coloredSubgraph(g, g.colorIndex(color));
}

std::string canonicalKey(std::span<const ChannelSpec> channels) {
    std::vector<std::string> labels;
    labels.reserve(channels.size());
    for (const ChannelSpec& c : channels)
        labels.push_back(c.label());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::string key;
    for (const std::string& l : labels) {
        if (!key.empty())
            key += ';';
        key += l;
    }
    return key;
}

std::string canonicalKey(const MapnGraph& g, std::span<const ChannelIndex> channels) {
    // Channel indices follow label order, so sorting indices sorts labels.
    std::vector<ChannelIndex> sorted(channels.begin(), channels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::string key;
    for (ChannelIndex c : sorted) {
        if (!key.empty())
            key += ';';
        key += g.channelLabel(c);
    }
    return key;
}

std::vector<ProcessIndex> inducedProcesses(const MapnGraph& g, std::span<const ChannelIndex> channels) {
    std::vector<ProcessIndex> ps;
    ps.reserve(channels.size() * 2);
    for (ChannelIndex c : channels) {
        ps.push_back(g.channel(c).writer);
        ps.push_back(g.channel(c).reader);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

} // namespace mapn
