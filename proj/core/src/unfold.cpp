#include "mapn/unfold.hpp"

#include "mapn/error.hpp"
#include "mapn/oracle.hpp"
#include "mapn/validate.hpp"

#include <algorithm>
#include <set>

namespace mapn {

namespace {

struct Lane {
    std::string original;
    int degree;
};

std::string distributeName(std::string_view p, int d) { return std::string(p) + ".i" + std::to_string(d); }
std::string gatherName(std::string_view p, int d) { return std::string(p) + ".o" + std::to_string(d); }
std::string duplicateName(std::string_view p, int d, int j) {
    return std::string(p) + "." + std::to_string(d) + "." + std::to_string(j);
}

/// Rewrites the graph one parallel process at a time (in name order) so that
/// every step sees the fork/join status produced by the previous ones.
UnfoldedGraph rewrite(const MapnGraph& g) {
    std::vector<Process> processes(g.processes().begin(), g.processes().end());
    std::vector<ChannelSpec> channels = g.channelSpecs();
    std::set<std::string> colors(g.colors().begin(), g.colors().end());
    std::set<std::string> names;
    for (const Process& p : processes)
        names.insert(p.id);

    UnfoldedGraph result;
    for (const Process& par : g.processes()) {
        if (!par.isParallel())
            continue;
        const std::string& p = par.id;

        std::vector<ChannelSpec> ins, outs, rest;
        for (ChannelSpec& c : channels) {
            if (c.reader == p)
                ins.push_back(std::move(c));
            else if (c.writer == p)
                outs.push_back(std::move(c));
            else
                rest.push_back(std::move(c));
        }
        if (ins.empty() || outs.empty())
            throw UnfoldError("parallel process '" + p + "' must have predecessors and successors");
        auto uniqueColor = [&](const std::vector<ChannelSpec>& cs) {
            std::set<std::string> s;
            for (const ChannelSpec& c : cs)
                s.insert(c.color);
            return s;
        };
        const auto inColors = uniqueColor(ins);
        const auto outColors = uniqueColor(outs);
        if (inColors.size() != 1 || outColors.size() != 1)
            throw UnfoldError("parallel process '" + p + "' is a fork or join process");
        const std::string colorIn = *inColors.begin();
        const std::string colorOut = *outColors.begin();

        const int kept = par.parallelDegrees.front();
        for (int d : par.parallelDegrees) {
            const bool keep = d == kept;
            const std::string laneIn = keep ? colorIn : laneColor(p, d);
            const std::string laneOut = keep ? colorOut : laneColor(p, d);
            if (!keep && colors.count(laneIn))
                throw UnfoldError("lane color '" + laneIn + "' collides with an existing color");
            colors.insert(laneIn);

            const std::string dist = distributeName(p, d);
            const std::string gather = gatherName(p, d);
            auto addProcess = [&](const std::string& id, LaneRole role) {
                if (!names.insert(id).second)
                    throw UnfoldError("unfolded process name '" + id + "' collides with an existing process");
                processes.push_back(Process{id, {}});
                result.provenance[id] = Provenance{p, d, role};
            };
            addProcess(dist, LaneRole::Distribute);
            for (const ChannelSpec& c : ins)
                rest.push_back(ChannelSpec{c.writer, dist, laneIn});
            for (int j = 1; j <= d; ++j) {
                const std::string dup = duplicateName(p, d, j);
                addProcess(dup, LaneRole::Duplicate);
                rest.push_back(ChannelSpec{dist, dup, laneIn});
            }
            addProcess(gather, LaneRole::Gather);
            for (int j = 1; j <= d; ++j)
                rest.push_back(ChannelSpec{duplicateName(p, d, j), gather, laneOut});
            for (const ChannelSpec& c : outs)
                rest.push_back(ChannelSpec{gather, c.reader, laneOut});
        }
        std::erase_if(processes, [&](const Process& x) { return x.id == p; });
        names.erase(p);
        channels = std::move(rest);
    }

    GraphBuilder b;
    for (Process& p : processes)
        b.addProcess(std::move(p.id), std::move(p.parallelDegrees));
    for (ChannelSpec& c : channels)
        b.addChannel(std::move(c.writer), std::move(c.reader), std::move(c.color));
    result.graph = b.build();
    return result;
}

} // namespace

std::string_view toString(LaneRole r) {
    switch (r) {
    case LaneRole::Distribute: return "distribute";
    case LaneRole::Duplicate: return "duplicate";
    case LaneRole::Gather: return "gather";
    }
    return "?";
}

std::string laneColor(std::string_view process, int degree) {
    return std::string(process) + "∥" + std::to_string(degree);
}

UnfoldedGraph unfoldTopology(const MapnGraph& g) { return rewrite(g); }

UnfoldedGraph unfoldGraph(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                          const ParallelRules& rules) {
    for (const Process& p : g.processes()) {
        if (!p.isParallel())
            continue;
        for (const Metric& m : metrics.metrics()) {
            if (rules.find(std::pair<std::string_view, std::string_view>{p.id, m.name}) == rules.end())
                throw UnfoldError("missing parallel rule for process '" + p.id + "', metric '" + m.name + "'");
            if (!ann.find(p.id, m.name))
                throw UnfoldError("missing annotation for parallel process '" + p.id + "', metric '" + m.name +
                                  "'");
        }
    }

    UnfoldedGraph u = rewrite(g);

    u.annotations = ann;
    for (const Process& p : g.processes())
        if (p.isParallel())
            u.annotations.eraseProcess(p.id);
    for (const auto& [id, prov] : u.provenance) {
        for (const Metric& m : metrics.metrics()) {
            const ParallelRule& rule =
                rules.find(std::pair<std::string_view, std::string_view>{prov.original, m.name})->second;
            const std::vector<double>& original = *ann.find(prov.original, m.name);
            std::vector<double> values(original.size());
            for (std::size_t t = 0; t < original.size(); ++t) {
                switch (prov.role) {
                case LaneRole::Duplicate: values[t] = rule.dup.apply(original[t], prov.degree); break;
                // A degree-1 lane neither distributes nor gathers anything.
                case LaneRole::Distribute: values[t] = prov.degree == 1 ? 0.0 : rule.overheadIn.at(prov.degree); break;
                case LaneRole::Gather: values[t] = prov.degree == 1 ? 0.0 : rule.overheadOut.at(prov.degree); break;
                }
            }
            u.annotations.set(id, m.name, std::move(values));
        }
    }

    const bool hadParallel = !u.provenance.empty();
    if (hadParallel) {
        auto diagnostics = validate(u.graph);
        if (hasErrors(diagnostics))
            throw ValidationError(std::move(diagnostics));
    }
    return u;
}

std::uint64_t countUnfoldedVariants(const MapnGraph& g, std::uint64_t maxAssignments) {
    const bool anyParallel =
        std::any_of(g.processes().begin(), g.processes().end(), [](const Process& p) { return p.isParallel(); });
    EnumerationOptions opts;
    opts.maxAssignments = maxAssignments;
    return anyParallel ? countVariants(unfoldTopology(g).graph, opts) : countVariants(g, opts);
}

} // namespace mapn
