#include "fixtures.hpp"

#include <mapn/format.hpp>
#include <mapn/gen.hpp>
#include <mapn/unfold.hpp>

#include <functional>
#include <stdexcept>

namespace mapn::testing {

namespace {

constexpr const char* kReferenceBody = R"(mapn 1
process a
process b
process c
process d
process e
process f
process g
process h
process i
process j
process k
process l
process m
process n
process o
process p
process q
process r
process s
process t parallel 1 2 4
process u
process v
process w
process x

# backbone
channel a b black
channel b c black
channel c d black
channel d e black
channel e f black
channel f g black
channel g m black
channel g o black
channel m n black
channel n j black
channel o j black
channel j v black
channel v x black
channel x u black

channel c w purple
channel w f purple
channel b p green
channel p q green
channel q d green
channel p r blue
channel r d blue
channel p s orange
channel s e orange
channel g k red
channel g i red
channel k h red
channel i h red
channel i l red
channel h j red
channel l j red
channel v t turkis
channel t u turkis

metric time priority=0 merge=max compose=sum direction=lower
annotate a time 1
annotate b time 2
annotate c time 3
annotate d time 4
annotate e time 5
annotate f time 6
annotate g time 7
annotate h time 3
annotate i time 2
annotate j time 2
annotate k time 5
annotate l time 4
annotate m time 3
annotate n time 2
annotate o time 4
annotate p time 2
annotate q time 3
annotate r time 6
annotate s time 4
annotate t time 8
annotate u time 1
annotate v time 1
annotate w time 9
annotate x time 3
par_rule t time dup=divide in=1,0.5 out=1,0.5
)";

constexpr const char* kBlockViolatorExtra = R"(
process f1
process f2
process f3
channel f f1 dark_orange
channel f1 f2 dark_orange
channel f2 f3 dark_orange
channel f3 o dark_orange
annotate f1 time 1
annotate f2 time 2
annotate f3 time 3
)";

} // namespace

MapnGraph edges(const std::vector<ChannelSpec>& channels) {
    GraphBuilder b;
    for (const ChannelSpec& c : channels) {
        b.ensureProcess(c.writer);
        b.ensureProcess(c.reader);
        b.addChannel(c.writer, c.reader, c.color);
    }
    return b.build();
}

std::string referenceText() { return kReferenceBody; }
Model reference() { return parseGraph(referenceText()); }

std::string blockViolatorText() { return std::string(kReferenceBody) + kBlockViolatorExtra; }
Model blockViolator() { return parseGraph(blockViolatorText()); }

std::string chainText() {
    return "mapn 1\n"
           "process a\nprocess b\nprocess c\n"
           "channel a b k\nchannel b c k\n"
           "metric time\n"
           "annotate a time 1\nannotate b time 2\nannotate c time 3\n";
}

Model diamond() {
    return parseGraph("mapn 1\n"
                      "channel a b k\nchannel a c k\nchannel b d k\nchannel c d k\n"
                      "process a\nprocess b\nprocess c\nprocess d\n"
                      "metric time merge=max compose=sum\n"
                      "annotate a time 1\nannotate b time 2\nannotate c time 5\nannotate d time 1\n");
}

std::string violatorText(int property) {
    switch (property) {
    case 1: // black split into {a,b} and {c,d}
        return "mapn 1\nprocess a\nprocess b\nprocess c\nprocess d\n"
               "channel a b k\nchannel b c r\nchannel c d k\n";
    case 2:
        return "mapn 1\nprocess a\nprocess b\nprocess c\nprocess d\n"
               "channel a b k\nchannel b c k\nchannel c b k\nchannel c d k\n";
    case 3:
        return "mapn 1\nprocess a\nprocess b\nprocess c\n"
               "channel a b k\nchannel a c k\n";
    case 4: // fork a writes one black and two red channels
        return "mapn 1\nprocess a\nprocess b\nprocess c\nprocess d\nprocess e\n"
               "channel a b k\nchannel a c r\nchannel a d r\n"
               "channel b e k\nchannel c e r\nchannel d e r\n";
    case 5:
        return "mapn 1\nprocess a\nprocess p parallel 1 2\nprocess b\nprocess c\nprocess d\n"
               "channel a p k\nchannel p b k\nchannel p c r\nchannel b d k\nchannel c d r\n";
    case 6: // red bypasses the black split at g
        return "mapn 1\nprocess s\nprocess g\nprocess m\nprocess o\nprocess j\nprocess r1\n"
               "channel s g k\nchannel g m k\nchannel g o k\nchannel m j k\nchannel o j k\n"
               "channel s r1 r\nchannel r1 o r\n";
    }
    throw std::invalid_argument("property must be 1..6");
}

MapnGraph randomDag(std::mt19937_64& rng, int n, double extraEdgeProbability) {
    GraphBuilder b;
    for (int i = 0; i < n; ++i)
        b.addProcess("v" + std::to_string(i));
    std::vector<std::vector<bool>> edge(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    auto add = [&](int from, int to) {
        if (!edge[from][to]) {
            edge[from][to] = true;
            b.addChannel("v" + std::to_string(from), "v" + std::to_string(to), "k");
        }
    };
    std::bernoulli_distribution extra(extraEdgeProbability);
    for (int i = 1; i < n; ++i)
        add(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
    for (int i = 0; i < n - 1; ++i) {
        bool hasSucc = false;
        for (int j = i + 1; j < n; ++j)
            hasSucc = hasSucc || edge[i][j];
        if (!hasSucc)
            add(i, std::uniform_int_distribution<int>(i + 1, n - 1)(rng));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (extra(rng))
                add(i, j);
    return b.build();
}

double longestPath(const MapnGraph& g, const std::vector<double>& nodeValue) {
    ProcessIndex source = 0;
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        if (g.readChannels(p).empty())
            source = p;
    double best = -1e300;
    std::function<void(ProcessIndex, double)> dfs = [&](ProcessIndex p, double acc) {
        acc += nodeValue[p];
        if (g.writeChannels(p).empty()) {
            best = std::max(best, acc);
            return;
        }
        for (ChannelIndex c : g.writeChannels(p))
            dfs(g.channel(c).reader, acc);
    };
    dfs(source, 0.0);
    return best;
}

void randomAnnotations(const MapnGraph& g, const MetricSet& metrics, AnnotationTable& ann, std::mt19937_64& rng,
                       int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    for (const Metric& m : metrics.metrics())
        for (const Process& p : g.processes()) {
            std::vector<double> values(ann.targetCount());
            for (double& v : values)
                v = dist(rng);
            ann.set(p.id, m.name, std::move(values));
        }
}

Prepared prepare(Model m) {
    UnfoldedGraph u = unfoldGraph(m.graph, m.metrics, m.annotations, m.rules);
    Prepared p{std::move(m), std::move(u.graph), std::move(u.annotations)};
    return p;
}

Model generated(std::uint64_t targetVariants, std::uint64_t seed, int parallelCount, bool withEnergy) {
    SyntheticSpec spec;
    spec.targetVariants = targetVariants;
    spec.seed = seed;
    spec.parallelCount = parallelCount;
    spec.withEnergy = withEnergy;
    return generateSynthetic(spec);
}

} // namespace mapn::testing
