#include "mapn/explore.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <unordered_map>

namespace mapn {

ChannelSet& ChannelSet::operator|=(const ChannelSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i)
        words_[i] |= o.words_[i];
    return *this;
}

std::size_t ChannelSet::count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<ChannelIndex> ChannelSet::indices() const {
    std::vector<ChannelIndex> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            out.push_back(static_cast<ChannelIndex>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
            w &= w - 1;
        }
    }
    return out;
}

ChannelSet ChannelSet::fromWords(std::span<const std::uint64_t> words) {
    ChannelSet s;
    s.words_.assign(words.begin(), words.end());
    return s;
}

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

/// Orders `candidates` best first (ties by canonical key) and keeps `best`.
/// `value(i, m)` is record i's value of metric m at the chosen target.
template <class Value, class Channels>
std::vector<std::uint32_t> selectBest(const MapnGraph& g, std::vector<std::uint32_t> candidates,
                                      const MetricSet& metrics, std::size_t best, Value value, Channels channels) {
    if (best == 0 || candidates.size() <= best)
        return candidates;
    std::unordered_map<std::uint32_t, std::string> keys;
    auto key = [&](std::uint32_t i) -> const std::string& {
        auto it = keys.find(i);
        if (it == keys.end())
            it = keys.emplace(i, canonicalKey(g, channels(i))).first;
        return it->second;
    };
    std::sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            const double x = value(a, m);
            const double y = value(b, m);
            if (x == y)
                continue;
            return metrics[m].direction == Direction::LowerIsBetter ? x < y : x > y;
        }
        return key(a) < key(b);
    });
    candidates.resize(best);
    return candidates;
}

std::vector<ChannelIndex> indicesOf(const std::uint64_t* words, std::size_t count) {
    return ChannelSet::fromWords({words, count}).indices();
}

} // namespace

std::vector<bool> monotoneMetrics(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                                  std::size_t targetIndex) {
    std::vector<bool> out(metrics.size(), false);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const Metric& metric = metrics[m];
        const bool mergeOk = metric.merge == Op::Max || metric.merge == Op::Sum;
        const bool composeOk = metric.compose == Op::Max || metric.compose == Op::Sum;
        if (!mergeOk || !composeOk)
            continue;
        if (metric.merge == Op::Max && metric.compose == Op::Max) {
            out[m] = true;
            continue;
        }
        bool nonNegative = true;
        for (const Process& p : g.processes()) {
            const auto* v = ann.find(p.id, metric.name);
            if (!v || targetIndex >= v->size() || !((*v)[targetIndex] >= 0.0)) {
                nonNegative = false;
                break;
            }
        }
        out[m] = nonNegative;
    }
    return out;
}

bool violatesMonotoneBound(std::span<const double> evals, const MetricSet& metrics, const ExplorationConfig& cfg,
                           const PruneOptions& opts) {
    for (const Constraint& c : cfg.constraints) {
        const std::size_t m = metrics.index(c.metric);
        if (m >= opts.monotone.size() || !opts.monotone[m])
            continue;
        const double v = evals[m * opts.targets + cfg.targetIndex];
        switch (c.comparator) {
        case Comparator::Less:
            if (v >= c.bound)
                return true;
            break;
        case Comparator::LessEqual:
            if (v > c.bound)
                return true;
            break;
        case Comparator::Equal:
            if (v > c.bound + kEqualityTolerance)
                return true;
            break;
        default: break;
        }
    }
    return false;
}

std::vector<AlternativeRecord> prune(const MapnGraph& g, std::vector<AlternativeRecord> records,
                                     const MetricSet& metrics, const ExplorationConfig& cfg,
                                     const PruneOptions& opts) {
    auto value = [&](std::uint32_t i, std::size_t m) {
        return records[i].evals[m * opts.targets + cfg.targetIndex];
    };
    std::vector<std::uint32_t> keep;
    for (std::uint32_t i = 0; i < records.size(); ++i) {
        if (violatesMonotoneBound(records[i].evals, metrics, cfg, opts))
            continue;
        if (opts.atSink) {
            bool ok = true;
            for (const Constraint& c : cfg.constraints)
                ok = ok && c.satisfiedBy(value(i, metrics.index(c.metric)));
            if (!ok)
                continue;
        }
        keep.push_back(i);
    }
    if (opts.atSink || cfg.mode == Mode::Beam)
        keep = selectBest(g, std::move(keep), metrics, cfg.best, value,
                          [&](std::uint32_t i) { return records[i].channels.indices(); });
    std::vector<AlternativeRecord> out;
    out.reserve(keep.size());
    for (std::uint32_t i : keep)
        out.push_back(std::move(records[i]));
    return out;
}

Explorer::Explorer(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann, ExplorationConfig cfg)
    : g_(g), metrics_(metrics), cfg_(std::move(cfg)), targets_(ann.targetCount()) {
    checkConfig(cfg_, metrics_, ann);
    if (metrics_.empty())
        throw ExplorationError("exploration needs at least one metric");
    if (g.colorCount() > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max()))
        throw ExplorationError("too many colors");
    auto order = g.topologicalOrder();
    if (!order)
        throw ExplorationError("cannot explore a cyclic graph");
    byRank_ = std::move(*order);
    rank_.assign(g.processCount(), 0);
    for (std::size_t i = 0; i < byRank_.size(); ++i)
        rank_[byRank_[i]] = i;

    std::vector<ProcessIndex> sources, sinks;
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        if (g.readChannels(p).empty())
            sources.push_back(p);
        if (g.writeChannels(p).empty())
            sinks.push_back(p);
    }
    if (sources.size() != 1 || sinks.size() != 1)
        throw ExplorationError("exploration needs exactly one source and one sink");
    source_ = sources.front();
    sink_ = sinks.front();

    forkOrdinal_.assign(g.processCount(), -1);
    for (ProcessIndex p = 0; p < g.processCount(); ++p)
        if (g.isFork(p))
            forkOrdinal_[p] = static_cast<std::int32_t>(forks_++);

    colorSink_.assign(g.colorCount(), -1);
    for (ColorIndex c = 0; c < g.colorCount(); ++c) {
        const ColoredSubgraph sub = coloredSubgraph(g, c);
        if (sub.sinks.size() == 1)
            colorSink_[c] = static_cast<std::int32_t>(sub.sinks.front());
    }

    evalWidth_ = metrics_.size() * targets_;
    nu_.assign(g.processCount(), std::vector<double>(evalWidth_));
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        for (std::size_t m = 0; m < metrics_.size(); ++m) {
            const auto* v = ann.find(g.processName(p), metrics_[m].name);
            if (!v)
                throw ExplorationError("missing annotation for process '" + g.processName(p) + "', metric '" +
                                       metrics_[m].name + "'");
            std::copy(v->begin(), v->end(), nu_[p].begin() + static_cast<std::ptrdiff_t>(m * targets_));
        }
    }

    pruneOpts_.monotone = monotoneMetrics(g, metrics_, ann, cfg_.targetIndex);
    pruneOpts_.targets = targets_;

    words_ = (g.channelCount() + 63) / 64;
    treated_.assign(g.colorCount(), false);
    nextLabel_.assign(g.colorCount(), 0);
    visits_.assign(g.channelCount(), 0);
    pools_.assign(g.processCount(), {});
    version_.assign(g.processCount(), 0);
    walked_.assign(g.processCount() * g.colorCount(), kNever);
    pushes_.assign(g.processCount() * g.colorCount(), 0);
    pending_.assign(g.channelCount(), {});
}

void Explorer::record(TraceEvent::Kind kind, ProcessIndex p, ColorIndex c, ChannelIndex ch) {
    if (tracing_)
        trace_.push_back(TraceEvent{kind, p, c, ch});
}

void Explorer::push(ProcessIndex p, ColorIndex c) {
    if (!queue_.insert(Entry{rank_[p], c}).second)
        return;
    ++pushes_[slot(p, c)];
    record(TraceEvent::Kind::PushQ, p, c);
}

void Explorer::initialize() {
    if (initialized_)
        return;
    initialized_ = true;
    Pool& pool = pools_[source_];
    pool.bits.assign(words_, 0);
    pool.choices.assign(forks_, -1);
    pool.evals = nu_[source_];
    pool.labels.push_back(0);
    pool.labelColors.push_back(0);
    version_[source_] = 1;
    for (ColorIndex c : g_.outgoingColors(source_)) {
        treated_[c] = true;
        push(source_, c);
    }
}

bool Explorer::hasAlternativeOfColor(ProcessIndex p, ChannelIndex incoming) const {
    if (pools_[p].size() > 0)
        return true;
    // The incoming channel is about to complete p's read group of its color.
    const ColorIndex in = g_.channel(incoming).color;
    for (ChannelIndex r : g_.readChannels(p))
        if (g_.channel(r).color == in && r != incoming && visits_[r] == 0)
            return false;
    return true;
}

void Explorer::updateExplorationQueue(ProcessIndex reader, ColorIndex color, ChannelIndex incoming) {
    for (ChannelIndex r : g_.readChannels(reader))
        if (r != incoming && visits_[r] == 0)
            return;
    const auto incomingColors = g_.incomingColors(reader);
    for (ColorIndex out : g_.outgoingColors(reader)) {
        if (out == color)
            continue;
        if (treated_[out]) {
            if (hasAlternativeOfColor(reader, incoming))
                push(reader, out);
        } else if (std::find(incomingColors.begin(), incomingColors.end(), out) == incomingColors.end()) {
            treated_[out] = true;
            push(reader, out);
        }
    }
}

bool Explorer::propagateAlternatives(ChannelIndex ch) {
    const Channel& channel = g_.channel(ch);
    const ProcessIndex w = channel.writer;
    const ProcessIndex r = channel.reader;
    ++visits_[ch];
    record(TraceEvent::Kind::Propagate, w, channel.color, ch);

    Pending& pd = pending_[ch];
    if (pd.version != version_[w]) {
        pd.version = version_[w];
        const auto n = static_cast<std::uint32_t>(pools_[w].size());
        pd.member.resize(n, 0);
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t i = 0; i < n; ++i)
            if ((cfg_.mode == Mode::Beam || !pd.member[i]) &&
                !violatesMonotoneBound({evalsOf(w, i), evalWidth_}, metrics_, cfg_, pruneOpts_))
                candidates.push_back(i);
        if (cfg_.mode == Mode::Beam)
            candidates = selectBest(
                g_, std::move(candidates), metrics_, cfg_.best,
                [&](std::uint32_t i, std::size_t m) { return evalsOf(w, i)[m * targets_ + cfg_.targetIndex]; },
                [&](std::uint32_t i) { return indicesOf(&pools_[w].bits[i * words_], words_); });
        for (std::uint32_t i : candidates) {
            if (pd.member[i])
                continue;
            pd.member[i] = 1;
            pd.fresh.push_back(i);
        }
    }

    for (ChannelIndex rc : g_.readChannels(r))
        if (g_.channel(rc).color == channel.color && visits_[rc] == 0)
            return false;
    combine(r, channel.color);
    return true;
}

void Explorer::combine(ProcessIndex reader, ColorIndex color) {
    std::vector<ChannelIndex> group;
    bool anyFresh = false;
    for (ChannelIndex c : g_.readChannels(reader)) {
        if (g_.channel(c).color == color) {
            group.push_back(c);
            anyFresh = anyFresh || !pending_[c].fresh.empty();
        }
    }
    if (!anyFresh)
        return;
    const std::size_t k = group.size();
    std::vector<ProcessIndex> writers(k);
    for (std::size_t j = 0; j < k; ++j)
        writers[j] = g_.channel(group[j]).writer;

    std::vector<std::uint64_t> groupMask(words_, 0);
    for (ChannelIndex c : group)
        groupMask[c / 64] |= std::uint64_t{1} << (c % 64);

    Pool& out = pools_[reader];
    const std::vector<double>& self = nu_[reader];
    std::vector<std::uint64_t> bitsBuf((k + 1) * words_, 0);
    std::vector<std::int16_t> choiceBuf((k + 1) * forks_, -1);
    std::vector<std::uint32_t> picked(k);
    std::vector<double> operands(k);
    bool added = false;

    // Semi-naive join: phase i takes fresh records on channel i, records
    // already combined on channels before i, and every record after i. Each
    // new combination is produced exactly once.
    std::vector<std::vector<std::uint32_t>> lists(k);
    for (std::size_t phase = 0; phase < k; ++phase) {
        if (pending_[group[phase]].fresh.empty())
            continue;
        bool empty = false;
        for (std::size_t j = 0; j < k; ++j) {
            const Pending& pd = pending_[group[j]];
            if (j < phase)
                lists[j] = pd.combined;
            else if (j == phase)
                lists[j] = pd.fresh;
            else {
                lists[j] = pd.combined;
                lists[j].insert(lists[j].end(), pd.fresh.begin(), pd.fresh.end());
            }
            empty = empty || lists[j].empty();
        }
        if (empty)
            continue;

        // Forks fixed in every candidate record act as a join signature:
        // records can only combine when their signatures agree.
        std::vector<std::size_t> common;
        if (k > 1) {
            for (std::size_t f = 0; f < forks_; ++f) {
                bool all = true;
                for (std::size_t j = 0; j < k && all; ++j)
                    for (std::uint32_t i : lists[j])
                        if (pools_[writers[j]].choices[i * forks_ + f] < 0) {
                            all = false;
                            break;
                        }
                if (all)
                    common.push_back(f);
            }
        }
        auto signature = [&](const std::int16_t* choices) {
            std::uint64_t h = 0x84222325cbf29ce4ULL;
            for (std::size_t f : common)
                h = (h ^ static_cast<std::uint64_t>(choices[f] + 1)) * 0x100000001b3ULL;
            return h;
        };
        std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> buckets(k);
        for (std::size_t j = 1; j < k; ++j)
            for (std::uint32_t i : lists[j])
                buckets[j][signature(&pools_[writers[j]].choices[i * forks_])].push_back(i);

        auto emit = [&] {
            const std::uint64_t* bits = &bitsBuf[k * words_];
            for (std::size_t x = 0; x < words_; ++x)
                out.bits.push_back(bits[x] | groupMask[x]);
            out.choices.insert(out.choices.end(), choiceBuf.begin() + static_cast<std::ptrdiff_t>(k * forks_),
                               choiceBuf.end());
            for (std::size_t m = 0; m < metrics_.size(); ++m) {
                for (std::size_t t = 0; t < targets_; ++t) {
                    const std::size_t at = m * targets_ + t;
                    for (std::size_t j = 0; j < k; ++j)
                        operands[j] = evalsOf(writers[j], picked[j])[at];
                    out.evals.push_back(
                        applyCompose(metrics_[m].compose, self[at], applyMerge(metrics_[m].merge, operands)));
                }
            }
            out.labels.push_back(nextLabel_[color]++);
            out.labelColors.push_back(color);
            added = true;
        };

        auto extend = [&](auto&& recurse, std::size_t j, std::uint64_t sig) -> void {
            if (j == k) {
                emit();
                return;
            }
            const Pool& pool = pools_[writers[j]];
            const std::int32_t ordinal = forkOrdinal_[writers[j]];
            std::uint64_t* acc = &bitsBuf[j * words_];
            std::uint64_t* next = &bitsBuf[(j + 1) * words_];
            const std::int16_t* accChoices = &choiceBuf[j * forks_];
            std::int16_t* nextChoices = &choiceBuf[(j + 1) * forks_];
            auto visit = [&](std::uint32_t i) {
                const std::int16_t* rc = &pool.choices[i * forks_];
                if (j > 0) {
                    for (std::size_t f = 0; f < forks_; ++f) {
                        if (accChoices[f] >= 0 && rc[f] >= 0 && accChoices[f] != rc[f])
                            return;
                        nextChoices[f] = rc[f] >= 0 ? rc[f] : accChoices[f];
                    }
                } else {
                    std::copy(rc, rc + forks_, nextChoices);
                }
                if (ordinal >= 0) {
                    std::int16_t& s = nextChoices[ordinal];
                    if (s >= 0 && s != static_cast<std::int16_t>(color))
                        return;
                    s = static_cast<std::int16_t>(color);
                }
                const std::uint64_t* rb = &pool.bits[i * words_];
                for (std::size_t x = 0; x < words_; ++x)
                    next[x] = (j > 0 ? acc[x] : 0) | rb[x];
                picked[j] = i;
                recurse(recurse, j + 1, j == 0 ? signature(rc) : sig);
            };
            if (j == 0) {
                for (std::uint32_t i : lists[0])
                    visit(i);
            } else if (auto it = buckets[j].find(sig); it != buckets[j].end()) {
                for (std::uint32_t i : it->second)
                    visit(i);
            }
        };
        extend(extend, 0, 0);
    }

    for (ChannelIndex c : group) {
        Pending& pd = pending_[c];
        pd.combined.insert(pd.combined.end(), pd.fresh.begin(), pd.fresh.end());
        pd.fresh.clear();
    }
    if (added)
        ++version_[reader];
}

void Explorer::walk(ProcessIndex p, ColorIndex c) {
    walked_[slot(p, c)] = version_[p];
    std::deque<ChannelIndex> q;
    for (ChannelIndex ch : g_.writeChannels(p))
        if (g_.channel(ch).color == c)
            q.push_back(ch);
    while (!q.empty()) {
        const ChannelIndex ch = q.front();
        q.pop_front();
        const ProcessIndex r = g_.channel(ch).reader;
        updateExplorationQueue(r, c, ch);
        if (!propagateAlternatives(ch))
            continue;
        record(TraceEvent::Kind::Ready, r, c, ch);
        std::uint64_t& seen = walked_[slot(r, c)];
        if (seen == version_[r])
            continue;
        seen = version_[r];
        for (ChannelIndex next : g_.writeChannels(r))
            if (g_.channel(next).color == c)
                q.push_back(next);
    }
}

bool Explorer::step() {
    initialize();
    if (queue_.empty())
        return false;
    const Entry e = *queue_.begin();
    queue_.erase(queue_.begin());
    const ProcessIndex p = byRank_[e.first];
    const ColorIndex c = e.second;
    if (walked_[slot(p, c)] == version_[p]) {
        record(TraceEvent::Kind::SkipQ, p, c);
        return true;
    }
    record(TraceEvent::Kind::PopQ, p, c);
    walk(p, c);
    return true;
}

std::vector<Variant> Explorer::run() {
    initialize();
    while (step()) {
    }
    return results();
}

AlternativeRecord Explorer::materialize(ProcessIndex p, std::uint32_t i) const {
    const Pool& pool = pools_[p];
    AlternativeRecord r;
    r.channels = ChannelSet::fromWords({&pool.bits[i * words_], words_});
    r.choices.assign(pool.choices.begin() + static_cast<std::ptrdiff_t>(i * forks_),
                     pool.choices.begin() + static_cast<std::ptrdiff_t>((i + 1) * forks_));
    r.evals.assign(evalsOf(p, i), evalsOf(p, i) + evalWidth_);
    r.frontier = p;
    r.labelColor = pool.labelColors[i];
    r.label = pool.labels[i];
    r.isSink = p != source_ && colorSink_[r.labelColor] == static_cast<std::int32_t>(p);
    return r;
}

std::vector<AlternativeRecord> Explorer::alternatives(ProcessIndex p) const {
    std::vector<AlternativeRecord> out;
    for (std::uint32_t i = 0; i < pools_.at(p).size(); ++i)
        out.push_back(materialize(p, i));
    return out;
}

Evaluations Explorer::evaluations(const AlternativeRecord& r) const {
    Evaluations out(metrics_.size(), std::vector<double>(targets_));
    for (std::size_t m = 0; m < metrics_.size(); ++m)
        for (std::size_t t = 0; t < targets_; ++t)
            out[m][t] = r.evals[m * targets_ + t];
    return out;
}

std::vector<Variant> Explorer::results() const {
    std::vector<Variant> out;
    const Pool& pool = pools_[sink_];
    for (std::uint32_t i = 0; i < pool.size(); ++i) {
        Variant v;
        v.evals.assign(metrics_.size(), std::vector<double>(targets_));
        for (std::size_t m = 0; m < metrics_.size(); ++m)
            for (std::size_t t = 0; t < targets_; ++t)
                v.evals[m][t] = evalsOf(sink_, i)[m * targets_ + t];
        if (!checkFeasible(v.evals, metrics_, cfg_))
            continue;
        v.channels = indicesOf(&pool.bits[i * words_], words_);
        v.key = canonicalKey(g_, v.channels);
        out.push_back(std::move(v));
    }
    return rankVariants(std::move(out), metrics_, cfg_);
}

std::vector<std::pair<ProcessIndex, ColorIndex>> Explorer::queue() const {
    std::vector<std::pair<ProcessIndex, ColorIndex>> out;
    for (const Entry& e : queue_)
        out.emplace_back(byRank_[e.first], e.second);
    return out;
}

std::string Explorer::describe(const TraceEvent& e) const {
    const std::string pc = "(" + g_.processName(e.process) + ", " + g_.color(e.color) + ")";
    switch (e.kind) {
    case TraceEvent::Kind::PushQ: return "push " + pc;
    case TraceEvent::Kind::PopQ: return "pop " + pc;
    case TraceEvent::Kind::SkipQ: return "skip " + pc;
    case TraceEvent::Kind::Propagate: return "propagate " + g_.channelLabel(e.channel);
    case TraceEvent::Kind::Ready: return "ready " + pc;
    }
    return "?";
}

std::vector<Variant> exploreGraph(const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                                  const ExplorationConfig& cfg) {
    Explorer e(g, metrics, ann, cfg);
    return e.run();
}

} // namespace mapn
