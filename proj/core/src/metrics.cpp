#include "mapn/metrics.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace mapn {

std::string_view toString(Op op) {
    switch (op) {
    case Op::Max: return "max";
    case Op::Min: return "min";
    case Op::Sum: return "sum";
    case Op::Avg: return "avg";
    case Op::Mul: return "mul";
    }
    return "?";
}

std::string_view toString(Direction d) { return d == Direction::LowerIsBetter ? "lower" : "higher"; }

std::optional<Op> parseOp(std::string_view s) {
    for (Op op : {Op::Max, Op::Min, Op::Sum, Op::Avg, Op::Mul})
        if (toString(op) == s)
            return op;
    return std::nullopt;
}

std::string_view toString(Comparator c) {
    switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "==";
    }
    return "?";
}

std::optional<Comparator> parseComparator(std::string_view s) {
    for (Comparator c : {Comparator::Less, Comparator::LessEqual, Comparator::Greater, Comparator::GreaterEqual,
                         Comparator::Equal})
        if (toString(c) == s)
            return c;
    return std::nullopt;
}

MetricSet::MetricSet(std::vector<Metric> metrics) {
    for (Metric& m : metrics)
        add(std::move(m));
}

void MetricSet::add(Metric m) {
    for (const Metric& existing : metrics_) {
        if (existing.name == m.name)
            throw ConfigError("duplicate metric '" + m.name + "'");
        if (existing.priority == m.priority)
            throw ConfigError("metrics '" + existing.name + "' and '" + m.name + "' share priority " +
                              std::to_string(m.priority));
    }
    if (m.priority < 0)
        throw ConfigError("metric '" + m.name + "': priority must be >= 0");
    auto pos = std::upper_bound(metrics_.begin(), metrics_.end(), m.priority,
                                [](int prio, const Metric& x) { return prio < x.priority; });
    metrics_.insert(pos, std::move(m));
}

std::optional<std::size_t> MetricSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < metrics_.size(); ++i)
        if (metrics_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t MetricSet::index(std::string_view name) const {
    if (auto i = find(name))
        return *i;
    throw ConfigError("unknown metric '" + std::string(name) + "'");
}

AnnotationTable::AnnotationTable(std::vector<std::string> targets) : targets_(std::move(targets)) {
    if (targets_.empty())
        throw ConfigError("annotation table needs at least one target");
}

std::optional<std::size_t> AnnotationTable::findTarget(std::string_view label) const {
    for (std::size_t i = 0; i < targets_.size(); ++i)
        if (targets_[i] == label)
            return i;
    return std::nullopt;
}

void AnnotationTable::set(std::string process, std::string metric, std::vector<double> values) {
    if (values.size() != targets_.size())
        throw ConfigError("annotation of '" + process + "' for '" + metric + "' has " +
                          std::to_string(values.size()) + " values, expected " + std::to_string(targets_.size()));
    values_[Key{std::move(process), std::move(metric)}] = std::move(values);
}

const std::vector<double>* AnnotationTable::find(std::string_view process, std::string_view metric) const {
    auto it = values_.find(std::pair<std::string_view, std::string_view>{process, metric});
    return it == values_.end() ? nullptr : &it->second;
}

bool AnnotationTable::erase(std::string_view process, std::string_view metric) {
    auto it = values_.find(std::pair<std::string_view, std::string_view>{process, metric});
    if (it == values_.end())
        return false;
    values_.erase(it);
    return true;
}

void AnnotationTable::eraseProcess(std::string_view process) {
    std::erase_if(values_, [&](const auto& kv) { return kv.first.first == process; });
}

double DupRule::apply(double original, int degree) const {
    switch (kind) {
    case DupKind::Divide: return original / degree;
    case DupKind::Replicate: return original;
    case DupKind::Constant: return constant;
    }
    return original;
}

bool Constraint::satisfiedBy(double value) const noexcept {
    switch (comparator) {
    case Comparator::Less: return value < bound;
    case Comparator::LessEqual: return value <= bound;
    case Comparator::Greater: return value > bound;
    case Comparator::GreaterEqual: return value >= bound;
    case Comparator::Equal: return std::abs(value - bound) <= kEqualityTolerance;
    }
    return false;
}

double applyMerge(Op op, std::span<const double> values) {
    if (values.empty())
        throw AggregationError("merge operator applied to zero inputs");
    switch (op) {
    case Op::Max: return *std::max_element(values.begin(), values.end());
    case Op::Min: return *std::min_element(values.begin(), values.end());
    case Op::Sum: return std::accumulate(values.begin(), values.end(), 0.0);
    case Op::Avg: return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    case Op::Mul: return std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
    }
    return 0.0;
}

double applyCompose(Op op, double self, double merged) {
    switch (op) {
    case Op::Max: return std::max(self, merged);
    case Op::Min: return std::min(self, merged);
    case Op::Sum: return self + merged;
    case Op::Avg: return (self + merged) / 2.0;
    case Op::Mul: return self * merged;
    }
    return 0.0;
}

Evaluations aggregateVariant(const MapnGraph& g, std::span<const ChannelIndex> channels, const MetricSet& metrics,
                             const AnnotationTable& ann) {
    if (channels.empty())
        throw AggregationError("cannot aggregate an empty variant");
    std::vector<ChannelIndex> chans(channels.begin(), channels.end());
    std::sort(chans.begin(), chans.end());
    chans.erase(std::unique(chans.begin(), chans.end()), chans.end());

    const std::vector<ProcessIndex> procs = inducedProcesses(g, chans);
    std::unordered_map<ProcessIndex, std::size_t> local;
    for (std::size_t i = 0; i < procs.size(); ++i)
        local.emplace(procs[i], i);

    const std::size_t n = procs.size();
    std::vector<std::vector<ChannelIndex>> in(n), out(n);
    for (ChannelIndex c : chans) {
        out[local[g.channel(c).writer]].push_back(c);
        in[local[g.channel(c).reader]].push_back(c);
    }
    std::size_t sources = 0, sinks = 0, sink = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i].empty())
            ++sources;
        if (out[i].empty()) {
            ++sinks;
            sink = i;
        }
    }
    if (sources == 0 || sinks == 0)
        throw AggregationError("cycle detected in variant");
    if (sources != 1 || sinks != 1)
        throw AggregationError("variant must have exactly one source and one sink");

    const std::size_t targets = ann.targetCount();
    std::vector<std::vector<const std::vector<double>*>> nu(n, std::vector<const std::vector<double>*>(metrics.size()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            nu[i][m] = ann.find(g.processName(procs[i]), metrics[m].name);
            if (!nu[i][m])
                throw AggregationError("missing annotation for process '" + g.processName(procs[i]) +
                                       "', metric '" + metrics[m].name + "'");
        }
    }

    // Kahn order; every process is evaluated once after its predecessors.
    std::vector<std::size_t> pending(n);
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        pending[i] = in[i].size();
        if (pending[i] == 0)
            ready.push_back(i);
    }
    // value[i][m][t]
    std::vector<Evaluations> value(n);
    std::size_t done = 0;
    std::vector<double> operands;
    while (!ready.empty()) {
        const std::size_t i = ready.back();
        ready.pop_back();
        ++done;
        value[i].assign(metrics.size(), std::vector<double>(targets));
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            for (std::size_t t = 0; t < targets; ++t) {
                const double self = (*nu[i][m])[t];
                if (in[i].empty()) {
                    value[i][m][t] = self;
                    continue;
                }
                operands.clear();
                for (ChannelIndex c : in[i]) // ascending channel order
                    operands.push_back(value[local[g.channel(c).writer]][m][t]);
                value[i][m][t] = applyCompose(metrics[m].compose, self, applyMerge(metrics[m].merge, operands));
            }
        }
        for (ChannelIndex c : out[i]) {
            const std::size_t r = local[g.channel(c).reader];
            if (--pending[r] == 0)
                ready.push_back(r);
        }
    }
    if (done != n)
        throw AggregationError("cycle detected in variant");
    return value[sink];
}

bool checkFeasible(const Evaluations& evals, const MetricSet& metrics, const ExplorationConfig& cfg) {
    for (const Constraint& c : cfg.constraints) {
        const std::size_t m = metrics.index(c.metric);
        if (m >= evals.size() || cfg.targetIndex >= evals[m].size())
            throw ConfigError("evaluation missing for constrained metric '" + c.metric + "'");
        if (!c.satisfiedBy(evals[m][cfg.targetIndex]))
            return false;
    }
    return true;
}

bool ranksBefore(const Evaluations& a, std::string_view keyA, const Evaluations& b, std::string_view keyB,
                 const MetricSet& metrics, std::size_t targetIndex) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const double x = a[m][targetIndex];
        const double y = b[m][targetIndex];
        if (x == y)
            continue;
        return metrics[m].direction == Direction::LowerIsBetter ? x < y : x > y;
    }
    return keyA < keyB;
}

std::vector<Variant> rankVariants(std::vector<Variant> variants, const MetricSet& metrics,
                                  const ExplorationConfig& cfg) {
    std::stable_sort(variants.begin(), variants.end(), [&](const Variant& a, const Variant& b) {
        return ranksBefore(a.evals, a.key, b.evals, b.key, metrics, cfg.targetIndex);
    });
    if (cfg.best > 0 && variants.size() > cfg.best)
        variants.resize(cfg.best);
    return variants;
}

void checkConfig(const ExplorationConfig& cfg, const MetricSet& metrics, const AnnotationTable& ann) {
    if (cfg.targetIndex >= ann.targetCount())
        throw ConfigError("target index " + std::to_string(cfg.targetIndex) + " out of range (" +
                          std::to_string(ann.targetCount()) + " targets)");
    for (const Constraint& c : cfg.constraints) {
        metrics.index(c.metric);
        if (!std::isfinite(c.bound))
            throw ConfigError("constraint on '" + c.metric + "' has a non-finite bound");
    }
}

} // namespace mapn
