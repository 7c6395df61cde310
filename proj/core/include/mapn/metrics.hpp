#pragma once

#include "mapn/graph.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mapn {

/// Aggregation operator vocabulary. As a merge operator it is n-ary over
/// predecessor values; as a compose operator it is binary.
enum class Op { Max, Min, Sum, Avg, Mul };

enum class Direction { LowerIsBetter, HigherIsBetter };

std::string_view toString(Op op);
std::string_view toString(Direction d);
std::optional<Op> parseOp(std::string_view s);

struct Metric {
    std::string name;
    int priority = 0; // lower value = higher priority
    Direction direction = Direction::LowerIsBetter;
    Op merge = Op::Max;
    Op compose = Op::Sum;

    friend bool operator==(const Metric&, const Metric&) = default;
};

/// Metrics ordered by priority. Names and priorities are unique.
class MetricSet {
public:
    MetricSet() = default;
    explicit MetricSet(std::vector<Metric> metrics);

    /// Throws ConfigError on a duplicate name or priority.
    void add(Metric m);

    std::size_t size() const noexcept { return metrics_.size(); }
    bool empty() const noexcept { return metrics_.empty(); }
    std::span<const Metric> metrics() const noexcept { return metrics_; }
    const Metric& operator[](std::size_t i) const { return metrics_.at(i); }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws ConfigError for unknown names.
    std::size_t index(std::string_view name) const;

    friend bool operator==(const MetricSet&, const MetricSet&) = default;

private:
    std::vector<Metric> metrics_;
};

/// Orders (process, metric) name pairs; also accepts string_view pairs.
struct NamePairLess {
    using is_transparent = void;
    template <class A, class B>
    bool operator()(const A& a, const B& b) const {
        using View = std::pair<std::string_view, std::string_view>;
        return View(a.first, a.second) < View(b.first, b.second);
    }
};

/// ν(p, m): one value per hardware target.
class AnnotationTable {
public:
    AnnotationTable() : targets_{"default"} {}
    explicit AnnotationTable(std::vector<std::string> targets);

    std::span<const std::string> targets() const noexcept { return targets_; }
    std::size_t targetCount() const noexcept { return targets_.size(); }
    std::optional<std::size_t> findTarget(std::string_view label) const;

    /// Throws ConfigError if the vector length differs from targetCount().
    void set(std::string process, std::string metric, std::vector<double> values);
    const std::vector<double>* find(std::string_view process, std::string_view metric) const;
    bool erase(std::string_view process, std::string_view metric);
    void eraseProcess(std::string_view process);

    using Key = std::pair<std::string, std::string>;
    const std::map<Key, std::vector<double>, NamePairLess>& values() const noexcept { return values_; }

    friend bool operator==(const AnnotationTable&, const AnnotationTable&) = default;

private:
    std::vector<std::string> targets_;
    std::map<Key, std::vector<double>, NamePairLess> values_;
};

enum class DupKind { Divide, Replicate, Constant };

struct DupRule {
    DupKind kind = DupKind::Divide;
    double constant = 0.0;

    double apply(double original, int degree) const;
    friend bool operator==(const DupRule&, const DupRule&) = default;
};

/// c0 + c1 * degree
struct Affine {
    double c0 = 0.0;
    double c1 = 0.0;

    double at(int degree) const noexcept { return c0 + c1 * degree; }
    friend bool operator==(const Affine&, const Affine&) = default;
};

/// How a parallel process's annotation is derived for one metric after
/// unfolding: the duplicate rule (op∥) and the distribute/gather overheads
/// (overhead∥, also called cost∥).
struct ParallelRule {
    DupRule dup;
    Affine overheadIn;
    Affine overheadOut;

    friend bool operator==(const ParallelRule&, const ParallelRule&) = default;
};

/// Keyed by (process, metric).
using ParallelRules = std::map<std::pair<std::string, std::string>, ParallelRule, NamePairLess>;

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view toString(Comparator c);
std::optional<Comparator> parseComparator(std::string_view s);

struct Constraint {
    std::string metric;
    Comparator comparator = Comparator::LessEqual;
    double bound = 0.0;

    bool satisfiedBy(double value) const noexcept;
    friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class Mode { Exact, Beam };

struct ExplorationConfig {
    std::vector<Constraint> constraints;
    std::size_t best = 0; // 0 keeps every feasible variant
    std::size_t targetIndex = 0;
    Mode mode = Mode::Exact;

    friend bool operator==(const ExplorationConfig&, const ExplorationConfig&) = default;
};

/// Absolute tolerance of the equality comparator.
inline constexpr double kEqualityTolerance = 1e-9;

/// Throws AggregationError for avg over zero inputs.
double applyMerge(Op op, std::span<const double> values);
double applyCompose(Op op, double self, double merged);

/// Evaluates a variant (acyclic channel subset with one source and one sink)
/// bottom-up from its source, every target independently, and returns the
/// values reached at its sink.
Evaluations aggregateVariant(const MapnGraph& g, std::span<const ChannelIndex> channels,
                             const MetricSet& metrics, const AnnotationTable& ann);

/// Conjunction of every constraint at cfg.targetIndex.
bool checkFeasible(const Evaluations& evals, const MetricSet& metrics, const ExplorationConfig& cfg);

/// Strict "a ranks before b": metrics in priority order at cfg.targetIndex,
/// each per its direction, then canonical key ascending.
bool ranksBefore(const Evaluations& a, std::string_view keyA, const Evaluations& b, std::string_view keyB,
                 const MetricSet& metrics, std::size_t targetIndex);

/// Stable sort by ranksBefore, truncated to cfg.best when it is non-zero.
std::vector<Variant> rankVariants(std::vector<Variant> variants, const MetricSet& metrics,
                                  const ExplorationConfig& cfg);

void checkConfig(const ExplorationConfig& cfg, const MetricSet& metrics, const AnnotationTable& ann);

} // namespace mapn
