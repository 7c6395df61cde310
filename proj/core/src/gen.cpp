#include "mapn/gen.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace mapn {

namespace {

class Generator {
public:
    explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(spec.seed) {}

    Model run() {
        if (spec_.targetVariants < 1)
            throw GenerationError("targetVariants must be at least 1");
        if (spec_.parallelCount < 0)
            throw GenerationError("parallelCount must be non-negative");
        const std::uint64_t target = spec_.targetVariants;

        std::uint64_t product = 1;
        for (int i = 0; i < spec_.parallelCount; ++i) {
            product *= 3;
            if (product > 2 * target)
                throw GenerationError(std::to_string(spec_.parallelCount) +
                                      " parallel processes exceed twice the target variant count");
        }

        std::vector<std::uint64_t> blocks;
        if (product < target && (spec_.maxDepth < 1 || spec_.maxForkWidth < 2))
            throw GenerationError("more than one variant requested but forks are disabled");
        const std::uint64_t cap = std::min<std::uint64_t>(blockCapacity(1), 64);
        while (product < target) {
            // need * product < target + product <= 2 * target keeps the band.
            const std::uint64_t need = (target + product - 1) / product;
            const std::uint64_t c = uniform(2, std::min(need, cap));
            blocks.push_back(c);
            product *= c;
        }

        // Items: 0 = parallel process, otherwise a block of that many variants.
        std::vector<std::uint64_t> items = blocks;
        for (int i = 0; i < spec_.parallelCount; ++i)
            items.insert(items.begin() + static_cast<std::ptrdiff_t>(uniform(0, items.size())), 0);

        // A single variant stays a plain chain.
        diamonds_ = !items.empty();
        const std::string root = newColor();
        const std::string source = newProcess();
        std::string cur = chain(source, root, 1, 2);
        for (std::uint64_t item : items) {
            if (item == 0) {
                const std::string p = newProcess({1, 2, 4});
                channel(cur, p, root);
                parallel_.push_back(p);
                cur = chain(p, root, 1, 2);
            } else {
                cur = chain(block(cur, root, item, 1), root, 1, 2);
            }
        }
        channel(cur, newProcess(), root);

        Model m;
        m.graph = builder_.build();
        m.metrics.add(Metric{"time", 0, Direction::LowerIsBetter, Op::Max, Op::Sum});
        if (spec_.withEnergy)
            m.metrics.add(Metric{"energy", 1, Direction::LowerIsBetter, Op::Sum, Op::Sum});
        for (const Metric& metric : m.metrics.metrics())
            for (const Process& p : m.graph.processes())
                m.annotations.set(p.id, metric.name, {static_cast<double>(uniform(1, 100))});
        for (const std::string& p : parallel_) {
            for (const Metric& metric : m.metrics.metrics()) {
                ParallelRule rule;
                rule.dup.kind = DupKind::Divide;
                rule.overheadIn = Affine{static_cast<double>(uniform(0, 3)), static_cast<double>(uniform(0, 2))};
                rule.overheadOut = Affine{static_cast<double>(uniform(0, 3)), static_cast<double>(uniform(0, 2))};
                m.rules[{p, metric.name}] = rule;
            }
        }
        return m;
    }

private:
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }

    /// Largest variant count a single block at `depth` can carry.
    std::uint64_t blockCapacity(int depth) const {
        const auto w = static_cast<std::uint64_t>(spec_.maxForkWidth);
        return depth >= spec_.maxDepth ? w : w * blockCapacity(depth + 1);
    }

    std::string newProcess(std::vector<int> degrees = {}) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "n%04u", processes_++);
        builder_.addProcess(buf, std::move(degrees));
        return buf;
    }

    std::string newColor() { return "c" + std::to_string(colors_++); }

    void channel(const std::string& w, const std::string& r, const std::string& c) { builder_.addChannel(w, r, c); }

    /// Appends lo..hi plain processes after `from`, sometimes as a same-color
    /// diamond when diamonds_ is set. Returns the last process.
    std::string chain(const std::string& from, const std::string& color, std::uint64_t lo, std::uint64_t hi) {
        std::string cur = from;
        const std::uint64_t n = uniform(lo, hi);
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::string x = newProcess();
            channel(cur, x, color);
            cur = x;
            if (diamonds_ && uniform(0, 9) == 0) {
                const std::string y1 = newProcess();
                const std::string y2 = newProcess();
                const std::string z = newProcess();
                channel(x, y1, color);
                channel(x, y2, color);
                channel(y1, z, color);
                channel(y2, z, color);
                cur = z;
            }
        }
        return cur;
    }

    /// Fork, alternatives summing to `count` variants, join. The first
    /// alternative continues `color`; the others get fresh colors.
    std::string block(const std::string& from, const std::string& color, std::uint64_t count, int depth) {
        const std::uint64_t partCap = depth >= spec_.maxDepth ? 1 : blockCapacity(depth + 1);
        const auto width = static_cast<std::uint64_t>(spec_.maxForkWidth);
        const std::uint64_t kmin = std::max<std::uint64_t>(2, (count + partCap - 1) / partCap);
        const std::uint64_t kmax = std::min(width, count);
        if (kmin > kmax)
            throw GenerationError("cannot realize a block of " + std::to_string(count) + " variants");
        const std::uint64_t k = uniform(kmin, kmax);
        std::vector<std::uint64_t> parts(k, 1);
        for (std::uint64_t extra = count - k; extra > 0; --extra) {
            std::uint64_t i;
            do
                i = uniform(0, k - 1);
            while (parts[i] >= partCap);
            ++parts[i];
        }

        const std::string fork = newProcess();
        channel(from, fork, color);
        std::vector<std::pair<std::string, std::string>> ends; // (last process, color)
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::string c = i == 0 ? color : newColor();
            std::string last;
            if (parts[i] == 1) {
                last = chain(fork, c, 1, 3);
            } else {
                last = chain(fork, c, 1, 2);
                last = series(last, c, parts[i], depth + 1);
                last = chain(last, c, 1, 2);
            }
            ends.emplace_back(last, c);
        }
        const std::string join = newProcess();
        for (const auto& [last, c] : ends)
            channel(last, join, c);
        return join;
    }

    /// One block of `count` variants, or two in series when `count` splits
    /// into factors that both fit a block at this depth.
    std::string series(const std::string& from, const std::string& color, std::uint64_t count, int depth) {
        const std::uint64_t cap = blockCapacity(depth);
        std::vector<std::uint64_t> splits;
        for (std::uint64_t f = 2; f * f <= count; ++f)
            if (count % f == 0 && f <= cap && count / f <= cap)
                splits.push_back(f);
        if (!splits.empty() && uniform(0, 1) == 0) {
            const std::uint64_t f = splits[uniform(0, splits.size() - 1)];
            std::string mid = block(from, color, f, depth);
            mid = chain(mid, color, 1, 2);
            return block(mid, color, count / f, depth);
        }
        return block(from, color, count, depth);
    }

    const SyntheticSpec& spec_;
    std::mt19937_64 rng_;
    GraphBuilder builder_;
    unsigned processes_ = 0;
    unsigned colors_ = 0;
    bool diamonds_ = false;
    std::vector<std::string> parallel_;
};

} // namespace

Model generateSynthetic(const SyntheticSpec& spec) { return Generator(spec).run(); }

} // namespace mapn
