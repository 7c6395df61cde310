#include <doctest.h>

#include "fixtures.hpp"

#include <mapn/error.hpp>
#include <mapn/format.hpp>
#include <mapn/oracle.hpp>

#include <algorithm>
#include <set>

using namespace mapn;
using namespace mapn::testing;

namespace {

std::set<std::string> keys(const std::vector<Variant>& vs) {
    std::set<std::string> out;
    for (const Variant& v : vs)
        out.insert(v.key);
    return out;
}

bool touches(const MapnGraph& g, const Variant& v, const std::string& p) {
    const ProcessIndex idx = g.processIndex(p);
    return std::any_of(v.channels.begin(), v.channels.end(), [&](ChannelIndex c) {
        return g.channel(c).writer == idx || g.channel(c).reader == idx;
    });
}

} // namespace

TEST_CASE("monochromatic graph has one variant") {
    Model m = diamond();
    EnumerationResult r = enumerateVariants(m.graph);
    REQUIRE(r.variants.size() == 1);
    CHECK(r.variants[0].channels.size() == m.graph.channelCount());
    CHECK(r.flagged.empty());
}

TEST_CASE("two-color diamond has two variants") {
    MapnGraph g = edges({{"a", "b", "black"}, {"a", "c", "red"}, {"b", "d", "black"}, {"c", "d", "red"}});
    EnumerationResult r = enumerateVariants(g);
    CHECK(keys(r.variants) == std::set<std::string>{"a>b#black;b>d#black", "a>c#red;c>d#red"});
    CHECK(countVariants(g) == 2);
}

TEST_CASE("reference graph") {
    Model m = reference();
    EnumerationResult r = enumerateVariants(m.graph);
    CHECK(r.variants.size() == 20);
    CHECK(r.flagged.empty());
    CHECK(keys(r.variants).size() == r.variants.size());

    int purple = 0;
    const ColorIndex purpleColor = m.graph.colorIndex("purple");
    for (const Variant& v : r.variants) {
        const bool hasPurple = std::any_of(v.channels.begin(), v.channels.end(),
                                           [&](ChannelIndex c) { return m.graph.channel(c).color == purpleColor; });
        if (!hasPurple)
            continue;
        ++purple;
        CHECK(touches(m.graph, v, "w"));
        CHECK_FALSE(touches(m.graph, v, "d"));
        CHECK_FALSE(touches(m.graph, v, "e"));
    }
    CHECK(purple == 4);

    EnumerationOptions reversed;
    reversed.reverseChoiceOrder = true;
    CHECK(keys(enumerateVariants(m.graph, reversed).variants) == keys(r.variants));

    UnfoldedGraph u = unfoldGraph(m.graph, m.metrics, m.annotations, m.rules);
    CHECK(enumerateVariants(u.graph).variants.size() == 40);
}

TEST_CASE("enumeration errors") {
    CHECK_THROWS_AS(enumerateVariants(parseGraph(violatorText(2)).graph), EnumerationError);
    CHECK_THROWS_AS(enumerateVariants(parseGraph(violatorText(3)).graph), EnumerationError);
    EnumerationOptions tiny;
    tiny.maxAssignments = 3;
    CHECK_THROWS_AS(enumerateVariants(reference().graph, tiny), EnumerationError);
}

TEST_CASE("evaluateAndRank") {
    Model chain = parseGraph(chainText());
    auto vs = evaluateAndRank(enumerateVariants(chain.graph).variants, chain.graph, chain.metrics, chain.annotations,
                              ExplorationConfig{});
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].evals[0][0] == 6);

    ExplorationConfig impossible;
    impossible.constraints = {{"time", Comparator::Less, 1}};
    CHECK(evaluateAndRank(enumerateVariants(chain.graph).variants, chain.graph, chain.metrics, chain.annotations,
                          impossible)
              .empty());

    Model m = reference();
    auto all = evaluateAndRank(enumerateVariants(m.graph).variants, m.graph, m.metrics, m.annotations,
                               ExplorationConfig{});
    ExplorationConfig top;
    top.best = 5;
    auto best = evaluateAndRank(enumerateVariants(m.graph).variants, m.graph, m.metrics, m.annotations, top);
    REQUIRE(best.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(best[i].key == all[i].key);
    for (std::size_t i = 1; i < all.size(); ++i)
        CHECK(all[i - 1].evals[0][0] <= all[i].evals[0][0]);
}
