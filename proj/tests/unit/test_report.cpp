#include <doctest.h>

#include "fixtures.hpp"

#include <mapn/format.hpp>
#include <mapn/oracle.hpp>
#include <mapn/report.hpp>

#include <json.hpp>

using namespace mapn;
using namespace mapn::testing;

TEST_CASE("empty feasible set still reports stats") {
    Model m = parseGraph(chainText());
    Report r = makeReport("explore", m.graph, m.metrics, m.annotations, ExplorationConfig{}, {}, 1);
    CHECK(r.variants.empty());
    CHECK(r.stats.processes == 3);
    CHECK(r.stats.channels == 2);
    auto j = nlohmann::json::parse(writeReport(r, ReportFormat::Json));
    CHECK(j["variants"].empty());
    CHECK(j["stats"]["processes"] == 3);
    CHECK_FALSE(j.contains("timings_ms"));
    const std::string text = writeReport(r, ReportFormat::Text);
    CHECK(text.find("0 reported") != std::string::npos);
    CHECK(text.find("\x1b[") == std::string::npos);
    CHECK(writeReport(r, ReportFormat::Text, true).find("\x1b[1m") != std::string::npos);
}

TEST_CASE("one variant") {
    Model m = parseGraph(chainText());
    auto ranked = evaluateAndRank(enumerateVariants(m.graph).variants, m.graph, m.metrics, m.annotations,
                                  ExplorationConfig{});
    Report r = makeReport("enumerate", m.graph, m.metrics, m.annotations, ExplorationConfig{}, ranked, 1);
    r.timings.emplace_back("enumerate", 1.5);
    auto j = nlohmann::json::parse(writeReport(r, ReportFormat::Json));
    REQUIRE(j["variants"].size() == 1);
    CHECK(j["variants"][0]["rank"] == 1);
    CHECK(j["variants"][0]["key"] == "a>b#k;b>c#k");
    CHECK(j["variants"][0]["evaluations"]["time"]["default"] == 6);
    CHECK(j["variants"][0]["feasible"] == true);
    CHECK(j["timings_ms"]["enumerate"] == 1.5);
    CHECK(writeReport(r, ReportFormat::Text).find("a>b#k;b>c#k") != std::string::npos);
}

TEST_CASE("top five of the reference graph") {
    Prepared p = prepare(reference());
    ExplorationConfig cfg;
    cfg.best = 5;
    auto ranked = evaluateAndRank(enumerateVariants(p.graph).variants, p.graph, p.model.metrics, p.annotations, cfg);
    Report r = makeReport("enumerate", p.graph, p.model.metrics, p.annotations, cfg, ranked, 40);
    REQUIRE(r.variants.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(r.variants[i].rank == i + 1);
        CHECK(r.variants[i].key == ranked[i].key);
    }
    auto j = nlohmann::json::parse(writeReport(r, ReportFormat::Json));
    CHECK(j["stats"]["variants"] == 40);
    CHECK(j["stats"]["forks"] == 5);
    CHECK(j["stats"]["joins"] == 5);
}

TEST_CASE("graph stats") {
    ReportStats s = graphStats(reference().graph);
    CHECK(s.processes == 24);
    CHECK(s.forks == 5);
    CHECK(s.joins == 5);
}
