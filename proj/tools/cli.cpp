#include "cli.hpp"

#include <mapn/error.hpp>
#include <mapn/explore.hpp>
#include <mapn/format.hpp>
#include <mapn/gen.hpp>
#include <mapn/oracle.hpp>
#include <mapn/report.hpp>
#include <mapn/sadf.hpp>
#include <mapn/unfold.hpp>
#include <mapn/validate.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace mapn::cli {

namespace {

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file, then renames it over `path`.
void writeFileAtomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write '" + path + "'");
        out << content;
        out.flush();
        if (!out)
            throw ConfigError("cannot write '" + path + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot write '" + path + "'");
    }
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        writeFileAtomic(path, content);
}

bool ansiEnabled() {
    if (const char* v = std::getenv("MAPN_COLOR"))
        return std::string_view(v) != "0";
    return ::isatty(STDOUT_FILENO) != 0;
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Unfolded, validated graph with its annotations.
struct Prepared {
    Model model;
    MapnGraph graph;
    AnnotationTable annotations;
};

Prepared prepare(Model m, bool normalize, std::ostream& err) {
    if (normalize) {
        m.graph = normalizeSourceSink(m.graph);
        annotateFictiveProcesses(m.graph, m.metrics, m.annotations);
    }
    const auto diagnostics = validate(m.graph);
    if (hasErrors(diagnostics))
        throw ValidationError(diagnostics);
    for (const Diagnostic& d : diagnostics)
        err << d.render() << '\n';
    UnfoldedGraph u = unfoldGraph(m.graph, m.metrics, m.annotations, m.rules);
    return Prepared{std::move(m), std::move(u.graph), std::move(u.annotations)};
}

struct SearchOptions {
    std::string graph;
    std::string constraints;
    std::string format = "text";
    std::string output;
    std::optional<std::size_t> best;
    std::string mode;
    std::string target;
    bool timings = false;
    bool normalize = false;
};

ExplorationConfig loadConfig(const SearchOptions& o, const Model& m) {
    ExplorationConfig cfg;
    if (!o.constraints.empty())
        cfg = parseConstraints(readFile(o.constraints), m.metrics, m.annotations);
    if (o.best)
        cfg.best = *o.best;
    if (!o.mode.empty())
        cfg.mode = o.mode == "beam" ? Mode::Beam : Mode::Exact;
    if (!o.target.empty()) {
        auto t = m.annotations.findTarget(o.target);
        if (!t)
            throw ConfigError("unknown target '" + o.target + "'");
        cfg.targetIndex = *t;
    }
    return cfg;
}

void addSearchOptions(CLI::App* sub, SearchOptions& o) {
    sub->add_option("graph", o.graph, "Graph document")->required();
    sub->add_option("--constraints,-c", o.constraints, "Constraints file");
    sub->add_option("--format,-f", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--output,-o", o.output, "Write the report to a file");
    sub->add_option("--best,-b", o.best, "Keep the b best variants (0 keeps all)");
    sub->add_option("--mode", o.mode, "Search mode")->check(CLI::IsMember({"exact", "beam"}));
    sub->add_option("--target", o.target, "Hardware target label");
    sub->add_flag("--timings", o.timings, "Include per-phase timings in the report");
    sub->add_flag("--normalize", o.normalize, "Add fictive source/sink processes when needed");
}

int finishReport(Report& r, const SearchOptions& o, std::ostream& out) {
    const bool json = o.format == "json";
    emit(o.output, writeReport(r, json ? ReportFormat::Json : ReportFormat::Text, !json && o.output.empty() && ansiEnabled()),
         out);
    return r.variants.empty() ? kEmptyResult : kSuccess;
}

int runEnumerate(const SearchOptions& o, std::uint64_t maxAssignments, std::ostream& out, std::ostream& err) {
    Stopwatch clock;
    Model m = parseGraph(readFile(o.graph));
    const ExplorationConfig cfg = loadConfig(o, m);
    const double parseMs = clock.lap();
    Prepared p = prepare(std::move(m), o.normalize, err);
    const double unfoldMs = clock.lap();
    EnumerationOptions eo;
    eo.maxAssignments = maxAssignments;
    EnumerationResult er = enumerateVariants(p.graph, eo);
    const double enumerateMs = clock.lap();
    const std::uint64_t considered = er.variants.size();
    auto ranked = evaluateAndRank(std::move(er.variants), p.graph, p.model.metrics, p.annotations, cfg);
    const double evaluateMs = clock.lap();

    Report r = makeReport("enumerate", p.graph, p.model.metrics, p.annotations, cfg, ranked, considered);
    r.flagged = er.flagged;
    if (o.timings)
        r.timings = {{"parse", parseMs}, {"unfold", unfoldMs}, {"enumerate", enumerateMs}, {"evaluate", evaluateMs}};
    return finishReport(r, o, out);
}

int runExplore(const SearchOptions& o, bool trace, std::ostream& out, std::ostream& err) {
    Stopwatch clock;
    Model m = parseGraph(readFile(o.graph));
    const ExplorationConfig cfg = loadConfig(o, m);
    const double parseMs = clock.lap();
    Prepared p = prepare(std::move(m), o.normalize, err);
    const double unfoldMs = clock.lap();
    Explorer explorer(p.graph, p.model.metrics, p.annotations, cfg);
    explorer.enableTrace(trace);
    auto ranked = explorer.run();
    const double exploreMs = clock.lap();
    if (trace)
        for (const TraceEvent& e : explorer.trace())
            err << explorer.describe(e) << '\n';

    const ProcessIndex sink = [&] {
        for (ProcessIndex q = 0; q < p.graph.processCount(); ++q)
            if (p.graph.writeChannels(q).empty())
                return q;
        return ProcessIndex{0};
    }();
    Report r = makeReport("explore", p.graph, p.model.metrics, p.annotations, cfg, ranked,
                          explorer.alternativeCount(sink));
    if (o.timings)
        r.timings = {{"parse", parseMs}, {"unfold", unfoldMs}, {"explore", exploreMs}};
    return finishReport(r, o, out);
}

std::string joinNames(const std::vector<std::string>& names) {
    std::string s;
    for (const std::string& n : names)
        s += (s.empty() ? "" : " ") + n;
    return s;
}

int runStats(const std::string& path, const std::string& format, std::ostream& out) {
    const Model m = parseGraph(readFile(path));
    const auto diagnostics = validate(m.graph);
    const ReportStats s = graphStats(m.graph);
    const ForkJoinSets fj = forkJoinSets(m.graph);
    const Endpoints ends = sourcesAndSinks(m.graph);
    std::optional<std::uint64_t> variants;
    if (!hasErrors(diagnostics))
        variants = countUnfoldedVariants(m.graph);

    if (format == "json") {
        nlohmann::ordered_json j;
        j["processes"] = s.processes;
        j["channels"] = s.channels;
        j["colors"] = s.colors;
        j["sources"] = ends.sources;
        j["sinks"] = ends.sinks;
        j["forks"] = fj.forks;
        j["joins"] = fj.joins;
        j["well_formed"] = !hasErrors(diagnostics);
        if (variants)
            j["variants"] = *variants;
        out << j.dump(2) << '\n';
    } else {
        out << "processes: " << s.processes << '\n'
            << "channels: " << s.channels << '\n'
            << "colors: " << s.colors << '\n'
            << "sources: " << joinNames(ends.sources) << '\n'
            << "sinks: " << joinNames(ends.sinks) << '\n'
            << "forks: " << joinNames(fj.forks) << '\n'
            << "joins: " << joinNames(fj.joins) << '\n'
            << "well-formed: " << (hasErrors(diagnostics) ? "no" : "yes") << '\n';
        if (variants)
            out << "variants: " << *variants << '\n';
    }
    return kSuccess;
}

} // namespace

int runCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-alternative process network toolkit", "mapn"};
    app.require_subcommand(1);

    std::string graphPath, outputPath;

    auto* validateCmd = app.add_subcommand("validate", "Check well-formedness; diagnostics go to standard error");
    validateCmd->add_option("graph", graphPath, "Graph document")->required();

    auto* unfoldCmd = app.add_subcommand("unfold", "Replace parallel processes by per-degree lanes");
    unfoldCmd->add_option("graph", graphPath, "Graph document")->required();
    unfoldCmd->add_option("--output,-o", outputPath, "Output file (default: standard output)");

    SearchOptions enumOpts;
    std::uint64_t maxAssignments = 1'000'000;
    auto* enumerateCmd = app.add_subcommand("enumerate", "Enumerate, evaluate and rank every variant");
    addSearchOptions(enumerateCmd, enumOpts);
    enumerateCmd->add_option("--max-assignments", maxAssignments, "Fork-choice assignment cap");

    SearchOptions exploreOpts;
    bool trace = false;
    auto* exploreCmd = app.add_subcommand("explore", "Incremental exploration of the variant space");
    addSearchOptions(exploreCmd, exploreOpts);
    exploreCmd->add_flag("--trace", trace, "Print queue and propagation events to standard error");

    std::string statsFormat = "text";
    auto* statsCmd = app.add_subcommand("stats", "Graph statistics and variant count");
    statsCmd->add_option("graph", graphPath, "Graph document")->required();
    statsCmd->add_option("--format,-f", statsFormat, "Output format")->check(CLI::IsMember({"text", "json"}));

    SyntheticSpec spec;
    auto* genCmd = app.add_subcommand("gen", "Generate a synthetic graph");
    genCmd->add_option("--variants,-n", spec.targetVariants, "Target variant count")->required();
    genCmd->add_option("--seed,-s", spec.seed, "Random seed");
    genCmd->add_option("--depth", spec.maxDepth, "Maximum block nesting depth");
    genCmd->add_option("--width", spec.maxForkWidth, "Maximum alternatives per fork");
    genCmd->add_option("--parallel", spec.parallelCount, "Number of parallel processes");
    genCmd->add_flag("--energy", spec.withEnergy, "Add a second metric \"energy\"");
    genCmd->add_option("--output,-o", outputPath, "Output file (default: standard output)");

    std::string sadfConstraints;
    auto* sadfCmd = app.add_subcommand("export-sadf", "Export a scenario-aware dataflow description");
    sadfCmd->add_option("graph", graphPath, "Graph document")->required();
    sadfCmd->add_option("--output,-o", outputPath, "Output file (default: standard output)");
    sadfCmd->add_option("--constraints,-c", sadfConstraints, "Only export feasible variants");

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        if (!args.empty())
            args.pop_back(); // program name
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*validateCmd) {
            const Model m = parseGraph(readFile(graphPath));
            const auto diagnostics = validate(m.graph);
            for (const Diagnostic& d : diagnostics)
                err << d.render() << '\n';
            return hasErrors(diagnostics) ? kValidationFailure : kSuccess;
        }
        if (*unfoldCmd) {
            Model m = parseGraph(readFile(graphPath));
            const auto diagnostics = validate(m.graph);
            if (hasErrors(diagnostics))
                throw ValidationError(diagnostics);
            UnfoldedGraph u = unfoldGraph(m.graph, m.metrics, m.annotations, m.rules);
            Model unfolded{std::move(u.graph), m.metrics, std::move(u.annotations), {}};
            emit(outputPath, serializeGraph(unfolded, &u.provenance), out);
            return kSuccess;
        }
        if (*enumerateCmd)
            return runEnumerate(enumOpts, maxAssignments, out, err);
        if (*exploreCmd)
            return runExplore(exploreOpts, trace, out, err);
        if (*statsCmd)
            return runStats(graphPath, statsFormat, out);
        if (*genCmd) {
            emit(outputPath, serializeGraph(generateSynthetic(spec)), out);
            return kSuccess;
        }
        if (*sadfCmd) {
            Model m = parseGraph(readFile(graphPath));
            ExplorationConfig cfg;
            if (!sadfConstraints.empty())
                cfg = parseConstraints(readFile(sadfConstraints), m.metrics, m.annotations);
            Prepared p = prepare(std::move(m), false, err);
            std::vector<Variant> variants;
            if (sadfConstraints.empty())
                variants = enumerateVariants(p.graph).variants;
            else
                variants = exploreGraph(p.graph, p.model.metrics, p.annotations, cfg);
            if (variants.empty()) {
                err << "error: no variant to export\n";
                return kEmptyResult;
            }
            emit(outputPath, exportSadf(p.graph, variants), out);
            return kSuccess;
        }
    } catch (const ValidationError& e) {
        for (const Diagnostic& d : e.diagnostics())
            err << d.render() << '\n';
        return kValidationFailure;
    } catch (const UnfoldError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

} // namespace mapn::cli
