#include "mapn/report.hpp"

#include "mapn/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace mapn {

ReportStats graphStats(const MapnGraph& g) {
    ReportStats s;
    s.processes = g.processCount();
    s.channels = g.channelCount();
    s.colors = g.colorCount();
    for (ProcessIndex p = 0; p < g.processCount(); ++p) {
        s.forks += g.isFork(p);
        s.joins += g.isJoin(p);
    }
    return s;
}

Report makeReport(std::string command, const MapnGraph& g, const MetricSet& metrics, const AnnotationTable& ann,
                  const ExplorationConfig& cfg, const std::vector<Variant>& ranked, std::uint64_t considered) {
    Report r;
    r.command = std::move(command);
    for (const Metric& m : metrics.metrics())
        r.metrics.push_back(m.name);
    r.targets.assign(ann.targets().begin(), ann.targets().end());
    r.targetIndex = cfg.targetIndex;
    r.stats = graphStats(g);
    r.stats.variants = considered;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        ReportVariant v;
        v.rank = i + 1;
        v.key = ranked[i].key;
        for (ChannelIndex c : ranked[i].channels)
            v.channels.push_back(g.channelLabel(c));
        v.evals = ranked[i].evals;
        v.feasible = checkFeasible(v.evals, metrics, cfg);
        r.variants.push_back(std::move(v));
    }
    return r;
}

namespace {

std::string textReport(const Report& r, bool ansi) {
    const std::string bold = ansi ? "\x1b[1m" : "";
    const std::string reset = ansi ? "\x1b[0m" : "";
    std::ostringstream out;
    out << bold << r.command << reset << '\n';
    out << "graph: " << r.stats.processes << " processes, " << r.stats.channels << " channels, " << r.stats.colors
        << " colors, " << r.stats.forks << " forks, " << r.stats.joins << " joins\n";
    out << "variants: " << r.stats.variants << " considered, " << r.variants.size() << " reported\n";
    if (!r.targets.empty())
        out << "target: " << r.targets[r.targetIndex] << '\n';

    std::vector<std::string> header{"rank"};
    for (const std::string& m : r.metrics)
        header.push_back(m);
    header.push_back("feasible");
    std::vector<std::vector<std::string>> rows;
    for (const ReportVariant& v : r.variants) {
        std::vector<std::string> row{std::to_string(v.rank)};
        for (const auto& perTarget : v.evals)
            row.push_back(formatNumber(perTarget[r.targetIndex]));
        row.push_back(v.feasible ? "yes" : "no");
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        width[i] = header[i].size();
        for (const auto& row : rows)
            width[i] = std::max(width[i], row[i].size());
    }
    auto emit = [&](const std::vector<std::string>& cells, const std::string& key) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << cells[i] << std::string(width[i] - cells[i].size() + 2, ' ');
        out << key << '\n';
    };
    if (!rows.empty()) {
        out << bold;
        emit(header, "key");
        out << reset;
        for (std::size_t i = 0; i < rows.size(); ++i)
            emit(rows[i], r.variants[i].key);
    }
    for (const std::string& f : r.flagged)
        out << "flagged: " << f << '\n';
    for (const auto& [phase, ms] : r.timings)
        out << "time " << phase << ": " << formatNumber(ms) << " ms\n";
    return out.str();
}

std::string jsonReport(const Report& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["command"] = r.command;
    j["metrics"] = r.metrics;
    j["targets"] = r.targets;
    j["target"] = r.targets.empty() ? "" : r.targets[r.targetIndex];
    ordered_json stats;
    stats["processes"] = r.stats.processes;
    stats["channels"] = r.stats.channels;
    stats["colors"] = r.stats.colors;
    stats["forks"] = r.stats.forks;
    stats["joins"] = r.stats.joins;
    stats["variants"] = r.stats.variants;
    stats["reported"] = r.variants.size();
    j["stats"] = stats;
    ordered_json variants = ordered_json::array();
    for (const ReportVariant& v : r.variants) {
        ordered_json jv;
        jv["rank"] = v.rank;
        jv["key"] = v.key;
        jv["channels"] = v.channels;
        ordered_json evals;
        for (std::size_t m = 0; m < r.metrics.size() && m < v.evals.size(); ++m) {
            ordered_json perTarget;
            for (std::size_t t = 0; t < r.targets.size() && t < v.evals[m].size(); ++t)
                perTarget[r.targets[t]] = v.evals[m][t];
            evals[r.metrics[m]] = perTarget;
        }
        jv["evaluations"] = evals;
        jv["feasible"] = v.feasible;
        variants.push_back(std::move(jv));
    }
    j["variants"] = variants;
    if (!r.flagged.empty())
        j["flagged"] = r.flagged;
    if (!r.timings.empty()) {
        ordered_json t;
        for (const auto& [phase, ms] : r.timings)
            t[phase] = ms;
        j["timings_ms"] = t;
    }
    return j.dump(2) + "\n";
}

} // namespace

std::string writeReport(const Report& r, ReportFormat format, bool ansi) {
    return format == ReportFormat::Json ? jsonReport(r) : textReport(r, ansi);
}

} // namespace mapn
