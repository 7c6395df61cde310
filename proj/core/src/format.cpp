#include "mapn/format.hpp"

#include "mapn/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace mapn {

namespace {

struct Token {
    std::string_view text;
    std::size_t column; // 1-based
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r'))
                ++i;
            const std::size_t start = i;
            while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r')
                ++i;
            if (i > start)
                line.tokens.push_back(Token{raw.substr(start, i - start), start + 1});
        }
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
        if (end == text.size())
            break;
        pos = end + 1;
    }
    return lines;
}

[[noreturn]] void fail(const Line& l, const Token& t, const std::string& what) {
    throw ParseError(l.number, t.column, what);
}

double parseDouble(const Line& l, const Token& t, std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty() || !std::isfinite(v))
        fail(l, t, "malformed number '" + std::string(s) + "'");
    return v;
}

double parseDouble(const Line& l, const Token& t) { return parseDouble(l, t, t.text); }

long long parseInteger(const Line& l, const Token& t, std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(l, t, "malformed integer '" + std::string(s) + "'");
    return v;
}

/// Splits "key=value"; nullopt when there is no '='.
std::optional<std::pair<std::string_view, std::string_view>> keyValue(std::string_view s) {
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
        return std::nullopt;
    return std::pair{s.substr(0, eq), s.substr(eq + 1)};
}

Affine parseAffine(const Line& l, const Token& t, std::string_view s) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos)
        fail(l, t, "expected <c0>,<c1> in '" + std::string(t.text) + "'");
    return Affine{parseDouble(l, t, s.substr(0, comma)), parseDouble(l, t, s.substr(comma + 1))};
}

struct Pending {
    std::size_t line;
    std::size_t column;
};

} // namespace

std::string formatNumber(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

Model parseGraph(std::string_view text) {
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty())
        throw ParseError(1, 1, "empty document, expected header 'mapn 1'");
    const Line& header = lines.front();
    if (header.tokens[0].text != "mapn")
        fail(header, header.tokens[0], "expected header 'mapn 1'");
    if (header.tokens.size() != 2 || header.tokens[1].text != "1")
        fail(header, header.tokens.size() > 1 ? header.tokens[1] : header.tokens[0],
             "unsupported format version, expected 'mapn 1'");

    GraphBuilder builder;
    std::map<std::string, Pending, std::less<>> processLines;
    std::set<std::string, std::less<>> channelKeys;
    std::vector<std::pair<const Line*, std::array<Token, 3>>> channelRefs;
    std::vector<Metric> metrics;
    std::vector<std::string> targets;
    struct Annotation {
        const Line* line;
        std::string process, metric;
        std::vector<double> values;
    };
    std::vector<Annotation> annotations;
    std::set<std::pair<std::string, std::string>> annotated;
    struct Rule {
        const Line* line;
        std::string process, metric;
        ParallelRule rule;
    };
    std::vector<Rule> rules;
    std::set<std::pair<std::string, std::string>> ruled;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const Line& l = lines[li];
        const auto& tk = l.tokens;
        const std::string_view kw = tk[0].text;
        auto expectArgs = [&](std::size_t minArgs, std::size_t maxArgs) {
            if (tk.size() - 1 < minArgs || tk.size() - 1 > maxArgs)
                fail(l, tk[0], "wrong number of arguments for '" + std::string(kw) + "'");
        };

        if (kw == "mapn") {
            fail(l, tk[0], "duplicate header");
        } else if (kw == "process") {
            expectArgs(1, 64);
            const std::string id(tk[1].text);
            if (!isValidProcessName(id))
                fail(l, tk[1], "invalid process name '" + id + "'");
            if (processLines.count(id))
                fail(l, tk[1], "duplicate process '" + id + "'");
            std::vector<int> degrees;
            if (tk.size() > 2) {
                if (tk[2].text != "parallel")
                    fail(l, tk[2], "expected 'parallel'");
                if (tk.size() == 3)
                    fail(l, tk[2], "'parallel' needs at least one degree");
                for (std::size_t i = 3; i < tk.size(); ++i) {
                    const long long d = parseInteger(l, tk[i], tk[i].text);
                    if (d < 1 || d > 1'000'000)
                        fail(l, tk[i], "parallel degree out of range");
                    if (!degrees.empty() && d <= degrees.back())
                        fail(l, tk[i], "parallel degrees must be strictly increasing");
                    degrees.push_back(static_cast<int>(d));
                }
            }
            processLines.emplace(id, Pending{l.number, tk[1].column});
            builder.addProcess(id, std::move(degrees));
        } else if (kw == "channel") {
            expectArgs(3, 3);
            if (!isValidProcessName(tk[1].text))
                fail(l, tk[1], "invalid process name '" + std::string(tk[1].text) + "'");
            if (!isValidProcessName(tk[2].text))
                fail(l, tk[2], "invalid process name '" + std::string(tk[2].text) + "'");
            if (!isValidColorName(tk[3].text))
                fail(l, tk[3], "invalid color name '" + std::string(tk[3].text) + "'");
            if (tk[1].text == tk[2].text)
                fail(l, tk[2], "self-loop on '" + std::string(tk[1].text) + "'");
            const ChannelSpec spec{std::string(tk[1].text), std::string(tk[2].text), std::string(tk[3].text)};
            if (!channelKeys.insert(spec.label()).second)
                fail(l, tk[1], "duplicate channel '" + spec.label() + "'");
            channelRefs.push_back({&l, {tk[1], tk[2], tk[3]}});
        } else if (kw == "metric") {
            expectArgs(1, 5);
            Metric m;
            m.name = std::string(tk[1].text);
            if (!isValidProcessName(m.name))
                fail(l, tk[1], "invalid metric name '" + m.name + "'");
            for (const Metric& other : metrics)
                if (other.name == m.name)
                    fail(l, tk[1], "duplicate metric '" + m.name + "'");
            m.priority = static_cast<int>(metrics.size());
            std::set<std::string_view> keys;
            for (std::size_t i = 2; i < tk.size(); ++i) {
                auto kv = keyValue(tk[i].text);
                if (!kv)
                    fail(l, tk[i], "expected key=value, got '" + std::string(tk[i].text) + "'");
                const auto [key, value] = *kv;
                if (!keys.insert(key).second)
                    fail(l, tk[i], "duplicate key '" + std::string(key) + "'");
                if (key == "priority") {
                    const long long p = parseInteger(l, tk[i], value);
                    if (p < 0 || p > 1'000'000)
                        fail(l, tk[i], "priority out of range");
                    m.priority = static_cast<int>(p);
                } else if (key == "merge" || key == "compose") {
                    auto op = parseOp(value);
                    if (!op)
                        fail(l, tk[i], "unknown operator '" + std::string(value) + "'");
                    (key == "merge" ? m.merge : m.compose) = *op;
                } else if (key == "direction") {
                    if (value == "lower")
                        m.direction = Direction::LowerIsBetter;
                    else if (value == "higher")
                        m.direction = Direction::HigherIsBetter;
                    else
                        fail(l, tk[i], "direction must be 'lower' or 'higher'");
                } else {
                    fail(l, tk[i], "unknown metric key '" + std::string(key) + "'");
                }
            }
            for (const Metric& other : metrics)
                if (other.priority == m.priority)
                    fail(l, tk[1], "metrics '" + other.name + "' and '" + m.name + "' share a priority");
            metrics.push_back(std::move(m));
        } else if (kw == "target") {
            expectArgs(1, 1);
            const std::string label(tk[1].text);
            if (!isValidProcessName(label))
                fail(l, tk[1], "invalid target label '" + label + "'");
            if (std::find(targets.begin(), targets.end(), label) != targets.end())
                fail(l, tk[1], "duplicate target '" + label + "'");
            targets.push_back(label);
        } else if (kw == "annotate") {
            expectArgs(3, 1'000'000);
            Annotation a{&l, std::string(tk[1].text), std::string(tk[2].text), {}};
            if (!annotated.insert({a.process, a.metric}).second)
                fail(l, tk[1], "duplicate annotation for '" + a.process + "', metric '" + a.metric + "'");
            for (std::size_t i = 3; i < tk.size(); ++i)
                a.values.push_back(parseDouble(l, tk[i]));
            annotations.push_back(std::move(a));
        } else if (kw == "par_rule") {
            expectArgs(3, 5);
            Rule r{&l, std::string(tk[1].text), std::string(tk[2].text), {}};
            if (!ruled.insert({r.process, r.metric}).second)
                fail(l, tk[1], "duplicate par_rule for '" + r.process + "', metric '" + r.metric + "'");
            std::set<std::string_view> keys;
            for (std::size_t i = 3; i < tk.size(); ++i) {
                auto kv = keyValue(tk[i].text);
                if (!kv)
                    fail(l, tk[i], "expected key=value, got '" + std::string(tk[i].text) + "'");
                const auto [key, value] = *kv;
                if (!keys.insert(key).second)
                    fail(l, tk[i], "duplicate key '" + std::string(key) + "'");
                if (key == "dup") {
                    if (value == "divide") {
                        r.rule.dup.kind = DupKind::Divide;
                    } else if (value == "replicate") {
                        r.rule.dup.kind = DupKind::Replicate;
                    } else if (value.substr(0, 9) == "constant:") {
                        r.rule.dup.kind = DupKind::Constant;
                        r.rule.dup.constant = parseDouble(l, tk[i], value.substr(9));
                    } else {
                        fail(l, tk[i], "dup must be divide, replicate or constant:<c>");
                    }
                } else if (key == "in") {
                    r.rule.overheadIn = parseAffine(l, tk[i], value);
                } else if (key == "out") {
                    r.rule.overheadOut = parseAffine(l, tk[i], value);
                } else {
                    fail(l, tk[i], "unknown par_rule key '" + std::string(key) + "'");
                }
            }
            if (!keys.count("dup"))
                fail(l, tk[0], "par_rule needs dup=<...>");
            rules.push_back(std::move(r));
        } else {
            fail(l, tk[0], "unknown keyword '" + std::string(kw) + "'");
        }
    }

    for (const auto& [line, refs] : channelRefs) {
        for (std::size_t i = 0; i < 2; ++i)
            if (!processLines.count(refs[i].text))
                fail(*line, refs[i], "undeclared process '" + std::string(refs[i].text) + "'");
        builder.addChannel(std::string(refs[0].text), std::string(refs[1].text), std::string(refs[2].text));
    }

    Model model;
    try {
        model.graph = builder.build();
    } catch (const ModelError& e) {
        throw ParseError(lines.front().number, 1, e.what());
    }
    for (Metric& m : metrics)
        model.metrics.add(std::move(m));
    if (!targets.empty())
        model.annotations = AnnotationTable(std::move(targets));
    for (Annotation& a : annotations) {
        if (!processLines.count(a.process))
            fail(*a.line, a.line->tokens[1], "undeclared process '" + a.process + "'");
        if (!model.metrics.find(a.metric))
            fail(*a.line, a.line->tokens[2], "undeclared metric '" + a.metric + "'");
        if (a.values.size() != model.annotations.targetCount())
            fail(*a.line, a.line->tokens[0],
                 "annotation has " + std::to_string(a.values.size()) + " values, expected " +
                     std::to_string(model.annotations.targetCount()));
        model.annotations.set(std::move(a.process), std::move(a.metric), std::move(a.values));
    }
    for (Rule& r : rules) {
        if (!processLines.count(r.process))
            fail(*r.line, r.line->tokens[1], "undeclared process '" + r.process + "'");
        if (!model.metrics.find(r.metric))
            fail(*r.line, r.line->tokens[2], "undeclared metric '" + r.metric + "'");
        model.rules[{std::move(r.process), std::move(r.metric)}] = r.rule;
    }
    return model;
}

std::string serializeGraph(const Model& m, const std::map<std::string, Provenance>* provenance) {
    std::ostringstream out;
    out << "mapn 1\n";
    for (const Process& p : m.graph.processes()) {
        out << "process " << p.id;
        if (p.isParallel()) {
            out << " parallel";
            for (int d : p.parallelDegrees)
                out << ' ' << d;
        }
        if (provenance) {
            if (auto it = provenance->find(p.id); it != provenance->end())
                out << "  # " << toString(it->second.role) << " of " << it->second.original << ", degree "
                    << it->second.degree;
        }
        out << '\n';
    }
    for (ChannelIndex c = 0; c < m.graph.channelCount(); ++c) {
        const Channel& ch = m.graph.channel(c);
        out << "channel " << m.graph.processName(ch.writer) << ' ' << m.graph.processName(ch.reader) << ' '
            << m.graph.color(ch.color) << '\n';
    }
    for (const Metric& metric : m.metrics.metrics())
        out << "metric " << metric.name << " priority=" << metric.priority << " merge=" << toString(metric.merge)
            << " compose=" << toString(metric.compose) << " direction=" << toString(metric.direction) << '\n';
    for (const std::string& t : m.annotations.targets())
        out << "target " << t << '\n';
    for (const auto& [key, values] : m.annotations.values()) {
        out << "annotate " << key.first << ' ' << key.second;
        for (double v : values)
            out << ' ' << formatNumber(v);
        out << '\n';
    }
    for (const auto& [key, rule] : m.rules) {
        out << "par_rule " << key.first << ' ' << key.second << " dup=";
        switch (rule.dup.kind) {
        case DupKind::Divide: out << "divide"; break;
        case DupKind::Replicate: out << "replicate"; break;
        case DupKind::Constant: out << "constant:" << formatNumber(rule.dup.constant); break;
        }
        out << " in=" << formatNumber(rule.overheadIn.c0) << ',' << formatNumber(rule.overheadIn.c1)
            << " out=" << formatNumber(rule.overheadOut.c0) << ',' << formatNumber(rule.overheadOut.c1) << '\n';
    }
    return out.str();
}

bool semanticallyEqual(const Model& a, const Model& b) { return a == b; }

ExplorationConfig parseConstraints(std::string_view text, const MetricSet& metrics, const AnnotationTable& ann) {
    ExplorationConfig cfg;
    bool seenBest = false, seenTarget = false, seenMode = false;
    for (const Line& l : tokenize(text)) {
        const auto& tk = l.tokens;
        const std::string_view kw = tk[0].text;
        auto once = [&](bool& flag) {
            if (flag)
                fail(l, tk[0], "duplicate '" + std::string(kw) + "'");
            flag = true;
            if (tk.size() != 2)
                fail(l, tk[0], "'" + std::string(kw) + "' takes one argument");
        };
        if (kw == "constraint") {
            if (tk.size() != 4)
                fail(l, tk[0], "expected 'constraint <metric> <op> <number>'");
            if (!metrics.find(tk[1].text))
                fail(l, tk[1], "unknown metric '" + std::string(tk[1].text) + "'");
            auto cmp = parseComparator(tk[2].text);
            if (!cmp)
                fail(l, tk[2], "unknown comparator '" + std::string(tk[2].text) + "'");
            cfg.constraints.push_back(Constraint{std::string(tk[1].text), *cmp, parseDouble(l, tk[3])});
        } else if (kw == "best") {
            once(seenBest);
            const long long b = parseInteger(l, tk[1], tk[1].text);
            if (b < 0)
                fail(l, tk[1], "best must be non-negative");
            cfg.best = static_cast<std::size_t>(b);
        } else if (kw == "target") {
            once(seenTarget);
            auto t = ann.findTarget(tk[1].text);
            if (!t)
                fail(l, tk[1], "unknown target '" + std::string(tk[1].text) + "'");
            cfg.targetIndex = *t;
        } else if (kw == "mode") {
            once(seenMode);
            if (tk[1].text == "exact")
                cfg.mode = Mode::Exact;
            else if (tk[1].text == "beam")
                cfg.mode = Mode::Beam;
            else
                fail(l, tk[1], "mode must be 'exact' or 'beam'");
        } else {
            fail(l, tk[0], "unknown keyword '" + std::string(kw) + "'");
        }
    }
    return cfg;
}

std::string serializeConstraints(const ExplorationConfig& cfg, const AnnotationTable& ann) {
    std::ostringstream out;
    for (const Constraint& c : cfg.constraints)
        out << "constraint " << c.metric << ' ' << toString(c.comparator) << ' ' << formatNumber(c.bound) << '\n';
    out << "best " << cfg.best << '\n';
    out << "target " << ann.targets()[cfg.targetIndex] << '\n';
    out << "mode " << (cfg.mode == Mode::Exact ? "exact" : "beam") << '\n';
    return out.str();
}

} // namespace mapn
