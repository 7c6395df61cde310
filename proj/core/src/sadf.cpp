#include "mapn/sadf.hpp"

#include "mapn/error.hpp"

#include <sstream>

namespace mapn {

namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string exportSadf(const MapnGraph& g, const std::vector<Variant>& variants, const std::string& name) {
    if (variants.empty())
        throw ConfigError("SADF export needs at least one variant");
    std::ostringstream out;
    out << "<sadf name=\"" << escape(name) << "\">\n";
    out << "  <graph>\n";
    for (const Process& p : g.processes())
        out << "    <actor name=\"" << escape(p.id) << "\"/>\n";
    for (ChannelIndex c = 0; c < g.channelCount(); ++c) {
        const Channel& ch = g.channel(c);
        out << "    <channel name=\"" << escape(g.channelLabel(c)) << "\" src=\"" << escape(g.processName(ch.writer))
            << "\" dst=\"" << escape(g.processName(ch.reader)) << "\" color=\"" << escape(g.color(ch.color))
            << "\"/>\n";
    }
    out << "  </graph>\n";
    out << "  <detector name=\"variants\" initial=\"s1\">\n";
    std::vector<char> in(g.channelCount());
    for (std::size_t i = 0; i < variants.size(); ++i) {
        std::fill(in.begin(), in.end(), 0);
        for (ChannelIndex c : variants[i].channels)
            in.at(c) = 1;
        out << "    <scenario name=\"s" << i + 1 << "\" key=\"" << escape(variants[i].key) << "\">\n";
        for (ChannelIndex c = 0; c < g.channelCount(); ++c) {
            const int rate = in[c] ? 1 : 0;
            out << "      <rate channel=\"" << escape(g.channelLabel(c)) << "\" production=\"" << rate
                << "\" consumption=\"" << rate << "\"/>\n";
        }
        out << "    </scenario>\n";
    }
    for (std::size_t i = 0; i < variants.size(); ++i)
        out << "    <transition from=\"s" << i + 1 << "\" to=\"s" << (i + 1) % variants.size() + 1 << "\"/>\n";
    out << "  </detector>\n";
    out << "</sadf>\n";
    return out.str();
}

} // namespace mapn
