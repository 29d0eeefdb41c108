#include "pandora/stdlib.hpp"

#include "pandora/errors.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <random>
#include <sstream>

namespace pandora {

namespace {

ScalarValue type_field_value(std::string_view text) {
    if (!text.empty() && text.front() == '"') {
        // Quoted string with the description-language escapes.
        std::string out;
        size_t i = 1;
        bool closed = false;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c == '"') {
                closed = true;
                ++i;
                break;
            }
            if (c == '\\' && i + 1 < text.size()) {
                out += text[++i];
                continue;
            }
            out += c;
        }
        if (!closed || i != text.size()) {
            throw Error(ErrorCode::Syntax, "malformed quoted field value: " + std::string(text));
        }
        return ScalarValue(std::move(out));
    }
    if (text == "true") return ScalarValue(true);
    if (text == "false") return ScalarValue(false);
    int64_t iv = 0;
    auto [ip, iec] = std::from_chars(text.data(), text.data() + text.size(), iv);
    if (iec == std::errc() && ip == text.data() + text.size()) return ScalarValue(iv);
    double dv = 0.0;
    auto [dp, dec] = std::from_chars(text.data(), text.data() + text.size(), dv);
    if (dec == std::errc() && dp == text.data() + text.size()) return ScalarValue(dv);
    return ScalarValue(std::string(text));
}

} // namespace

TraceRecord parse_trace_line(std::string_view line) {
    std::istringstream in{std::string(line)};
    TraceRecord rec;
    std::string ts;
    if (!(in >> ts >> rec.src >> rec.dst >> rec.proto)) {
        throw Error(ErrorCode::Syntax, "trace line needs `ts src dst proto`: " +
                                           std::string(line));
    }
    auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), rec.timestamp);
    if (ec != std::errc() || p != ts.data() + ts.size()) {
        throw Error(ErrorCode::Syntax, "bad trace timestamp '" + ts + "'");
    }
    std::string field;
    while (in >> field) {
        size_t eq = field.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorCode::Syntax, "trace field must be k=v, got '" + field + "'");
        }
        rec.fields.emplace_back(field.substr(0, eq), type_field_value(field.substr(eq + 1)));
    }
    return rec;
}

std::string render_trace_line(const TraceRecord& rec) {
    std::ostringstream os;
    os << render_float(rec.timestamp) << ' ' << rec.src << ' ' << rec.dst << ' ' << rec.proto;
    for (const auto& [k, v] : rec.fields) {
        os << ' ' << k << '=' << v.render();
    }
    return os.str();
}

EventPtr event_from_record(const TraceRecord& rec) {
    std::vector<Attribute> attrs;
    attrs.reserve(rec.fields.size() + 4);
    attrs.emplace_back("ts", ScalarValue(rec.timestamp));
    attrs.emplace_back("src", ScalarValue(rec.src));
    attrs.emplace_back("dst", ScalarValue(rec.dst));
    attrs.emplace_back("proto", ScalarValue(rec.proto));
    for (const auto& f : rec.fields) attrs.push_back(f);
    return make_event("pkt", std::move(attrs));
}

std::string serialize_event(const Event& e) {
    std::ostringstream os;
    os << e.etype().tag();
    for (const auto& [k, v] : e.attributes()) {
        os << ' ' << k << '=' << v.render();
    }
    if (!e.payload().empty()) {
        static const char* hex = "0123456789abcdef";
        os << " payload:";
        for (unsigned char c : e.payload()) {
            os << hex[c >> 4] << hex[c & 0xf];
        }
    }
    return os.str();
}

std::vector<TraceRecord> generate_trace(const TraceGenSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_real_distribution<double> gap(0.0001, 0.01);
    std::uniform_real_distribution<double> latency(0.001, 0.05);

    struct Pending {
        TraceRecord rec;
        size_t seq;
    };
    std::vector<Pending> out;
    out.reserve(spec.records);

    double t = 0.0;
    size_t qid = 1;
    size_t seq = 0;
    auto endpoint = [&](bool client, size_t idx, int port) {
        std::ostringstream os;
        if (client) {
            os << "10.0.0." << (idx % std::max<size_t>(spec.clients, 1)) << ':' << port;
        } else {
            os << "10.1.0." << (idx % std::max<size_t>(spec.servers, 1)) << ":53";
        }
        return os.str();
    };

    while (out.size() < spec.records) {
        t += gap(rng);
        size_t client = rng() % std::max<size_t>(spec.clients, 1);
        size_t server = rng() % std::max<size_t>(spec.servers, 1);
        int port = 32768 + static_cast<int>(rng() % 16384);
        std::string src = endpoint(true, client, port);
        std::string dst = endpoint(false, server, 0);
        std::string proto = uni(rng) < spec.tcp_share ? "tcp" : "udp";
        int64_t id = static_cast<int64_t>(qid++ % 65536);
        std::ostringstream qn;
        qn << 'q' << qid << ".example";

        double roll = uni(rng);
        if (roll < spec.orphan_rate) {
            // Response that never had a query.
            TraceRecord r{t, dst, src, proto,
                          {{"qid", ScalarValue(id)}, {"is_response", ScalarValue(true)}}};
            out.push_back({std::move(r), seq++});
            continue;
        }
        bool unanswered = roll < spec.orphan_rate + spec.unanswered_rate;
        bool room_for_pair = out.size() + 2 <= spec.records;
        TraceRecord q{t, src, dst, proto,
                      {{"qid", ScalarValue(id)},
                       {"qname", ScalarValue(qn.str())},
                       {"is_response", ScalarValue(false)}}};
        out.push_back({std::move(q), seq++});
        if (!unanswered && room_for_pair) {
            TraceRecord r{t + latency(rng), dst, src, proto,
                          {{"qid", ScalarValue(id)}, {"is_response", ScalarValue(true)}}};
            out.push_back({std::move(r), seq++});
        }
    }

    std::sort(out.begin(), out.end(), [](const Pending& a, const Pending& b) {
        if (a.rec.timestamp != b.rec.timestamp) return a.rec.timestamp < b.rec.timestamp;
        return a.seq < b.seq;
    });
    std::vector<TraceRecord> records;
    records.reserve(out.size());
    for (auto& p : out) records.push_back(std::move(p.rec));
    return records;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
    for (const auto& rec : records) {
        out << render_trace_line(rec) << '\n';
    }
}

} // namespace pandora
