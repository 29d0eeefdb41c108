#pragma once

#include "pandora/event.hpp"
#include "pandora/registry.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pandora {

// One line of a synthetic capture: `ts src dst proto k=v ...`.
struct TraceRecord {
    double timestamp = 0.0;
    std::string src;
    std::string dst;
    std::string proto;
    std::vector<Attribute> fields;  // typed k=v pairs, line order
};

TraceRecord parse_trace_line(std::string_view line);
std::string render_trace_line(const TraceRecord& rec);

// `pkt` event carrying ts/src/dst/proto plus the extra fields.
EventPtr event_from_record(const TraceRecord& rec);

// Canonical one-line event serialization used by file_sink.
std::string serialize_event(const Event& e);

struct TraceGenSpec {
    size_t records = 1000;
    uint64_t seed = 1;
    double orphan_rate = 0.02;      // responses without a query
    double unanswered_rate = 0.05;  // queries never answered
    double tcp_share = 0.2;         // proto mix: rest is udp
    size_t clients = 16;
    size_t servers = 4;
};

// Deterministic query/response trace, timestamp-ordered.
std::vector<TraceRecord> generate_trace(const TraceGenSpec& spec);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

// Registers the component library:
//   trace_source  $path $rate            initial; one `pkt` per line
//   tick          $n $interval           initial; `tick` events
//   proto_demux   $field $max_categories demux on an attribute value
//   pair_matcher  $timeout               query/response pairing -> `txn`
//   count         $field                 sensor `n`; passthrough
//   filter        $field $equals         forwards matching events only
//   rate_limit    $rate                  throttles passthrough
//   file_sink     $path                  appends one line per event
//   null_sink                            terminal no-op
void register_stdlib(FactoryRegistry& registry);

} // namespace pandora
