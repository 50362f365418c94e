#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ztd/authz.hpp"
#include "ztd/policy.hpp"

// Access-trace interchange format: UTF-8 JSON Lines.
//
//   "ztd-trace/1"
//   {"seq":1,"thread":0,"kind":"access","op":"fs.read","object":"/etc/hosts","stack":["com.a.X","com.b.Y"]}
//   {"seq":2,"kind":"spawn","parent":0,"child":1,"stack":["com.a.X"]}
//
// The header line is optional on input and always written on output. Stacks
// are innermost frame first. seq is strictly increasing; thread 0 is the
// implicit main thread, every other thread must be spawned before use.

namespace ztd {

inline constexpr std::string_view kTraceHeader = "ztd-trace/1";

using TraceEvent = std::variant<AccessEvent, SpawnEvent>;

inline std::uint64_t event_seq(const TraceEvent& event) {
    return std::visit([](const auto& e) { return e.seq; }, event);
}

class TraceError : public std::runtime_error {
public:
    TraceError(std::size_t line, const std::string& what)
        : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Structurally malformed record: bad JSON, wrong types, unknown fields.
class TraceParseError : public TraceError {
public:
    using TraceError::TraceError;
};

// seq values out of order.
class OrderError : public TraceError {
public:
    using TraceError::TraceError;
};

// An event references a thread that was never spawned.
class UnknownThreadError : public TraceError {
public:
    using TraceError::TraceError;
};

namespace detail {

inline std::uint64_t trace_uint(const nlohmann::ordered_json& record, const char* field,
                                std::size_t line) {
    const auto it = record.find(field);
    if (it == record.end())
        throw TraceParseError(line, std::string("missing field \"") + field + "\"");
    if (!it->is_number_unsigned())
        throw TraceParseError(line, std::string("field \"") + field +
                                        "\" must be an unsigned integer");
    return it->get<std::uint64_t>();
}

inline std::string trace_string(const nlohmann::ordered_json& record, const char* field,
                                std::size_t line) {
    const auto it = record.find(field);
    if (it == record.end())
        throw TraceParseError(line, std::string("missing field \"") + field + "\"");
    if (!it->is_string())
        throw TraceParseError(line, std::string("field \"") + field + "\" must be a string");
    return it->get<std::string>();
}

inline std::vector<std::string> trace_stack(const nlohmann::ordered_json& record,
                                            std::size_t line) {
    const auto it = record.find("stack");
    if (it == record.end()) throw TraceParseError(line, "missing field \"stack\"");
    if (!it->is_array()) throw TraceParseError(line, "field \"stack\" must be an array");
    if (it->empty()) throw TraceParseError(line, "field \"stack\" must not be empty");
    std::vector<std::string> stack;
    stack.reserve(it->size());
    for (const auto& frame : *it) {
        if (!frame.is_string() || frame.get_ref<const std::string&>().empty())
            throw TraceParseError(line, "stack frames must be non-empty strings");
        stack.push_back(frame.get<std::string>());
    }
    return stack;
}

inline void reject_unknown_fields(const nlohmann::ordered_json& record,
                                  std::initializer_list<std::string_view> known,
                                  std::size_t line) {
    for (const auto& [key, value] : record.items()) {
        bool ok = false;
        for (const std::string_view k : known)
            if (key == k) {
                ok = true;
                break;
            }
        if (!ok) throw TraceParseError(line, "unknown field \"" + key + "\"");
    }
}

}  // namespace detail

inline std::vector<TraceEvent> parse_trace(std::string_view text) {
    std::vector<TraceEvent> events;
    std::unordered_set<ThreadId> spawned;
    bool seen_record = false;
    bool seen_seq = false;
    std::uint64_t last_seq = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        nlohmann::ordered_json record;
        try {
            record = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw TraceParseError(line_no, e.what());
        }

        if (record.is_string()) {
            if (!seen_record && record.get_ref<const std::string&>() == kTraceHeader) {
                seen_record = true;
                continue;
            }
            throw TraceParseError(line_no, "unexpected string record");
        }
        seen_record = true;
        if (!record.is_object()) throw TraceParseError(line_no, "record must be a JSON object");

        const std::uint64_t seq = detail::trace_uint(record, "seq", line_no);
        if (seen_seq && seq <= last_seq)
            throw OrderError(line_no, "seq " + std::to_string(seq) + " not greater than " +
                                          std::to_string(last_seq));
        seen_seq = true;
        last_seq = seq;

        const std::string kind = detail::trace_string(record, "kind", line_no);
        if (kind == "access") {
            detail::reject_unknown_fields(record, {"seq", "thread", "kind", "op", "object", "stack"},
                                          line_no);
            AccessEvent event;
            event.seq = seq;
            event.thread = detail::trace_uint(record, "thread", line_no);
            const std::string op_name = detail::trace_string(record, "op", line_no);
            const auto op = op_from_wire(op_name);
            if (!op) throw TraceParseError(line_no, "unknown op \"" + op_name + "\"");
            event.op = *op;
            event.object = detail::trace_string(record, "object", line_no);
            if (event.object.empty())
                throw TraceParseError(line_no, "field \"object\" must not be empty");
            event.stack = detail::trace_stack(record, line_no);
            if (event.thread != kMainThread && !spawned.count(event.thread))
                throw UnknownThreadError(line_no,
                                         "access on unspawned thread " + std::to_string(event.thread));
            events.emplace_back(std::move(event));
        } else if (kind == "spawn") {
            detail::reject_unknown_fields(record, {"seq", "kind", "parent", "child", "stack"},
                                          line_no);
            SpawnEvent event;
            event.seq = seq;
            event.parent_thread = detail::trace_uint(record, "parent", line_no);
            event.child_thread = detail::trace_uint(record, "child", line_no);
            event.stack = detail::trace_stack(record, line_no);
            if (event.parent_thread != kMainThread && !spawned.count(event.parent_thread))
                throw UnknownThreadError(
                    line_no, "spawn from unspawned thread " + std::to_string(event.parent_thread));
            if (event.child_thread == kMainThread)
                throw TraceParseError(line_no, "thread 0 cannot be spawned");
            if (event.child_thread == event.parent_thread)
                throw TraceParseError(line_no, "thread cannot spawn itself");
            if (!spawned.insert(event.child_thread).second)
                throw TraceParseError(line_no,
                                      "thread " + std::to_string(event.child_thread) +
                                          " spawned twice");
            events.emplace_back(std::move(event));
        } else {
            throw TraceParseError(line_no, "unknown kind \"" + kind + "\"");
        }
    }
    return events;
}

// Canonical emission: header line, then one compact record per line. The
// result of parse(emit(events)) equals events.
inline std::string emit_trace(const std::vector<TraceEvent>& events) {
    std::string out = "\"";
    out += kTraceHeader;
    out += "\"\n";
    for (const auto& event : events) {
        nlohmann::ordered_json record;
        if (const auto* access = std::get_if<AccessEvent>(&event)) {
            record["seq"] = access->seq;
            record["thread"] = access->thread;
            record["kind"] = "access";
            record["op"] = wire_name(access->op);
            record["object"] = access->object;
            record["stack"] = access->stack;
        } else {
            const auto& spawn = std::get<SpawnEvent>(event);
            record["seq"] = spawn.seq;
            record["kind"] = "spawn";
            record["parent"] = spawn.parent_thread;
            record["child"] = spawn.child_thread;
            record["stack"] = spawn.stack;
        }
        out += record.dump();
        out += '\n';
    }
    return out;
}

}  // namespace ztd
