#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ztd/authz.hpp"
#include "ztd/generator.hpp"
#include "ztd/policy.hpp"
#include "ztd/policy_context.hpp"
#include "ztd/trace.hpp"

// Trace replay: drives a recorded execution through the authorization engine
// (enforcement) or through the policy generator (discovery).

namespace ztd {

struct VerdictRecord {
    std::uint64_t seq = 0;
    ThreadId thread = kMainThread;
    std::string kind;    // "access" or "spawn"
    std::string op;      // wire name, empty for spawn records
    std::string object;  // empty for spawn records
    bool allowed = true;
    std::optional<std::string> denying_namespace;
    std::string reason;
    bool operator==(const VerdictRecord&) const = default;
};

// One denied access under non-fatal enforcement.
struct AlertRecord {
    std::uint64_t seq = 0;
    ThreadId thread = kMainThread;
    std::string op;
    std::string object;
    std::optional<std::string> denying_namespace;
    std::string reason;
    std::vector<std::string> stack;
    bool operator==(const AlertRecord&) const = default;
};

inline nlohmann::ordered_json alert_to_json(const AlertRecord& alert) {
    nlohmann::ordered_json record;
    record["seq"] = alert.seq;
    record["thread"] = alert.thread;
    record["op"] = alert.op;
    record["object"] = alert.object;
    record["denying_namespace"] =
        alert.denying_namespace ? nlohmann::ordered_json(*alert.denying_namespace)
                                : nlohmann::ordered_json(nullptr);
    record["reason"] = alert.reason;
    record["stack"] = alert.stack;
    return record;
}

struct FirstDenial {
    std::uint64_t seq = 0;
    std::optional<std::string> denying_namespace;
    std::string reason;
    bool operator==(const FirstDenial&) const = default;
};

struct ReplayReport {
    std::vector<VerdictRecord> verdicts;
    std::size_t allowed = 0;
    std::size_t denied = 0;
    std::size_t alerts = 0;  // non-fatal denials
    std::optional<FirstDenial> first_denial;
    bool halted_early = false;
    std::vector<AlertRecord> alert_records;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["totals"] = {{"allowed", allowed}, {"denied", denied}, {"alerts", alerts}};
        doc["halted_early"] = halted_early;
        if (first_denial) {
            nlohmann::ordered_json fd;
            fd["seq"] = first_denial->seq;
            fd["denying_namespace"] = first_denial->denying_namespace
                                          ? nlohmann::ordered_json(*first_denial->denying_namespace)
                                          : nlohmann::ordered_json(nullptr);
            fd["reason"] = first_denial->reason;
            doc["first_denial"] = std::move(fd);
        } else {
            doc["first_denial"] = nullptr;
        }
        nlohmann::ordered_json verdict_array = nlohmann::ordered_json::array();
        for (const auto& v : verdicts) {
            nlohmann::ordered_json record;
            record["seq"] = v.seq;
            record["kind"] = v.kind;
            record["thread"] = v.thread;
            if (v.kind == "access") {
                record["op"] = v.op;
                record["object"] = v.object;
            }
            record["allowed"] = v.allowed;
            if (!v.allowed) {
                record["denying_namespace"] = v.denying_namespace
                                                  ? nlohmann::ordered_json(*v.denying_namespace)
                                                  : nlohmann::ordered_json(nullptr);
                record["reason"] = v.reason;
            }
            verdict_array.push_back(std::move(record));
        }
        doc["verdicts"] = std::move(verdict_array);
        return doc;
    }
};

// Replays a parsed trace against a policy set. Spawn events register thread
// context and are always allowed. In fatal mode the first denied access ends
// the replay; in non-fatal mode every denial becomes an alert and replay
// continues to the end of the trace.
inline ReplayReport replay(const std::vector<TraceEvent>& events, const EngineConfig& cfg,
                           const PolicySet& policies) {
    for (const auto& trusted : cfg.trusted_namespaces) {
        for (const auto& [ns, policy] : policies.policies()) {
            if (is_component_prefix(trusted, ns) || is_component_prefix(ns, trusted))
                throw std::invalid_argument("trusted namespace \"" + trusted +
                                            "\" overlaps policy namespace \"" + ns + "\"");
        }
    }

    const PolicyContext ctx(policies);
    ThreadRegistry registry;
    ReplayReport report;

    for (const auto& event : events) {
        if (const auto* spawn = std::get_if<SpawnEvent>(&event)) {
            register_spawn(ctx, registry, cfg, *spawn);
            VerdictRecord record;
            record.seq = spawn->seq;
            record.thread = spawn->parent_thread;
            record.kind = "spawn";
            record.allowed = true;
            report.verdicts.push_back(std::move(record));
            ++report.allowed;
            continue;
        }

        const auto& access = std::get<AccessEvent>(event);
        const Verdict verdict = authorize(ctx, registry, cfg, access);

        VerdictRecord record;
        record.seq = access.seq;
        record.thread = access.thread;
        record.kind = "access";
        record.op = std::string(wire_name(access.op));
        record.object = access.object;
        record.allowed = verdict.allowed;
        record.denying_namespace = verdict.denying_namespace;
        record.reason = verdict.reason;
        report.verdicts.push_back(std::move(record));

        if (verdict.allowed) {
            ++report.allowed;
            continue;
        }
        ++report.denied;
        if (!report.first_denial)
            report.first_denial =
                FirstDenial{access.seq, verdict.denying_namespace, verdict.reason};
        if (cfg.mode == EnforcementMode::Fatal) {
            report.halted_early = true;
            break;
        }
        ++report.alerts;
        AlertRecord alert;
        alert.seq = access.seq;
        alert.thread = access.thread;
        alert.op = std::string(wire_name(access.op));
        alert.object = access.object;
        alert.denying_namespace = verdict.denying_namespace;
        alert.reason = verdict.reason;
        alert.stack = access.stack;
        report.alert_records.push_back(std::move(alert));
    }
    return report;
}

using FlushCallback = std::function<void(const PolicySet&)>;

// Feeds a trace to the policy generator and returns the discovered set. When
// `flush_interval` is nonzero, `on_flush` receives a snapshot every that many
// events (mirroring periodic persistence during a live run).
inline PolicySet discover(const std::vector<TraceEvent>& events,
                          const std::vector<std::string>& manifest,
                          std::size_t flush_interval = 0,
                          const FlushCallback& on_flush = nullptr) {
    GeneratorState gen(manifest);
    for (const auto& event : events) {
        if (const auto* spawn = std::get_if<SpawnEvent>(&event))
            gen.observe_spawn(*spawn);
        else
            gen.observe(std::get<AccessEvent>(event));
        if (flush_interval != 0 && on_flush && gen.events_observed() % flush_interval == 0)
            on_flush(gen.snapshot());
    }
    return gen.snapshot();
}

}  // namespace ztd
