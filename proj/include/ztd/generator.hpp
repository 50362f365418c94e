#pragma once

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ztd/authz.hpp"
#include "ztd/policy.hpp"
#include "ztd/policy_context.hpp"

// Least-privilege policy discovery. Observing an execution credits every
// dependency on the stack with exactly the access that occurred: the
// innermost dependency earns a direct permission for the touched object,
// everything above it (and anything inherited from the spawning stack) earns
// a transitive one. Replaying the same execution against the generated
// policies is then denial-free, and nothing broader was granted.

namespace ztd {

class ManifestError : public std::runtime_error {
public:
    ManifestError(std::size_t line, const std::string& what)
        : std::runtime_error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Dependency manifest: one namespace per line, '#' starts a comment, blank
// lines ignored. Duplicates are collapsed, first occurrence kept.
inline std::vector<std::string> parse_manifest(std::string_view text) {
    std::vector<std::string> namespaces;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t' || line.front() == '\r'))
            line.remove_prefix(1);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.remove_suffix(1);
        if (line.empty()) continue;

        if (!is_valid_namespace(line))
            throw ManifestError(line_no, "invalid namespace \"" + std::string(line) + "\"");
        if (!seen.insert(std::string(line)).second) continue;
        namespaces.emplace_back(line);
    }
    return namespaces;
}

class GeneratorState {
public:
    explicit GeneratorState(const std::vector<std::string>& manifest)
        : manifest_(PolicyContext::from_namespaces(manifest)) {}

    // Credits every manifest dependency involved in the access. Frames that
    // resolve to no manifest namespace are not the generator's to govern and
    // are skipped.
    void observe(const AccessEvent& event) {
        std::lock_guard lock(mutex_);
        const StackResolution resolution = resolve_stack(manifest_, event.stack);

        std::unordered_set<std::string_view> credited;
        for (const auto& dep : resolution.deps) {
            credit(dep.ns, event.op, event.object, dep.position);
            credited.insert(dep.ns);
        }
        const auto it = inherited_.find(event.thread);
        if (it != inherited_.end()) {
            for (const auto& ns : it->second) {
                if (credited.count(std::string_view(ns))) continue;
                credit(ns, event.op, event.object, CallPosition::Transitive);
            }
        }
        ++events_observed_;
    }

    // Propagates the spawning stack's dependency set (plus what the parent
    // itself inherited) to the child thread.
    void observe_spawn(const SpawnEvent& event) {
        std::lock_guard lock(mutex_);
        const StackResolution resolution = resolve_stack(manifest_, event.stack);

        std::vector<std::string> entries;
        std::unordered_set<std::string_view> seen;
        for (const auto& dep : resolution.deps) {
            if (!seen.insert(dep.ns).second) continue;
            entries.emplace_back(dep.ns);
        }
        if (const auto it = inherited_.find(event.parent_thread); it != inherited_.end()) {
            for (const auto& ns : it->second) {
                if (!seen.insert(std::string_view(ns)).second) continue;
                entries.push_back(ns);
            }
        }
        if (!inherited_.emplace(event.child_thread, std::move(entries)).second)
            throw SpawnError("thread " + std::to_string(event.child_thread) + " spawned twice");
        ++events_observed_;
    }

    // Deep copy of the policies generated so far.
    PolicySet snapshot() const {
        std::lock_guard lock(mutex_);
        return generated_;
    }

    std::size_t events_observed() const {
        std::lock_guard lock(mutex_);
        return events_observed_;
    }

private:
    void credit(std::string_view ns, ResourceOp op, const std::string& object,
                CallPosition position) {
        OpGrant& grant = generated_.get_or_create(ns).grant(op);
        grant.coarse = true;
        if (position == CallPosition::Direct)
            append_unique(grant.allowed, object);
        else
            append_unique(grant.transitive, object);
    }

    mutable std::mutex mutex_;
    PolicyContext manifest_;
    PolicySet generated_;
    std::unordered_map<ThreadId, std::vector<std::string>> inherited_;
    std::size_t events_observed_ = 0;
};

// Union of two policy sets: namespaces from both, coarse flags OR-ed, object
// lists concatenated without duplicates keeping `a`'s order first.
inline PolicySet merge(const PolicySet& a, const PolicySet& b) {
    PolicySet out = a;
    for (const auto& [ns, policy] : b.policies()) {
        Policy& target = out.get_or_create(ns);
        for (ResourceOp op : kAllResourceOps) {
            const OpGrant& from = policy.grant(op);
            OpGrant& into = target.grant(op);
            into.coarse = into.coarse || from.coarse;
            for (const auto& object : from.allowed) append_unique(into.allowed, object);
            for (const auto& object : from.denied) append_unique(into.denied, object);
            for (const auto& object : from.transitive) append_unique(into.transitive, object);
        }
    }
    return out;
}

struct AuditMetrics {
    std::size_t policy_count = 0;    // namespaces granting at least one operation
    double mean_permissions = 0.0;   // mean granted operations over those namespaces
    bool operator==(const AuditMetrics&) const = default;
};

inline AuditMetrics audit_metrics(const PolicySet& set) {
    AuditMetrics metrics;
    std::size_t total_permissions = 0;
    for (const auto& [ns, policy] : set.policies()) {
        std::size_t granted = 0;
        for (ResourceOp op : kAllResourceOps)
            if (policy.grant(op).coarse) ++granted;
        if (granted == 0) continue;
        ++metrics.policy_count;
        total_permissions += granted;
    }
    if (metrics.policy_count > 0)
        metrics.mean_permissions =
            static_cast<double>(total_permissions) / static_cast<double>(metrics.policy_count);
    return metrics;
}

}  // namespace ztd
