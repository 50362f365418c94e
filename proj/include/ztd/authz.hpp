#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ztd/policy.hpp"
#include "ztd/policy_context.hpp"

// Runtime authorization: given a policy context and a call stack, decide
// whether a resource access proceeds. Every dependency on the stack must
// permit the access from its own position; the innermost frame is the Direct
// accessor, everything above it participates transitively. Threads inherit
// the authorization context of the stack that spawned them.

namespace ztd {

using ThreadId = std::uint64_t;

// Thread 0 is the implicit main thread; it exists without a spawn event.
inline constexpr ThreadId kMainThread = 0;

struct AccessEvent {
    std::uint64_t seq = 0;
    ThreadId thread = kMainThread;
    ResourceOp op = ResourceOp::FsRead;
    std::string object;
    std::vector<std::string> stack;  // innermost frame first
    bool operator==(const AccessEvent&) const = default;
};

struct SpawnEvent {
    std::uint64_t seq = 0;
    ThreadId parent_thread = kMainThread;
    ThreadId child_thread = 0;
    std::vector<std::string> stack;  // spawning stack, innermost frame first
    bool operator==(const SpawnEvent&) const = default;
};

class SpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Authorization context saved for a spawned thread: the dependencies that
// were on the spawning stack, plus whatever the spawning thread itself had
// inherited. Policy pointers refer into the PolicyContext the entries were
// resolved against.
struct ThreadEntry {
    std::string ns;
    const Policy* policy = nullptr;
};

class ThreadRegistry {
public:
    bool contains(ThreadId thread) const {
        std::shared_lock lock(mutex_);
        return saved_.count(thread) != 0;
    }

    // Inherited entries for a thread; empty for the main thread and for
    // threads never registered.
    std::vector<ThreadEntry> saved_for(ThreadId thread) const {
        std::shared_lock lock(mutex_);
        const auto it = saved_.find(thread);
        return it == saved_.end() ? std::vector<ThreadEntry>{} : it->second;
    }

    void save(ThreadId child, std::vector<ThreadEntry> entries) {
        std::unique_lock lock(mutex_);
        if (!saved_.emplace(child, std::move(entries)).second)
            throw SpawnError("thread " + std::to_string(child) + " spawned twice");
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return saved_.size();
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<ThreadId, std::vector<ThreadEntry>> saved_;
};

enum class EnforcementMode : std::uint8_t {
    Fatal,     // denial aborts the traced execution
    NonFatal,  // denial is recorded as an alert, execution continues
};

enum class DefaultDecision : std::uint8_t { Allow, Deny };

// What the enforcement mode did with the decision. The decision itself is
// mode-independent.
enum class ModeEffect : std::uint8_t { None, Raised, Alerted };

struct EngineConfig {
    EnforcementMode mode = EnforcementMode::Fatal;
    // Applied when no frame on the stack (and nothing inherited) resolves to
    // a policy. Deny is the zero-trust posture.
    DefaultDecision default_when_no_policy_on_stack = DefaultDecision::Deny;
    // Namespaces whose frames are infrastructure, not dependencies (the
    // runtime itself, the enforcement layer). Matching frames are invisible
    // to authorization.
    std::vector<std::string> trusted_namespaces;
};

struct Verdict {
    bool allowed = false;
    // Namespace whose policy denied the access; empty when denial came from
    // the default (no policy on the stack at all).
    std::optional<std::string> denying_namespace;
    std::string reason;
    ModeEffect mode_effect = ModeEffect::None;
    bool operator==(const Verdict&) const = default;
};

inline constexpr std::string_view kReasonNoPolicyOnStack = "no policy on stack";

namespace detail {

inline bool frame_is_trusted(const EngineConfig& cfg, std::string_view frame) {
    for (const auto& trusted : cfg.trusted_namespaces)
        if (is_component_prefix(trusted, frame)) return true;
    return false;
}

inline std::vector<std::string> untrusted_frames(const EngineConfig& cfg,
                                                 const std::vector<std::string>& stack) {
    if (cfg.trusted_namespaces.empty()) return stack;
    std::vector<std::string> out;
    out.reserve(stack.size());
    for (const auto& frame : stack)
        if (!frame_is_trusted(cfg, frame)) out.push_back(frame);
    return out;
}

}  // namespace detail

// Decides one access. Walks the resolved stack innermost-first, consulting
// each dependency's policy at its call position, then the entries inherited
// from the spawning stack (always transitive). The first denial wins; if
// nothing on the stack resolves to a policy, the configured default applies.
inline Verdict authorize(const PolicyContext& ctx, const ThreadRegistry& registry,
                         const EngineConfig& cfg, const AccessEvent& event) {
    const StackResolution resolution =
        resolve_stack(ctx, detail::untrusted_frames(cfg, event.stack));
    const std::vector<ThreadEntry> inherited = registry.saved_for(event.thread);

    Verdict verdict;
    const auto finish = [&cfg](Verdict v) {
        if (!v.allowed)
            v.mode_effect =
                cfg.mode == EnforcementMode::Fatal ? ModeEffect::Raised : ModeEffect::Alerted;
        return v;
    };

    bool any = false;
    std::unordered_set<std::string_view> seen;
    const auto consult = [&](std::string_view ns, const Policy& policy,
                             CallPosition position) -> std::optional<Verdict> {
        if (!seen.insert(ns).second) return std::nullopt;
        any = true;
        Decision decision = check_access(policy, event.op, event.object, position);
        if (decision.allowed) return std::nullopt;
        Verdict v;
        v.allowed = false;
        v.denying_namespace = std::string(ns);
        v.reason = std::move(decision.reason);
        return v;
    };

    for (const auto& dep : resolution.deps)
        if (auto denial = consult(dep.ns, *dep.policy, dep.position)) return finish(*denial);
    for (const auto& entry : inherited)
        if (auto denial = consult(entry.ns, *entry.policy, CallPosition::Transitive))
            return finish(*denial);

    if (!any) {
        if (cfg.default_when_no_policy_on_stack == DefaultDecision::Allow)
            return Verdict{true, std::nullopt, "", ModeEffect::None};
        return finish(Verdict{false, std::nullopt, std::string(kReasonNoPolicyOnStack),
                              ModeEffect::None});
    }
    return Verdict{true, std::nullopt, "", ModeEffect::None};
}

// Records the spawning stack's authorization context for the child thread.
// The child inherits every dependency resolved from the spawning stack plus
// the parent's own inherited entries, so context survives spawn chains.
// Spawning itself is not a governed resource; this never denies.
inline void register_spawn(const PolicyContext& ctx, ThreadRegistry& registry,
                           const EngineConfig& cfg, const SpawnEvent& event) {
    const StackResolution resolution =
        resolve_stack(ctx, detail::untrusted_frames(cfg, event.stack));

    std::vector<ThreadEntry> entries;
    std::unordered_set<std::string_view> seen;
    for (const auto& dep : resolution.deps) {
        if (!seen.insert(dep.ns).second) continue;
        entries.push_back(ThreadEntry{std::string(dep.ns), dep.policy});
    }
    for (const auto& entry : registry.saved_for(event.parent_thread)) {
        if (!seen.insert(entry.ns).second) continue;
        entries.push_back(entry);
    }
    registry.save(event.child_thread, std::move(entries));
}

}  // namespace ztd
