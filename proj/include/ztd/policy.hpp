#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Core permission model: resource operations, per-dependency grants, and the
// access-decision procedure. Everything here is a plain value type; policies
// are immutable once constructed and safe to share across threads.

namespace ztd {

// The set of gated resource operations is closed. Wire names are the only
// serialized representation.
enum class ResourceOp : std::uint8_t {
    FsRead = 0,
    FsWrite = 1,
    NetConnect = 2,
    RuntimeExec = 3,
};

inline constexpr std::size_t kResourceOpCount = 4;

// Canonical serialization order.
inline constexpr std::array<ResourceOp, kResourceOpCount> kAllResourceOps = {
    ResourceOp::FsRead,
    ResourceOp::FsWrite,
    ResourceOp::NetConnect,
    ResourceOp::RuntimeExec,
};

constexpr std::string_view wire_name(ResourceOp op) {
    switch (op) {
        case ResourceOp::FsRead: return "fs.read";
        case ResourceOp::FsWrite: return "fs.write";
        case ResourceOp::NetConnect: return "net.connect";
        case ResourceOp::RuntimeExec: return "runtime.exec";
    }
    return "";
}

inline std::optional<ResourceOp> op_from_wire(std::string_view name) {
    for (ResourceOp op : kAllResourceOps) {
        if (wire_name(op) == name) return op;
    }
    return std::nullopt;
}

// Whether a dependency invoked the sensitive operation itself (innermost
// policy-bearing frame on the stack) or merely appears further up the stack.
enum class CallPosition : std::uint8_t { Direct, Transitive };

// Outcome of a single-policy access check.
struct Decision {
    bool allowed = false;
    std::string reason;  // empty when allowed

    static Decision allow() { return Decision{true, {}}; }
    static Decision deny(std::string why) { return Decision{false, std::move(why)}; }

    bool operator==(const Decision&) const = default;
};

// One operation's grant within a policy. The default-constructed grant is the
// all-deny grant; an absent operation in a policy file is equivalent to it.
//
// `coarse` is the bare "<op>": true/false gate. A non-empty allowed or
// transitive list switches the operation into fine-grained mode, where a bare
// coarse=true no longer grants arbitrary direct objects.
struct OpGrant {
    bool coarse = false;
    std::vector<std::string> allowed;
    std::vector<std::string> denied;
    std::vector<std::string> transitive;

    bool is_default() const {
        return !coarse && allowed.empty() && denied.empty() && transitive.empty();
    }
    bool operator==(const OpGrant&) const = default;
};

// Dot-separated dependency namespace: non-empty, no whitespace, no empty
// components.
inline bool is_valid_namespace(std::string_view ns) {
    if (ns.empty() || ns.front() == '.' || ns.back() == '.') return false;
    char prev = '\0';
    for (char c : ns) {
        if (std::isspace(static_cast<unsigned char>(c))) return false;
        if (c == '.' && prev == '.') return false;
        prev = c;
    }
    return true;
}

// True when `ns` is a dot-component prefix of `name` ("com.foo" prefixes
// "com.foo.Bar" but not "com.foobar.Bar").
inline bool is_component_prefix(std::string_view ns, std::string_view name) {
    if (name.size() < ns.size() || name.substr(0, ns.size()) != ns) return false;
    return name.size() == ns.size() || name[ns.size()] == '.';
}

// Per-dependency permission record.
struct Policy {
    std::string ns;
    std::array<OpGrant, kResourceOpCount> grants{};

    Policy() = default;
    explicit Policy(std::string namespace_name) : ns(std::move(namespace_name)) {}

    OpGrant& grant(ResourceOp op) { return grants[static_cast<std::size_t>(op)]; }
    const OpGrant& grant(ResourceOp op) const { return grants[static_cast<std::size_t>(op)]; }

    // A policy "grants" an operation when its coarse gate is open.
    bool grants_any_op() const {
        for (const OpGrant& g : grants) {
            if (g.coarse) return true;
        }
        return false;
    }

    bool operator==(const Policy&) const = default;
};

// Map from dependency namespace to its policy. Namespaces may nest
// ("com.foo" and "com.foo.baz" may coexist); resolution picks the longest
// match (see policy_context.hpp).
class PolicySet {
public:
    using Map = std::map<std::string, Policy, std::less<>>;

    void insert(Policy policy) {
        if (!is_valid_namespace(policy.ns)) {
            throw std::invalid_argument("invalid namespace: \"" + policy.ns + "\"");
        }
        auto [it, fresh] = policies_.try_emplace(policy.ns, std::move(policy));
        if (!fresh) {
            throw std::invalid_argument("duplicate namespace: \"" + it->first + "\"");
        }
    }

    // Fetches the policy for `ns`, creating an empty one if needed.
    Policy& get_or_create(std::string_view ns) {
        auto it = policies_.find(ns);
        if (it == policies_.end()) {
            if (!is_valid_namespace(ns)) {
                throw std::invalid_argument("invalid namespace: \"" + std::string(ns) + "\"");
            }
            it = policies_.emplace(std::string(ns), Policy(std::string(ns))).first;
        }
        return it->second;
    }

    const Policy* find(std::string_view ns) const {
        auto it = policies_.find(ns);
        return it == policies_.end() ? nullptr : &it->second;
    }

    bool contains(std::string_view ns) const { return policies_.find(ns) != policies_.end(); }
    bool empty() const { return policies_.empty(); }
    std::size_t size() const { return policies_.size(); }

    const Map& policies() const { return policies_; }

    bool operator==(const PolicySet&) const = default;

private:
    Map policies_;
};

// ── Object matching ──────────────────────────────────────────────────────────
//
// File objects match by prefix on lexically normalized paths: a list entry
// matches itself and any path beneath it. Normalization is purely textual
// (collapses ".", "..", duplicate separators); there is no filesystem
// resolution and no symlink awareness, so relative and absolute paths are
// distinct objects.
//
// Network objects use the canonical form "host:port"; a host-only entry
// matches any port. Shell objects are full command strings matched by their
// first whitespace-delimited token (the program name).

inline std::string normalize_path(std::string_view path) {
    std::string out = std::filesystem::path(path).lexically_normal().generic_string();
    while (out.size() > 1 && out.back() == '/') out.pop_back();
    return out;
}

inline bool path_entry_matches(std::string_view entry, std::string_view object) {
    const std::string e = normalize_path(entry);
    const std::string o = normalize_path(object);
    if (e == o) return true;
    if (e == "/") return !o.empty() && o.front() == '/';
    return o.size() > e.size() && o.compare(0, e.size(), e) == 0 && o[e.size()] == '/';
}

inline bool net_entry_matches(std::string_view entry, std::string_view object) {
    if (entry == object) return true;
    if (entry.find(':') != std::string_view::npos) return false;  // host:port entries match exactly
    const std::size_t colon = object.rfind(':');
    const std::string_view host = colon == std::string_view::npos ? object : object.substr(0, colon);
    return entry == host;
}

inline std::string_view first_token(std::string_view text) {
    std::size_t begin = 0;
    while (begin < text.size() && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    std::size_t end = begin;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    return text.substr(begin, end - begin);
}

inline bool exec_entry_matches(std::string_view entry, std::string_view object) {
    return first_token(entry) == first_token(object) && !first_token(entry).empty();
}

inline bool entry_matches(ResourceOp op, std::string_view entry, std::string_view object) {
    switch (op) {
        case ResourceOp::FsRead:
        case ResourceOp::FsWrite: return path_entry_matches(entry, object);
        case ResourceOp::NetConnect: return net_entry_matches(entry, object);
        case ResourceOp::RuntimeExec: return exec_entry_matches(entry, object);
    }
    return false;
}

inline bool any_entry_matches(ResourceOp op, const std::vector<std::string>& entries,
                              std::string_view object) {
    for (const std::string& e : entries) {
        if (entry_matches(op, e, object)) return true;
    }
    return false;
}

// ── Access decision ──────────────────────────────────────────────────────────
//
// Evaluated in order:
//   1. no coarse grant for the operation          -> deny
//   2. object matches the denied list             -> deny (dominates everything)
//   3. pure coarse grant (no allowed/transitive)  -> allow any object
//      object matches the allowed list            -> allow
//   4. transitive position and object matches the
//      transitive list                            -> allow
//   otherwise                                     -> deny
//
// Total function; never throws.

inline constexpr std::string_view kReasonOpNotGranted = "op not granted";
inline constexpr std::string_view kReasonObjectDenied = "object denied";
inline constexpr std::string_view kReasonNotInAllowed = "object not in allowed";
inline constexpr std::string_view kReasonNotInTransitive = "object not in transitive";

inline Decision check_access(const Policy& policy, ResourceOp op, std::string_view object,
                             CallPosition position) {
    const OpGrant& g = policy.grant(op);
    if (!g.coarse) return Decision::deny(std::string(kReasonOpNotGranted));
    if (any_entry_matches(op, g.denied, object)) return Decision::deny(std::string(kReasonObjectDenied));

    const bool pure_coarse = g.allowed.empty() && g.transitive.empty();
    if (pure_coarse || any_entry_matches(op, g.allowed, object)) return Decision::allow();

    if (position == CallPosition::Transitive && any_entry_matches(op, g.transitive, object)) {
        return Decision::allow();
    }
    return Decision::deny(std::string(position == CallPosition::Direct ? kReasonNotInAllowed
                                                                       : kReasonNotInTransitive));
}

// Appends `value` unless already present; preserves first-insertion order so
// serialization stays deterministic.
inline bool append_unique(std::vector<std::string>& list, std::string_view value) {
    for (const std::string& v : list) {
        if (v == value) return false;
    }
    list.emplace_back(value);
    return true;
}

}  // namespace ztd
