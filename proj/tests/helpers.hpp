#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ztd/authz.hpp"
#include "ztd/policy.hpp"
#include "ztd/trace.hpp"

// Test-side oracles: independent reimplementations of the decision rules,
// written against the documented behavior rather than the production code
// (linear scans instead of tries, component lists instead of string prefix
// arithmetic, literal reason strings). Production and oracle must agree on
// every probe; a divergence is a bug in one of them.

namespace ztest {

inline std::vector<std::string> split_on(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.emplace_back(text.substr(pos));
            break;
        }
        parts.emplace_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

// ── path rules ───────────────────────────────────────────────────────────────

inline std::string oracle_normalize_path(std::string_view path) {
    if (path.empty()) return "";
    const bool absolute = path.front() == '/';
    std::vector<std::string> stack;
    for (const auto& part : split_on(path, '/')) {
        if (part.empty() || part == ".") continue;
        if (part == "..") {
            if (!stack.empty() && stack.back() != "..")
                stack.pop_back();
            else if (!absolute)
                stack.push_back("..");
            continue;
        }
        stack.push_back(part);
    }
    if (stack.empty()) return absolute ? "/" : ".";
    std::string out = absolute ? "/" : "";
    for (std::size_t i = 0; i < stack.size(); ++i) {
        if (i > 0) out += '/';
        out += stack[i];
    }
    return out;
}

inline bool oracle_path_match(std::string_view entry, std::string_view object) {
    const std::string e = oracle_normalize_path(entry);
    const std::string o = oracle_normalize_path(object);
    if (e == o) return true;
    const bool e_abs = !e.empty() && e.front() == '/';
    const bool o_abs = !o.empty() && o.front() == '/';
    if (e == "/") return o_abs;
    if (e_abs != o_abs) return false;
    const auto strip = [](const std::string& p, bool abs) {
        std::vector<std::string> parts = split_on(abs ? p.substr(1) : p, '/');
        parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
        return parts;
    };
    const auto ep = strip(e, e_abs);
    const auto op = strip(o, o_abs);
    if (ep.size() >= op.size()) return false;
    return std::equal(ep.begin(), ep.end(), op.begin());
}

// ── network rules ────────────────────────────────────────────────────────────

inline bool oracle_net_match(std::string_view entry, std::string_view object) {
    if (entry == object) return true;
    for (char c : entry)
        if (c == ':') return false;
    std::size_t cut = object.size();
    for (std::size_t i = object.size(); i-- > 0;) {
        if (object[i] == ':') {
            cut = i;
            break;
        }
    }
    return entry == object.substr(0, cut);
}

// ── shell rules ──────────────────────────────────────────────────────────────

inline std::string oracle_program_token(std::string_view command) {
    std::istringstream in{std::string(command)};
    std::string token;
    in >> token;
    return token;
}

inline bool oracle_exec_match(std::string_view entry, std::string_view object) {
    const std::string e = oracle_program_token(entry);
    return !e.empty() && e == oracle_program_token(object);
}

inline bool oracle_entry_match(ztd::ResourceOp op, std::string_view entry,
                               std::string_view object) {
    switch (op) {
        case ztd::ResourceOp::FsRead:
        case ztd::ResourceOp::FsWrite: return oracle_path_match(entry, object);
        case ztd::ResourceOp::NetConnect: return oracle_net_match(entry, object);
        case ztd::ResourceOp::RuntimeExec: return oracle_exec_match(entry, object);
    }
    return false;
}

inline bool oracle_any_match(ztd::ResourceOp op, const std::vector<std::string>& entries,
                             std::string_view object) {
    for (const auto& e : entries)
        if (oracle_entry_match(op, e, object)) return true;
    return false;
}

// ── single-policy decision table ─────────────────────────────────────────────

inline ztd::Decision oracle_check_access(const ztd::Policy& policy, ztd::ResourceOp op,
                                         std::string_view object, ztd::CallPosition position) {
    const ztd::OpGrant& g = policy.grant(op);
    const bool in_allowed = oracle_any_match(op, g.allowed, object);
    const bool in_denied = oracle_any_match(op, g.denied, object);
    const bool in_transitive = oracle_any_match(op, g.transitive, object);
    const bool fine_active = !g.allowed.empty() || !g.transitive.empty();
    const bool direct = position == ztd::CallPosition::Direct;

    if (!g.coarse) return ztd::Decision::deny("op not granted");
    if (in_denied) return ztd::Decision::deny("object denied");
    if (!fine_active) return ztd::Decision::allow();
    if (in_allowed) return ztd::Decision::allow();
    if (!direct && in_transitive) return ztd::Decision::allow();
    return ztd::Decision::deny(direct ? "object not in allowed" : "object not in transitive");
}

// ── whole-stack brute force ──────────────────────────────────────────────────

inline bool oracle_ns_prefix(std::string_view ns, std::string_view name) {
    const auto np = split_on(ns, '.');
    const auto fp = split_on(name, '.');
    if (np.size() > fp.size()) return false;
    return std::equal(np.begin(), np.end(), fp.begin());
}

struct OracleWorld {
    std::vector<ztd::Policy> policies;  // unordered, scanned linearly
    std::map<ztd::ThreadId, std::vector<std::string>> inherited;
    std::vector<std::string> trusted;
};

inline const ztd::Policy* oracle_resolve(const OracleWorld& w, std::string_view frame) {
    const ztd::Policy* best = nullptr;
    for (const auto& p : w.policies) {
        if (!oracle_ns_prefix(p.ns, frame)) continue;
        if (!best || p.ns.size() > best->ns.size()) best = &p;
    }
    return best;
}

inline bool oracle_trusted(const OracleWorld& w, std::string_view frame) {
    for (const auto& t : w.trusted)
        if (oracle_ns_prefix(t, frame)) return true;
    return false;
}

// Namespaces governing a stack, innermost first, deduplicated.
inline std::vector<const ztd::Policy*> oracle_stack_policies(const OracleWorld& w,
                                                             const std::vector<std::string>& stack) {
    std::vector<const ztd::Policy*> out;
    for (const auto& frame : stack) {
        if (oracle_trusted(w, frame)) continue;
        const ztd::Policy* p = oracle_resolve(w, frame);
        if (!p) continue;
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

inline void oracle_spawn(OracleWorld& w, const ztd::SpawnEvent& event) {
    std::vector<std::string> entries;
    for (const ztd::Policy* p : oracle_stack_policies(w, event.stack))
        if (std::find(entries.begin(), entries.end(), p->ns) == entries.end())
            entries.push_back(p->ns);
    for (const auto& ns : w.inherited[event.parent_thread])
        if (std::find(entries.begin(), entries.end(), ns) == entries.end()) entries.push_back(ns);
    w.inherited[event.child_thread] = std::move(entries);
}

inline ztd::Verdict oracle_authorize(const OracleWorld& w, const ztd::AccessEvent& event,
                                     ztd::EnforcementMode mode,
                                     ztd::DefaultDecision fallback) {
    const auto effect = [&](bool allowed) {
        if (allowed) return ztd::ModeEffect::None;
        return mode == ztd::EnforcementMode::Fatal ? ztd::ModeEffect::Raised
                                                   : ztd::ModeEffect::Alerted;
    };

    std::vector<std::pair<const ztd::Policy*, ztd::CallPosition>> checks;
    std::vector<std::string> seen;
    const auto stack_policies = oracle_stack_policies(w, event.stack);
    for (std::size_t i = 0; i < stack_policies.size(); ++i) {
        checks.emplace_back(stack_policies[i],
                            i == 0 ? ztd::CallPosition::Direct : ztd::CallPosition::Transitive);
        seen.push_back(stack_policies[i]->ns);
    }
    const auto it = w.inherited.find(event.thread);
    if (it != w.inherited.end()) {
        for (const auto& ns : it->second) {
            if (std::find(seen.begin(), seen.end(), ns) != seen.end()) continue;
            seen.push_back(ns);
            for (const auto& p : w.policies)
                if (p.ns == ns) {
                    checks.emplace_back(&p, ztd::CallPosition::Transitive);
                    break;
                }
        }
    }

    if (checks.empty()) {
        if (fallback == ztd::DefaultDecision::Allow)
            return ztd::Verdict{true, std::nullopt, "", ztd::ModeEffect::None};
        return ztd::Verdict{false, std::nullopt, "no policy on stack", effect(false)};
    }
    for (const auto& [policy, position] : checks) {
        const ztd::Decision d = oracle_check_access(*policy, event.op, event.object, position);
        if (!d.allowed)
            return ztd::Verdict{false, policy->ns, d.reason, effect(false)};
    }
    return ztd::Verdict{true, std::nullopt, "", ztd::ModeEffect::None};
}

// ── randomized fixtures ──────────────────────────────────────────────────────

inline std::string random_object(std::mt19937& rng, ztd::ResourceOp op) {
    const int k = static_cast<int>(rng() % 6);
    switch (op) {
        case ztd::ResourceOp::FsRead:
        case ztd::ResourceOp::FsWrite: {
            static const char* const patterns[] = {
                "data/f%d.txt",      "/var/app/store%d",      "logs/%d/run.log",
                "cache/./blob%d",    "work/sub/../out%d.bin", "/srv/shared/%d",
            };
            char buf[64];
            std::snprintf(buf, sizeof buf, patterns[rng() % 6], k);
            return buf;
        }
        case ztd::ResourceOp::NetConnect: {
            char buf[64];
            if (rng() % 4 == 0) std::snprintf(buf, sizeof buf, "svc%d.internal", k);
            else std::snprintf(buf, sizeof buf, "svc%d.internal:90%d", k, k);
            return buf;
        }
        case ztd::ResourceOp::RuntimeExec: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "tool%d --level %d", k, static_cast<int>(rng() % 3));
            return buf;
        }
    }
    return "obj";
}

struct TraceFixture {
    std::vector<std::string> manifest;
    std::vector<ztd::TraceEvent> events;
};

// Random well-formed trace whose every access has at least one frame covered
// by the manifest (the precondition for denial-free self-replay under a
// default-deny engine). Namespaces include nested pairs so longest-prefix
// resolution is exercised; spawn chains go up to 3 deep.
inline TraceFixture random_trace(std::mt19937& rng, std::size_t max_events = 1000,
                                 std::size_t max_namespaces = 50, std::size_t max_depth = 8) {
    TraceFixture fixture;
    const std::size_t n_ns = 1 + rng() % max_namespaces;
    for (std::size_t i = 0; i < n_ns; ++i) {
        fixture.manifest.push_back("com.lib" + std::to_string(i));
        if (rng() % 4 == 0 && fixture.manifest.size() < max_namespaces)
            fixture.manifest.push_back("com.lib" + std::to_string(i) + ".ext");
    }

    static const char* const foreign[] = {"com.example.app.Main", "java.util.concurrent.Task",
                                          "org.runtime.internal.Hook"};

    struct ThreadInfo {
        ztd::ThreadId id;
        std::size_t chain_depth;
    };
    std::vector<ThreadInfo> threads = {{0, 0}};
    ztd::ThreadId next_thread = 1;

    const auto random_frame = [&](bool manifested) -> std::string {
        if (!manifested) return foreign[rng() % 3];
        const std::string& ns = fixture.manifest[rng() % fixture.manifest.size()];
        if (rng() % 5 == 0) return ns;  // frame exactly at the namespace
        return ns + ".Cls" + std::to_string(rng() % 4);
    };

    const std::size_t n_events = 1 + rng() % max_events;
    std::uint64_t seq = 0;
    for (std::size_t i = 0; i < n_events; ++i) {
        seq += 1 + rng() % 3;
        const ThreadInfo& parent = threads[rng() % threads.size()];
        if (rng() % 12 == 0 && parent.chain_depth < 3) {
            ztd::SpawnEvent spawn;
            spawn.seq = seq;
            spawn.parent_thread = parent.id;
            spawn.child_thread = next_thread++;
            const std::size_t depth = 1 + rng() % 3;
            for (std::size_t f = 0; f < depth; ++f) spawn.stack.push_back(random_frame(rng() % 3 != 0));
            threads.push_back({spawn.child_thread, parent.chain_depth + 1});
            fixture.events.emplace_back(std::move(spawn));
            continue;
        }
        ztd::AccessEvent access;
        access.seq = seq;
        access.thread = parent.id;
        access.op = ztd::kAllResourceOps[rng() % ztd::kResourceOpCount];
        access.object = random_object(rng, access.op);
        const std::size_t depth = 1 + rng() % max_depth;
        bool any_manifested = false;
        for (std::size_t f = 0; f < depth; ++f) {
            const bool manifested = rng() % 4 != 0;
            any_manifested = any_manifested || manifested;
            access.stack.push_back(random_frame(manifested));
        }
        if (!any_manifested) access.stack[0] = random_frame(true);
        fixture.events.emplace_back(std::move(access));
    }
    return fixture;
}

inline std::string random_list_entry(std::mt19937& rng, ztd::ResourceOp op) {
    if (op == ztd::ResourceOp::NetConnect && rng() % 3 == 0)
        return "svc" + std::to_string(rng() % 6) + ".internal";
    if (op == ztd::ResourceOp::RuntimeExec && rng() % 3 == 0)
        return "tool" + std::to_string(rng() % 6);
    return random_object(rng, op);
}

// ── exhaustive decision sweep ────────────────────────────────────────────────
//
// Enumerates every grant configuration over a 3-entry pool (coarse flag and
// all subsets for allowed/denied/transitive) and probes a 6-object universe
// at both call positions, comparing production check_access with the oracle
// table, reasons included.

struct SweepResult {
    std::size_t cases = 0;
    std::size_t mismatches = 0;
};

inline SweepResult check_access_sweep() {
    struct OpPools {
        ztd::ResourceOp op;
        std::vector<std::string> entries;
        std::vector<std::string> objects;
    };
    const std::vector<OpPools> pools = {
        {ztd::ResourceOp::FsRead,
         {"/a", "/a/b", "x/y"},
         {"/a", "/a/b", "/a/bb", "/a/b/c", "x/y/z", "/a/./b"}},
        {ztd::ResourceOp::FsWrite,
         {"app/logs", "/var/data", "app/logs/x.txt"},
         {"app/logs", "app/logs/run.log", "app/logsx", "/var/data/blob", "/var", "app/./logs/x.txt"}},
        {ztd::ResourceOp::NetConnect,
         {"db.internal", "db.internal:5432", "evil.example:1389"},
         {"db.internal:5432", "db.internal:9999", "db.internal", "evil.example:1389",
          "evil.example:80", "other.host:1"}},
        {ztd::ResourceOp::RuntimeExec,
         {"mysqld", "sh -c echo", "curl http://x"},
         {"mysqld --defaults-file=f", "mysqld", "sh -c rm -rf /", "curl http://x", "curl",
          "bash -c id"}},
    };

    SweepResult result;
    for (const auto& pool : pools) {
        const std::size_t subsets = 1u << pool.entries.size();
        for (int coarse = 0; coarse < 2; ++coarse) {
            for (std::size_t am = 0; am < subsets; ++am) {
                for (std::size_t dm = 0; dm < subsets; ++dm) {
                    for (std::size_t tm = 0; tm < subsets; ++tm) {
                        ztd::Policy policy("com.probe");
                        ztd::OpGrant& g = policy.grant(pool.op);
                        g.coarse = coarse == 1;
                        for (std::size_t b = 0; b < pool.entries.size(); ++b) {
                            if (am & (1u << b)) g.allowed.push_back(pool.entries[b]);
                            if (dm & (1u << b)) g.denied.push_back(pool.entries[b]);
                            if (tm & (1u << b)) g.transitive.push_back(pool.entries[b]);
                        }
                        for (const auto& object : pool.objects) {
                            for (ztd::CallPosition position :
                                 {ztd::CallPosition::Direct, ztd::CallPosition::Transitive}) {
                                ++result.cases;
                                const ztd::Decision got =
                                    ztd::check_access(policy, pool.op, object, position);
                                const ztd::Decision want =
                                    oracle_check_access(policy, pool.op, object, position);
                                if (got != want) ++result.mismatches;
                            }
                        }
                    }
                }
            }
        }
    }
    return result;
}

// ── randomized whole-stack differential ──────────────────────────────────────

struct DifferentialResult {
    std::size_t cases = 0;
    std::size_t mismatches = 0;
};

// Random policy world with nested namespaces, trusted frames, and spawn
// chains; every access is decided by both the engine and the brute-force
// oracle and the verdicts must match exactly.
inline DifferentialResult authorize_differential(std::mt19937& rng, std::size_t accesses) {
    static const char* const roots[] = {"com.a", "org.x", "net.q", "io.z"};

    ztd::PolicySet set;
    std::vector<std::string> namespaces;
    for (const char* root : roots) {
        std::string ns = root;
        for (int depth = 0; depth < 3; ++depth) {
            if (rng() % 3 != 0) {
                if (!set.contains(ns)) {
                    namespaces.push_back(ns);
                    set.insert(ztd::Policy(ns));
                }
            }
            ns += depth == 0 ? ".sub" : ".deep";
        }
    }
    if (namespaces.empty()) {
        namespaces.push_back("com.a");
        set.insert(ztd::Policy("com.a"));
    }

    OracleWorld world;
    for (const auto& ns : namespaces) {
        ztd::Policy& policy = set.get_or_create(ns);
        for (ztd::ResourceOp op : ztd::kAllResourceOps) {
            ztd::OpGrant& g = policy.grant(op);
            g.coarse = rng() % 3 != 0;
            const auto fill = [&](std::vector<std::string>& list, unsigned chance) {
                if (rng() % chance != 0) return;
                const std::size_t sz = 1 + rng() % 3;
                for (std::size_t e = 0; e < sz; ++e)
                    ztd::append_unique(list, random_list_entry(rng, op));
            };
            fill(g.allowed, 2);
            fill(g.denied, 3);
            fill(g.transitive, 2);
        }
        world.policies.push_back(policy);
    }

    ztd::EngineConfig cfg;
    cfg.mode = rng() % 2 ? ztd::EnforcementMode::Fatal : ztd::EnforcementMode::NonFatal;
    cfg.default_when_no_policy_on_stack =
        rng() % 4 == 0 ? ztd::DefaultDecision::Allow : ztd::DefaultDecision::Deny;
    if (rng() % 2) {
        cfg.trusted_namespaces.push_back("io.trusted");
        world.trusted.push_back("io.trusted");
    }

    const ztd::PolicyContext ctx(set);
    ztd::ThreadRegistry registry;

    const auto random_frame = [&]() -> std::string {
        switch (rng() % 8) {
            case 0: return "zz.unknown.Cls" + std::to_string(rng() % 3);
            case 1: return "io.trusted.runtime.Hook";
            default: {
                const std::string& ns = namespaces[rng() % namespaces.size()];
                if (rng() % 4 == 0) return ns;
                return ns + ".Cls" + std::to_string(rng() % 3);
            }
        }
    };
    const auto random_stack = [&]() {
        std::vector<std::string> stack;
        const std::size_t depth = 1 + rng() % 6;
        for (std::size_t f = 0; f < depth; ++f) stack.push_back(random_frame());
        return stack;
    };

    std::vector<ztd::ThreadId> threads = {0};
    ztd::ThreadId next_thread = 1;
    for (int s = 0; s < 8; ++s) {
        ztd::SpawnEvent spawn;
        spawn.parent_thread = threads[rng() % threads.size()];
        spawn.child_thread = next_thread++;
        spawn.stack = random_stack();
        ztd::register_spawn(ctx, registry, cfg, spawn);
        oracle_spawn(world, spawn);
        threads.push_back(spawn.child_thread);
    }

    DifferentialResult result;
    for (std::size_t i = 0; i < accesses; ++i) {
        ztd::AccessEvent event;
        event.seq = i + 1;
        event.thread = threads[rng() % threads.size()];
        event.op = ztd::kAllResourceOps[rng() % ztd::kResourceOpCount];
        event.object = random_object(rng, event.op);
        event.stack = random_stack();
        ++result.cases;
        const ztd::Verdict got = ztd::authorize(ctx, registry, cfg, event);
        const ztd::Verdict want =
            oracle_authorize(world, event, cfg.mode, cfg.default_when_no_policy_on_stack);
        if (got != want) ++result.mismatches;
    }
    return result;
}

inline ztd::PolicySet random_policy_set(std::mt19937& rng, std::size_t max_policies = 30) {
    ztd::PolicySet set;
    const std::size_t n = rng() % (max_policies + 1);
    static const char* const roots[] = {"com", "org", "io", "net"};
    static const char* const mids[] = {"acme", "forge", "metrics", "cache", "auth"};
    for (std::size_t i = 0; i < n; ++i) {
        std::string ns = roots[rng() % 4];
        const std::size_t extra = rng() % 3;
        for (std::size_t d = 0; d < extra; ++d) ns += std::string(".") + mids[rng() % 5];
        ns += ".pkg" + std::to_string(i);
        ztd::Policy policy(ns);
        for (ztd::ResourceOp op : ztd::kAllResourceOps) {
            ztd::OpGrant& g = policy.grant(op);
            g.coarse = rng() % 5 < 3;
            const auto fill = [&](std::vector<std::string>& list) {
                const std::size_t sz = rng() % 4;
                for (std::size_t e = 0; e < sz; ++e)
                    ztd::append_unique(list, random_list_entry(rng, op));
            };
            if (rng() % 2) fill(g.allowed);
            if (rng() % 3 == 0) fill(g.denied);
            if (rng() % 2) fill(g.transitive);
        }
        set.insert(std::move(policy));
    }
    return set;
}

}  // namespace ztest
