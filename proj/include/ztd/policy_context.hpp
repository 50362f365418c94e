#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ztd/policy.hpp"

// Resolution context: maps call-stack frames to governing policies.
//
// Frames carry dot-separated namespaces ("com.fasterxml.jackson.databind");
// policies are keyed by namespace prefixes. Lookup walks a component trie and
// returns the policy at the deepest matching prefix, so cost is bounded by the
// component count of the frame, not by how many policies are loaded.

namespace ztd {

class PolicyContext {
public:
    PolicyContext() = default;

    explicit PolicyContext(const PolicySet& set) {
        for (const auto& [ns, policy] : set.policies()) add(policy);
    }

    // Builds a context of placeholder policies (no grants) for the given
    // namespaces. Useful for resolving stacks against a manifest before any
    // permissions exist.
    static PolicyContext from_namespaces(const std::vector<std::string>& namespaces) {
        PolicyContext ctx;
        for (const auto& ns : namespaces) {
            if (!ctx.find_exact(ns)) ctx.add(Policy(ns));
        }
        return ctx;
    }

    void add(Policy policy) {
        if (!is_valid_namespace(policy.ns))
            throw std::invalid_argument("invalid namespace: \"" + policy.ns + "\"");
        Node* node = &root_;
        std::string_view rest = policy.ns;
        while (!rest.empty()) {
            const std::size_t dot = rest.find('.');
            const std::string_view component = rest.substr(0, dot);
            rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
            auto it = node->children.find(component);
            if (it == node->children.end())
                it = node->children.emplace(std::string(component), std::make_unique<Node>()).first;
            node = it->second.get();
        }
        if (node->policy) throw std::invalid_argument("duplicate policy namespace: \"" + policy.ns + "\"");
        node->policy = std::make_unique<Policy>(std::move(policy));
        ++size_;
    }

    // Longest-prefix match: the policy whose namespace is the deepest
    // component prefix of `name`, or nullptr if no prefix is registered.
    const Policy* lookup(std::string_view name) const {
        std::size_t ignored = 0;
        return lookup_counting(name, ignored);
    }

    // Same as lookup but reports how many trie nodes were visited, so tests
    // can assert that cost tracks the frame depth rather than the policy
    // count.
    const Policy* lookup_counting(std::string_view name, std::size_t& nodes_visited) const {
        const Node* node = &root_;
        const Policy* best = root_.policy.get();
        nodes_visited = 1;
        std::string_view rest = name;
        while (!rest.empty()) {
            const std::size_t dot = rest.find('.');
            const std::string_view component = rest.substr(0, dot);
            rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
            const auto it = node->children.find(component);
            if (it == node->children.end()) break;
            node = it->second.get();
            ++nodes_visited;
            if (node->policy) best = node->policy.get();
        }
        return best;
    }

    // Exact-namespace lookup (no prefix semantics).
    const Policy* find_exact(std::string_view ns) const {
        const Node* node = &root_;
        std::string_view rest = ns;
        while (!rest.empty()) {
            const std::size_t dot = rest.find('.');
            const std::string_view component = rest.substr(0, dot);
            rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
            const auto it = node->children.find(component);
            if (it == node->children.end()) return nullptr;
            node = it->second.get();
        }
        return node->policy.get();
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

private:
    struct ComponentHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    // Hashed children keep the per-component step O(1) in the branching
    // factor, so lookup cost depends only on the frame's component count.
    struct Node {
        std::unordered_map<std::string, std::unique_ptr<Node>, ComponentHash, std::equal_to<>>
            children;
        std::unique_ptr<Policy> policy;
    };

    Node root_;
    std::size_t size_ = 0;
};

// One stack frame attributed to a dependency.
struct ResolvedDep {
    std::string_view ns;  // policy namespace, owned by the context
    const Policy* policy = nullptr;
    CallPosition position = CallPosition::Transitive;
};

struct StackResolution {
    std::vector<ResolvedDep> deps;  // innermost first, one entry per namespace
    bool any_policy_found = false;
};

// Attributes each frame (innermost first) to its governing policy, drops
// frames no policy covers, and deduplicates by namespace keeping the first
// (innermost) occurrence. The first retained dependency is the Direct
// accessor; every later one participates transitively.
inline StackResolution resolve_stack(const PolicyContext& ctx,
                                     const std::vector<std::string>& frames) {
    StackResolution result;
    for (const auto& frame : frames) {
        const Policy* policy = ctx.lookup(frame);
        if (!policy) continue;
        result.any_policy_found = true;
        bool seen = false;
        for (const auto& dep : result.deps) {
            if (dep.ns == policy->ns) {
                seen = true;
                break;
            }
        }
        if (seen) continue;
        const CallPosition position =
            result.deps.empty() ? CallPosition::Direct : CallPosition::Transitive;
        result.deps.push_back(ResolvedDep{policy->ns, policy, position});
    }
    return result;
}

}  // namespace ztd
