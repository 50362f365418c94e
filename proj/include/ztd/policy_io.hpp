#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ztd/policy.hpp"

// Policy file format.
//
// A policy file is one UTF-8 JSON object. Top-level keys are dependency
// namespaces; each value is an object whose keys follow the grammar
//
//   "<op>"            : bool        -- coarse gate
//   "<op>.allowed"    : [string...] -- direct-access whitelist
//   "<op>.denied"     : [string...] -- blacklist (dominates)
//   "<op>.transitive" : [string...] -- reachable only through another
//                                      directly-permitted dependency
//
// with <op> one of fs.read, fs.write, net.connect, runtime.exec. Parsing is
// strict: any other key is rejected. Policy files are security artifacts; a
// silent typo must not create a hole.

namespace ztd {

// Malformed JSON. `position` is the byte offset reported by the JSON parser.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, const std::string& what)
        : std::runtime_error("policy parse error at byte " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Well-formed JSON containing a key outside the policy grammar.
class UnknownKeyError : public std::runtime_error {
public:
    UnknownKeyError(std::string ns, std::string key)
        : std::runtime_error("unknown policy key \"" + key + "\" in namespace \"" + ns + "\""),
          ns_(std::move(ns)),
          key_(std::move(key)) {}
    const std::string& ns() const { return ns_; }
    const std::string& key() const { return key_; }

private:
    std::string ns_;
    std::string key_;
};

// A grammar key bound to a value of the wrong JSON type.
class TypeError : public std::runtime_error {
public:
    TypeError(std::string key, const std::string& what)
        : std::runtime_error("policy type error for \"" + key + "\": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// A top-level key that is not a valid dependency namespace.
class InvalidNamespaceError : public std::runtime_error {
public:
    explicit InvalidNamespaceError(std::string ns)
        : std::runtime_error("invalid policy namespace: \"" + ns + "\""), ns_(std::move(ns)) {}
    const std::string& ns() const { return ns_; }

private:
    std::string ns_;
};

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::ordered_json& value,
                                            const std::string& key) {
    if (!value.is_array()) throw TypeError(key, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_string()) throw TypeError(key, "expected an array of strings");
        if (item.get_ref<const std::string&>().empty())
            throw TypeError(key, "list entries must be non-empty");
        append_unique(out, item.get_ref<const std::string&>());
    }
    return out;
}

}  // namespace detail

inline PolicySet parse_policy_file(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, e.what());
    }
    if (!doc.is_object()) throw TypeError("$", "policy document must be a JSON object");

    PolicySet set;
    for (const auto& [ns, body] : doc.items()) {
        if (!is_valid_namespace(ns)) throw InvalidNamespaceError(ns);
        if (!body.is_object()) throw TypeError(ns, "namespace value must be a JSON object");

        Policy policy(ns);
        for (const auto& [key, value] : body.items()) {
            bool recognized = false;
            for (ResourceOp op : kAllResourceOps) {
                const std::string base(wire_name(op));
                OpGrant& g = policy.grant(op);
                if (key == base) {
                    if (!value.is_boolean()) throw TypeError(key, "expected a boolean");
                    g.coarse = value.get<bool>();
                } else if (key == base + ".allowed") {
                    g.allowed = detail::string_list(value, key);
                } else if (key == base + ".denied") {
                    g.denied = detail::string_list(value, key);
                } else if (key == base + ".transitive") {
                    g.transitive = detail::string_list(value, key);
                } else {
                    continue;
                }
                recognized = true;
                break;
            }
            if (!recognized) throw UnknownKeyError(ns, key);
        }
        set.insert(std::move(policy));
    }
    return set;
}

// Canonical serialization: namespaces sorted lexicographically; operations in
// fixed order fs.read, fs.write, net.connect, runtime.exec; sub-keys in order
// coarse, allowed, denied, transitive. Empty lists and all-deny operations are
// omitted. Output is byte-deterministic and re-parses to an equal PolicySet.
inline std::string serialize_policy_set(const PolicySet& set) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [ns, policy] : set.policies()) {
        nlohmann::ordered_json body = nlohmann::ordered_json::object();
        for (ResourceOp op : kAllResourceOps) {
            const OpGrant& g = policy.grant(op);
            if (g.is_default()) continue;
            const std::string base(wire_name(op));
            body[base] = g.coarse;
            if (!g.allowed.empty()) body[base + ".allowed"] = g.allowed;
            if (!g.denied.empty()) body[base + ".denied"] = g.denied;
            if (!g.transitive.empty()) body[base + ".transitive"] = g.transitive;
        }
        doc[ns] = std::move(body);
    }
    return doc.dump(2);
}

}  // namespace ztd
