#pragma once

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ztd/bench.hpp"
#include "ztd/generator.hpp"
#include "ztd/policy.hpp"
#include "ztd/policy_io.hpp"
#include "ztd/replay.hpp"
#include "ztd/trace.hpp"

// Command implementations behind the ztd binary. Each takes explicit output
// streams so the commands are testable in-process.
//
// Exit codes: 0 clean, 2 input error (unreadable or malformed files), 3
// denial under fatal enforcement.

namespace ztd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitFatalDenial = 3;

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

inline bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

}  // namespace detail

struct DiscoverOptions {
    std::string trace_path;
    std::string manifest_path;
    std::string out_path;
    std::size_t flush_interval = 1000;
};

struct EnforceOptions {
    std::string trace_path;
    std::string policy_path;
    EnforcementMode mode = EnforcementMode::Fatal;
    std::string alerts_path;  // empty: alerts go to the error stream
    std::string report_path;  // empty: no report written
};

struct AuditOptions {
    std::string policy_path;
};

struct BenchOptions {
    BenchConfig config;
    std::string out_path;  // empty: CSV goes to the output stream
};

inline int cmd_discover(const DiscoverOptions& opts, std::ostream& out, std::ostream& err) {
    const auto trace_text = detail::read_file(opts.trace_path);
    if (!trace_text) {
        err << "cannot read trace file: " << opts.trace_path << "\n";
        return kExitInputError;
    }
    const auto manifest_text = detail::read_file(opts.manifest_path);
    if (!manifest_text) {
        err << "cannot read manifest file: " << opts.manifest_path << "\n";
        return kExitInputError;
    }

    PolicySet discovered;
    try {
        const std::vector<TraceEvent> events = parse_trace(*trace_text);
        const std::vector<std::string> manifest = parse_manifest(*manifest_text);
        bool flush_failed = false;
        discovered = discover(events, manifest, opts.flush_interval,
                              [&](const PolicySet& snapshot) {
                                  if (!detail::write_file(opts.out_path,
                                                          serialize_policy_set(snapshot)))
                                      flush_failed = true;
                              });
        if (flush_failed) {
            err << "cannot write policy file: " << opts.out_path << "\n";
            return kExitInputError;
        }
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    if (!detail::write_file(opts.out_path, serialize_policy_set(discovered))) {
        err << "cannot write policy file: " << opts.out_path << "\n";
        return kExitInputError;
    }
    const AuditMetrics metrics = audit_metrics(discovered);
    out << "policies: " << metrics.policy_count << ", mean permissions per policy: "
        << detail::format_double(metrics.mean_permissions) << "\n";
    return kExitOk;
}

inline int cmd_enforce(const EnforceOptions& opts, std::ostream& out, std::ostream& err) {
    const auto trace_text = detail::read_file(opts.trace_path);
    if (!trace_text) {
        err << "cannot read trace file: " << opts.trace_path << "\n";
        return kExitInputError;
    }
    const auto policy_text = detail::read_file(opts.policy_path);
    if (!policy_text) {
        err << "cannot read policy file: " << opts.policy_path << "\n";
        return kExitInputError;
    }

    ReplayReport report;
    try {
        const std::vector<TraceEvent> events = parse_trace(*trace_text);
        const PolicySet policies = parse_policy_file(*policy_text);
        EngineConfig cfg;
        cfg.mode = opts.mode;
        report = replay(events, cfg, policies);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    if (!opts.report_path.empty() &&
        !detail::write_file(opts.report_path, report.to_json().dump(2) + "\n")) {
        err << "cannot write report file: " << opts.report_path << "\n";
        return kExitInputError;
    }

    if (opts.mode == EnforcementMode::Fatal) {
        if (report.denied == 0) {
            out << "allowed: " << report.allowed << ", denied: 0\n";
            return kExitOk;
        }
        const auto& fd = *report.first_denial;
        out << "fatal denial at seq " << fd.seq << ": namespace="
            << (fd.denying_namespace ? *fd.denying_namespace : "(none)")
            << " reason=\"" << fd.reason << "\"\n";
        return kExitFatalDenial;
    }

    std::string alert_lines;
    for (const auto& alert : report.alert_records) alert_lines += alert_to_json(alert).dump() + "\n";
    if (opts.alerts_path.empty()) {
        err << alert_lines;
    } else if (!detail::write_file(opts.alerts_path, alert_lines)) {
        err << "cannot write alerts file: " << opts.alerts_path << "\n";
        return kExitInputError;
    }
    out << "alerts: " << report.alerts << "\n";
    return kExitOk;
}

inline int cmd_audit(const AuditOptions& opts, std::ostream& out, std::ostream& err) {
    const auto policy_text = detail::read_file(opts.policy_path);
    if (!policy_text) {
        err << "cannot read policy file: " << opts.policy_path << "\n";
        return kExitInputError;
    }

    PolicySet policies;
    try {
        policies = parse_policy_file(*policy_text);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    const AuditMetrics metrics = audit_metrics(policies);
    out << "policy_count: " << metrics.policy_count << "\n";
    out << "mean_permissions_per_policy: " << detail::format_double(metrics.mean_permissions)
        << "\n";
    for (const auto& [ns, policy] : policies.policies()) {
        std::string ops;
        std::size_t granted = 0;
        for (ResourceOp op : kAllResourceOps) {
            if (!policy.grant(op).coarse) continue;
            if (!ops.empty()) ops += ",";
            ops += wire_name(op);
            ++granted;
        }
        out << ns << "\t" << granted << "\t" << ops << "\n";
    }
    return kExitOk;
}

inline int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    const BenchReport report = run_bench(opts.config);
    const std::string csv = bench_csv(report);
    if (opts.out_path.empty()) {
        out << csv;
    } else if (!detail::write_file(opts.out_path, csv)) {
        err << "cannot write csv file: " << opts.out_path << "\n";
        return kExitInputError;
    }

    std::vector<double> dep_xs, dep_ys, depth_xs, depth_ys;
    for (const auto& row : report.rows) {
        if (row.dimension == "deps") {
            dep_xs.push_back(static_cast<double>(row.x));
            dep_ys.push_back(row.mean_ns);
        } else {
            depth_xs.push_back(static_cast<double>(row.x));
            depth_ys.push_back(row.mean_ns);
        }
    }
    if (!dep_ys.empty()) {
        const LinearFit fit = fit_linear(dep_xs, dep_ys);
        out << "deps: max/min ratio " << detail::format_double(max_min_ratio(dep_ys))
            << ", slope " << fit.slope << " ns per namespace\n";
    }
    if (!depth_ys.empty()) {
        const LinearFit fit = fit_linear(depth_xs, depth_ys);
        out << "depth: slope " << detail::format_double(fit.slope) << " ns per dependency, r2 "
            << detail::format_double(fit.r2) << "\n";
    }
    return kExitOk;
}

}  // namespace ztd
