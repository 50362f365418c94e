#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ztd/ztd.hpp"

int main(int argc, char** argv) {
    CLI::App app{"zero-trust dependency policy toolkit"};
    app.require_subcommand(1);

    ztd::DiscoverOptions discover_opts;
    CLI::App* discover = app.add_subcommand("discover", "generate least-privilege policies from a trace");
    discover->add_option("--trace", discover_opts.trace_path, "trace file (JSON lines)")->required();
    discover->add_option("--manifest", discover_opts.manifest_path, "dependency manifest")->required();
    discover->add_option("--out", discover_opts.out_path, "policy file to write")->required();
    discover->add_option("--flush-interval", discover_opts.flush_interval,
                         "write intermediate policies every N events");

    ztd::EnforceOptions enforce_opts;
    std::string mode = "fatal";
    CLI::App* enforce = app.add_subcommand("enforce", "replay a trace against a policy file");
    enforce->add_option("--trace", enforce_opts.trace_path, "trace file (JSON lines)")->required();
    enforce->add_option("--policy", enforce_opts.policy_path, "policy file")->required();
    enforce->add_option("--mode", mode, "fatal: stop at first denial; alert: log and continue")
        ->required()
        ->check(CLI::IsMember({"fatal", "alert"}));
    enforce->add_option("--alerts", enforce_opts.alerts_path,
                        "alert sink (JSON lines; default standard error)");
    enforce->add_option("--report", enforce_opts.report_path, "write replay report JSON here");

    ztd::AuditOptions audit_opts;
    CLI::App* audit = app.add_subcommand("audit", "summarize configuration effort of a policy file");
    audit->add_option("--policy", audit_opts.policy_path, "policy file")->required();

    ztd::BenchOptions bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "measure authorization latency scaling");
    bench->add_option("--deps", bench_opts.config.dep_counts, "registered-namespace counts")
        ->delimiter(',');
    bench->add_option("--depths", bench_opts.config.stack_depths, "stack dependency counts")
        ->delimiter(',');
    bench->add_option("--iterations", bench_opts.config.iterations, "authorizations per cell");
    bench->add_option("--out", bench_opts.out_path, "CSV file to write (default standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ztd::kExitOk : ztd::kExitInputError;
    }

    if (discover->parsed()) return ztd::cmd_discover(discover_opts, std::cout, std::cerr);
    if (enforce->parsed()) {
        enforce_opts.mode =
            mode == "fatal" ? ztd::EnforcementMode::Fatal : ztd::EnforcementMode::NonFatal;
        return ztd::cmd_enforce(enforce_opts, std::cout, std::cerr);
    }
    if (audit->parsed()) return ztd::cmd_audit(audit_opts, std::cout, std::cerr);
    if (bench->parsed()) return ztd::cmd_bench(bench_opts, std::cout, std::cerr);
    return ztd::kExitInputError;
}
