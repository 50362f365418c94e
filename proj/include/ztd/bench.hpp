#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ztd/authz.hpp"
#include "ztd/policy.hpp"
#include "ztd/policy_context.hpp"

// Authorization microbenchmark. Two questions: does decision latency stay
// flat as registered namespaces grow (it must; lookup is a trie walk), and
// does it grow linearly with the number of dependencies on the stack (it
// must; each one is consulted).

namespace ztd {

struct BenchConfig {
    std::vector<std::size_t> dep_counts = {10, 100, 1000, 10000};
    std::vector<std::size_t> stack_depths = {2, 4, 8, 16};
    std::size_t iterations = 20000;
    std::size_t repeats = 3;
    // Stack depth held fixed while dependency count varies.
    std::size_t fixed_depth = 5;
    // Dependency count held fixed while stack depth varies.
    std::size_t fixed_deps = 1000;
};

// n pure-coarse fs.read policies over disjoint namespaces.
inline PolicySet synthetic_policy_set(std::size_t n) {
    PolicySet set;
    for (std::size_t i = 0; i < n; ++i) {
        Policy policy("com.dep" + std::to_string(i) + ".mod" + std::to_string(i));
        policy.grant(ResourceOp::FsRead).coarse = true;
        set.insert(std::move(policy));
    }
    return set;
}

// A stack spanning `depth` distinct dependencies, innermost first.
inline std::vector<std::string> synthetic_stack(std::size_t depth) {
    std::vector<std::string> stack;
    stack.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        const std::string n = std::to_string(i);
        stack.push_back("com.dep" + n + ".mod" + n + ".Worker" + n);
    }
    return stack;
}

struct BenchRow {
    std::string dimension;  // "deps" or "depth"
    std::size_t x = 0;
    double mean_ns = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::uint64_t checksum = 0;  // consumed verdicts, defeats dead-code elimination
};

namespace detail {

inline double timed_mean_ns(const PolicyContext& ctx, const AccessEvent& event,
                            std::size_t iterations, std::uint64_t& checksum) {
    const ThreadRegistry registry;
    const EngineConfig cfg;
    for (std::size_t i = 0; i < iterations / 10 + 1; ++i)
        checksum += authorize(ctx, registry, cfg, event).allowed ? 1 : 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < iterations; ++i)
        checksum += authorize(ctx, registry, cfg, event).allowed ? 1 : 0;
    const auto stop = std::chrono::steady_clock::now();
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    return static_cast<double>(ns) / static_cast<double>(iterations);
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace detail

inline BenchReport run_bench(const BenchConfig& cfg) {
    BenchReport report;

    for (const std::size_t n : cfg.dep_counts) {
        const PolicyContext ctx(synthetic_policy_set(n));
        AccessEvent event;
        event.op = ResourceOp::FsRead;
        event.object = "/srv/data/input.bin";
        event.stack = synthetic_stack(std::min(cfg.fixed_depth, n));
        std::vector<double> runs;
        for (std::size_t r = 0; r < cfg.repeats; ++r)
            runs.push_back(detail::timed_mean_ns(ctx, event, cfg.iterations, report.checksum));
        report.rows.push_back(BenchRow{"deps", n, detail::median(std::move(runs))});
    }

    const PolicyContext ctx(synthetic_policy_set(cfg.fixed_deps));
    for (const std::size_t depth : cfg.stack_depths) {
        AccessEvent event;
        event.op = ResourceOp::FsRead;
        event.object = "/srv/data/input.bin";
        event.stack = synthetic_stack(std::min(depth, cfg.fixed_deps));
        std::vector<double> runs;
        for (std::size_t r = 0; r < cfg.repeats; ++r)
            runs.push_back(detail::timed_mean_ns(ctx, event, cfg.iterations, report.checksum));
        report.rows.push_back(BenchRow{"depth", depth, detail::median(std::move(runs))});
    }
    return report;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n == 0) return {};
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LinearFit fit;
    if (sxx == 0.0) {
        fit.intercept = my;
        fit.r2 = 1.0;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

inline double max_min_ratio(const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi / *lo;
}

inline std::string bench_csv(const BenchReport& report) {
    std::string out = "dimension,x,mean_ns\n";
    for (const auto& row : report.rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%s,%zu,%.2f\n", row.dimension.c_str(), row.x,
                      row.mean_ns);
        out += line;
    }
    return out;
}

}  // namespace ztd
