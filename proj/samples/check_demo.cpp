// Minimal embedding example: build a policy set in code and ask the engine
// for verdicts directly.

#include <iostream>
#include <string>
#include <vector>

#include "ztd/ztd.hpp"

int main() {
    ztd::PolicySet set;
    ztd::Policy logger("org.example.logger");
    logger.grant(ztd::ResourceOp::FsWrite).coarse = true;
    logger.grant(ztd::ResourceOp::FsWrite).allowed = {"logs"};
    set.insert(std::move(logger));

    const ztd::PolicyContext ctx(set);
    const ztd::ThreadRegistry registry;
    const ztd::EngineConfig cfg;

    const auto show = [&](ztd::ResourceOp op, std::string object,
                          std::vector<std::string> stack) {
        ztd::AccessEvent event;
        event.op = op;
        event.object = std::move(object);
        event.stack = std::move(stack);
        const ztd::Verdict verdict = ztd::authorize(ctx, registry, cfg, event);
        std::cout << ztd::wire_name(op) << " " << event.object << ": "
                  << (verdict.allowed ? "allowed" : "denied, " + verdict.reason) << "\n";
    };

    show(ztd::ResourceOp::FsWrite, "logs/app.log",
         {"org.example.logger.FileSink", "com.example.app.Main"});
    show(ztd::ResourceOp::FsWrite, "/etc/passwd", {"org.example.logger.FileSink"});
    show(ztd::ResourceOp::RuntimeExec, "sh -c id", {"org.example.logger.Config"});
    return 0;
}
