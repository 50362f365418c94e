// Discovery and enforcement end to end, in process: derive least-privilege
// policies from a benign trace, then replay the matching exploit against
// them.

#include <iostream>

#include "ztd/ztd.hpp"

int main() {
    const auto scenarios = ztd::builtin_scenarios();
    const ztd::Scenario& s = *ztd::find_scenario(scenarios, "log4shell-model");

    const ztd::PolicySet policies = ztd::discover(s.benign_trace, s.manifest);
    std::cout << "discovered policies:\n" << ztd::serialize_policy_set(policies) << "\n\n";

    const ztd::EngineConfig cfg;
    const ztd::ReplayReport benign = ztd::replay(s.benign_trace, cfg, policies);
    std::cout << "benign trace: " << benign.allowed << " allowed, " << benign.denied
              << " denied\n";

    const ztd::ReplayReport exploit = ztd::replay(s.exploit_trace, cfg, policies);
    if (exploit.first_denial) {
        const auto& fd = *exploit.first_denial;
        std::cout << "exploit trace: denied at seq " << fd.seq << " by "
                  << (fd.denying_namespace ? *fd.denying_namespace : "(default)") << ", "
                  << fd.reason << "\n";
    }
    return exploit.denied > 0 ? 0 : 1;
}
