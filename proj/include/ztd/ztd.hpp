#pragma once

#include "ztd/authz.hpp"
#include "ztd/bench.hpp"
#include "ztd/cli.hpp"
#include "ztd/generator.hpp"
#include "ztd/policy.hpp"
#include "ztd/policy_context.hpp"
#include "ztd/policy_io.hpp"
#include "ztd/replay.hpp"
#include "ztd/scenarios.hpp"
#include "ztd/trace.hpp"
