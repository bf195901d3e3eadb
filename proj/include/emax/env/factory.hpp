#pragma once

#include "emax/env/bpush.hpp"
#include "emax/env/climbing.hpp"
#include "emax/env/lbf.hpp"

#include <variant>

namespace emax::env {

struct ClimbingConfig {};

using EnvConfig = std::variant<ClimbingConfig, LbfConfig, BpushConfig>;

std::unique_ptr<Environment> make_environment(const EnvConfig& config);

}  // namespace emax::env
