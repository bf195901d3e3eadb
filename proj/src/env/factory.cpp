#include "emax/env/factory.hpp"

namespace emax::env {

std::unique_ptr<Environment> make_environment(const EnvConfig& config) {
  struct Visitor {
    std::unique_ptr<Environment> operator()(const ClimbingConfig&) const { return std::make_unique<ClimbingGame>(); }
    std::unique_ptr<Environment> operator()(const LbfConfig& c) const { return std::make_unique<LevelBasedForaging>(c); }
    std::unique_ptr<Environment> operator()(const BpushConfig& c) const { return std::make_unique<BoulderPush>(c); }
  };
  return std::visit(Visitor{}, config);
}

}  // namespace emax::env
