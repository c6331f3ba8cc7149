#ifndef HEARS_ENVS_REGISTRY_H_
#define HEARS_ENVS_REGISTRY_H_

#include <memory>
#include <string>
#include <vector>

#include "hears/envs/env.h"

namespace hears {

// Continuous environments by name: pendulum, lander, hopper, vehicle and
// vehicle-test (the 300 m evaluation road). Throws ModelError otherwise.
std::unique_ptr<Env> MakeEnv(const std::string& name);

std::vector<std::string> EnvNames();

}  // namespace hears

#endif  // HEARS_ENVS_REGISTRY_H_
