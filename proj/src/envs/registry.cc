#include "hears/envs/registry.h"

#include "hears/envs/hopper.h"
#include "hears/envs/lander.h"
#include "hears/envs/pendulum.h"
#include "hears/envs/vehicle.h"

namespace hears {

std::unique_ptr<Env> MakeEnv(const std::string& name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "lander") return std::make_unique<Lander2D>();
  if (name == "hopper") return std::make_unique<HopperLite>();
  if (name == "vehicle") return std::make_unique<BicycleVehicle>();
  if (name == "vehicle-test") {
    VehicleOptions o;
    o.road_length = kTestRoadLength;
    o.road_seed = 7;
    return std::make_unique<BicycleVehicle>(o);
  }
  throw ModelError("MakeEnv: unknown environment '" + name + "'");
}

std::vector<std::string> EnvNames() {
  return {"pendulum", "lander", "hopper", "vehicle", "vehicle-test"};
}

}  // namespace hears
