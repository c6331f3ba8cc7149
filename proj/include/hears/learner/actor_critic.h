#ifndef HEARS_LEARNER_ACTOR_CRITIC_H_
#define HEARS_LEARNER_ACTOR_CRITIC_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hears/envs/env.h"
#include "hears/learner/record.h"
#include "hears/nn.h"
#include "hears/rng.h"
#include "hears/types.h"

namespace hears {

struct ReplayEntry {
  Transition tr;                   // reward holds the training reward
  Eigen::VectorXd obs;
  Eigen::VectorXd next_obs;
  Eigen::VectorXd sampled_action;  // before clipping
  double sigma = 0.0;              // exploration scale at sampling time
  double lambda = 0.0;
  double gamma = 0.0;
  bool shaped = false;
};

// Ring buffer with uniform sampling (with replacement). The sampled indices
// depend only on the seed and the number of entries.
class ReplayBuffer {
 public:
  ReplayBuffer(size_t capacity, uint64_t seed);

  void Push(ReplayEntry e);
  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }
  const ReplayEntry& at(size_t i) const { return entries_[i]; }
  std::vector<size_t> SampleIndices(size_t batch);

  // shaped reward recomputed from the cached potentials and action energy
  static double Recompute(const ReplayEntry& e);

 private:
  size_t capacity_;
  size_t next_ = 0;
  std::vector<ReplayEntry> entries_;
  Rng rng_;
};

struct AcConfig {
  std::vector<int> hidden{32, 32};
  double gamma = 0.99;
  double tau = 0.005;
  double lr_actor = 1e-3;
  double lr_critic = 3e-3;
  int batch_size = 64;
  int buffer_capacity = 20000;
  int warmup_steps = 500;
  int update_every = 1;  // environment steps between update batches
  double sigma_start = 0.5;
  double sigma_end = 0.1;
  int sigma_decay_episodes = 100;
  double grad_clip = 1.0;
  int episodes = 100;
  int max_steps = 0;     // 0: environment default
  bool normalize_advantage = true;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double critic_grad_norm = 0.0;
  double actor_grad_norm = 0.0;
  double mean_advantage = 0.0;
};

class ActorCritic {
 public:
  ActorCritic(int obs_dim, int act_dim, const AcConfig& config, uint64_t init_seed);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic() { return critic_; }
  Mlp& mutable_target_actor() { return target_actor_; }
  Mlp& mutable_target_critic() { return target_critic_; }
  const AcConfig& config() const { return config_; }
  int updates() const { return updates_; }

  Eigen::VectorXd Mean(const Eigen::VectorXd& obs) const { return actor_.Forward(obs); }
  double Value(const Eigen::VectorXd& obs) const { return critic_.Forward(obs)[0]; }

  // One update batch: critic TD regression towards y = r + gamma V'(s'),
  // actor step along grad log pi(a|s) * A with A = y - V(s), then Polyak
  // averaging of both targets. Throws SimulationError with a dump of the
  // batch if a parameter becomes non-finite.
  UpdateStats Update(const std::vector<const ReplayEntry*>& batch);

  // critic loss 0.5 mean (V(s) - y)^2 with targets held fixed; its gradient
  // is what Update descends
  double CriticLoss(const std::vector<const ReplayEntry*>& batch,
                    std::vector<double>* grad = nullptr) const;

  void SoftUpdateTargets();

 private:
  AcConfig config_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  int updates_ = 0;
};

struct AcHooks {
  std::function<void(const ActorCritic&)> on_update;
  std::function<void(const EpisodeStats&)> on_episode;
};

struct AcResult {
  RunRecord record;
  ActorCritic agent;
};

// Training loop. Seed streams for initialization, resets, exploration and
// replay are derived from `seed` in a fixed order.
AcResult ActorCriticTrain(Env& env, const ShapingSetup& shaping, const AcConfig& config,
                          uint64_t seed, const AcHooks& hooks = {});

// flat little-endian doubles (actor, critic, target actor, target critic)
// plus a JSON sidecar with the shapes, seed and config hash
void SaveCheckpoint(const std::string& path, const ActorCritic& agent, uint64_t seed,
                    const std::string& config_hash);
void LoadCheckpoint(const std::string& path, ActorCritic& agent);

}  // namespace hears

#endif  // HEARS_LEARNER_ACTOR_CRITIC_H_
