#include "hears/learner/actor_critic.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hears/shaping.h"

namespace hears {

namespace {

Eigen::VectorXd ToVec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool AllFinite(const std::vector<double>& p) {
  for (double x : p) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string DumpBatch(const std::vector<const ReplayEntry*>& batch) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& e = *batch[i];
    os << "  [" << i << "] r=" << e.tr.reward << " base=" << e.tr.base_reward
       << " phi=" << e.tr.phi << " phi_next=" << e.tr.phi_next
       << " energy=" << e.tr.action_energy << " terminal=" << e.tr.terminal << " obs=("
       << e.obs.transpose() << ") a=(" << e.sampled_action.transpose() << ")\n";
  }
  return os.str();
}

void GradientStep(std::vector<double>& params, const std::vector<double>& grad, double lr) {
  for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

}  // namespace

ReplayBuffer::ReplayBuffer(size_t capacity, uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw ModelError("ReplayBuffer: capacity must be positive");
  entries_.reserve(std::min<size_t>(capacity, 1 << 16));
}

void ReplayBuffer::Push(ReplayEntry e) {
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(e));
  } else {
    entries_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<size_t> ReplayBuffer::SampleIndices(size_t batch) {
  if (entries_.empty()) throw ModelError("ReplayBuffer: sampling from an empty buffer");
  std::vector<size_t> idx(batch);
  for (auto& i : idx) i = static_cast<size_t>(rng_.UniformInt(static_cast<int>(entries_.size())));
  return idx;
}

double ReplayBuffer::Recompute(const ReplayEntry& e) {
  if (!e.shaped) return e.tr.base_reward;
  return ShapedReward(e.tr.base_reward, e.tr.phi, e.tr.phi_next, e.tr.action_energy, e.gamma,
                      e.lambda);
}

ActorCritic::ActorCritic(int obs_dim, int act_dim, const AcConfig& config, uint64_t init_seed)
    : config_(config) {
  if (obs_dim < 1 || act_dim < 1) throw ModelError("ActorCritic: bad dimensions");
  std::vector<int> a_sizes{obs_dim}, c_sizes{obs_dim};
  for (int h : config.hidden) {
    a_sizes.push_back(h);
    c_sizes.push_back(h);
  }
  a_sizes.push_back(act_dim);
  c_sizes.push_back(1);
  actor_ = Mlp(a_sizes, Activation::kTanh, Activation::kTanh);
  critic_ = Mlp(c_sizes, Activation::kTanh, Activation::kIdentity);
  Rng rng(init_seed);
  actor_.InitRandom(rng, 0.1);
  critic_.InitRandom(rng, 1.0);
  target_actor_ = actor_;
  target_critic_ = critic_;
}

double ActorCritic::CriticLoss(const std::vector<const ReplayEntry*>& batch,
                               std::vector<double>* grad) const {
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Mlp::Cache cache;
  if (grad) grad->assign(critic_.n_params(), 0.0);
  for (const ReplayEntry* e : batch) {
    const double y =
        e->tr.reward + (e->tr.terminal ? 0.0 : config_.gamma * target_critic_.Forward(e->next_obs)[0]);
    const double v = critic_.Forward(e->obs, grad ? &cache : nullptr)[0];
    loss += 0.5 * (v - y) * (v - y) * inv_b;
    if (grad) critic_.Backward(cache, Eigen::VectorXd::Constant(1, (v - y) * inv_b), *grad);
  }
  return loss;
}

UpdateStats ActorCritic::Update(const std::vector<const ReplayEntry*>& batch) {
  if (batch.empty()) throw ModelError("ActorCritic::Update: empty batch");
  UpdateStats st;
  const size_t n = batch.size();
  const double inv_b = 1.0 / static_cast<double>(n);
  // advantages from the critic before this update
  std::vector<double> adv(n);
  for (size_t i = 0; i < n; ++i) {
    const ReplayEntry& e = *batch[i];
    const double y =
        e.tr.reward + (e.tr.terminal ? 0.0 : config_.gamma * target_critic_.Forward(e.next_obs)[0]);
    adv[i] = y - critic_.Forward(e.obs)[0];
  }
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean *= inv_b;
  st.mean_advantage = mean;
  if (config_.normalize_advantage && n > 1) {
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var * inv_b);
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }

  std::vector<double> gc(critic_.n_params(), 0.0);
  st.critic_loss = CriticLoss(batch, &gc);
  st.critic_grad_norm = ClipGradNorm(gc, config_.grad_clip);

  std::vector<double> ga(actor_.n_params(), 0.0);
  Mlp::Cache cache;
  for (size_t i = 0; i < n; ++i) {
    const ReplayEntry& e = *batch[i];
    const Eigen::VectorXd mu = actor_.Forward(e.obs, &cache);
    const double s2 = e.sigma * e.sigma;
    // d(-log pi * A)/d mu = -A (a - mu) / sigma^2
    const Eigen::VectorXd g = -adv[i] * (e.sampled_action - mu) / s2 * inv_b;
    actor_.Backward(cache, g, ga);
  }
  st.actor_grad_norm = ClipGradNorm(ga, config_.grad_clip);

  GradientStep(critic_.params(), gc, config_.lr_critic);
  GradientStep(actor_.params(), ga, config_.lr_actor);
  if (!AllFinite(critic_.params()) || !AllFinite(actor_.params())) {
    throw SimulationError("ActorCritic::Update: non-finite parameter after update " +
                          std::to_string(updates_) + "; last batch:\n" + DumpBatch(batch));
  }
  SoftUpdateTargets();
  ++updates_;
  return st;
}

void ActorCritic::SoftUpdateTargets() {
  PolyakUpdate(critic_.params(), target_critic_.params(), config_.tau);
  PolyakUpdate(actor_.params(), target_actor_.params(), config_.tau);
}

AcResult ActorCriticTrain(Env& env, const ShapingSetup& shaping, const AcConfig& config,
                          uint64_t seed, const AcHooks& hooks) {
  const auto t0 = std::chrono::steady_clock::now();
  // independent streams, drawn in a fixed order
  Rng master(seed);
  const uint64_t init_seed = master.Next();
  const uint64_t reset_seed = master.Next();
  const uint64_t explore_seed = master.Next();
  const uint64_t replay_seed = master.Next();
  Rng reset_rng(reset_seed), explore_rng(explore_seed);

  const int act_dim = env.action_dim();
  AcResult out{RunRecord{}, ActorCritic(env.obs_dim(), act_dim, config, init_seed)};
  out.record.seed = seed;
  ActorCritic& agent = out.agent;
  ReplayBuffer buffer(static_cast<size_t>(config.buffer_capacity), replay_seed);

  PotentialSpec potential;
  potential.alpha_task = shaping.alpha_task;
  potential.alpha_energy = shaping.alpha_energy;
  potential.schedule = shaping.schedule;
  potential.phi_task = [&env](const EnvState& s) { return env.TaskPotential(s); };
  potential.phi_energy = [&env](const EnvState& s) { return env.EnergyPotential(s); };

  const int max_steps = config.max_steps > 0 ? config.max_steps : env.max_steps();
  const double normalizer = env.energy().normalizer();
  int64_t steps = 0;
  std::vector<double> action(act_dim), prev(act_dim);
  for (int ep = 0; ep < config.episodes; ++ep) {
    potential.SetEpisode(ep);
    const double frac =
        config.sigma_decay_episodes > 0
            ? std::min(1.0, static_cast<double>(ep) / config.sigma_decay_episodes)
            : 1.0;
    const double sigma = config.sigma_start + (config.sigma_end - config.sigma_start) * frac;
    EpisodeStats st;
    st.episode = ep;
    EnvState s = env.Reset(reset_rng);
    Eigen::VectorXd obs = ToVec(env.Observe(s));
    double phi = shaping.enabled ? potential(s) : 0.0;
    double e_now = TotalEnergy(env.energy(), s) / normalizer;
    st.energy_start = e_now;
    double e_sum = e_now, energy_sum = 0.0;
    for (int t = 0; t < max_steps; ++t) {
      const Eigen::VectorXd mu = agent.Mean(obs);
      Eigen::VectorXd raw(act_dim);
      for (int k = 0; k < act_dim; ++k) raw[k] = mu[k] + sigma * explore_rng.Normal();
      for (int k = 0; k < act_dim; ++k) action[k] = raw[k];
      ClipAction(action);
      const StepResult res = env.Step(s, action);
      const double a_energy = env.ActionEnergy(s, action);
      const double phi_next = (!shaping.enabled || res.terminal) ? 0.0 : potential(res.next);
      const double r_train =
          shaping.enabled ? ShapedReward(res.reward, phi, phi_next, a_energy, config.gamma,
                                         shaping.lambda)
                          : res.reward;
      ReplayEntry entry;
      entry.tr.state = s;
      entry.tr.action = action;
      entry.tr.reward = r_train;
      entry.tr.base_reward = res.reward;
      entry.tr.next_state = res.next;
      entry.tr.terminal = res.terminal;
      entry.tr.phi = phi;
      entry.tr.phi_next = phi_next;
      entry.tr.action_energy = a_energy;
      entry.obs = obs;
      entry.next_obs = ToVec(env.Observe(res.next));
      entry.sampled_action = raw;
      entry.sigma = sigma;
      entry.lambda = shaping.lambda;
      entry.gamma = config.gamma;
      entry.shaped = shaping.enabled;
      Eigen::VectorXd next_obs = entry.next_obs;
      buffer.Push(std::move(entry));
      ++steps;

      if (static_cast<int64_t>(buffer.size()) >= std::max(config.warmup_steps, config.batch_size) &&
          steps % std::max(1, config.update_every) == 0) {
        const auto idx = buffer.SampleIndices(static_cast<size_t>(config.batch_size));
        std::vector<const ReplayEntry*> batch;
        batch.reserve(idx.size());
        for (size_t i : idx) batch.push_back(&buffer.at(i));
        agent.Update(batch);
        if (hooks.on_update) hooks.on_update(agent);
      }

      st.base_return += res.reward;
      st.shaped_return += r_train;
      if (t > 0) {
        double d = 0.0;
        for (int k = 0; k < act_dim; ++k) d += (action[k] - prev[k]) * (action[k] - prev[k]);
        st.action_tv += std::sqrt(d);
      }
      prev = action;
      energy_sum += a_energy;
      ++st.length;
      s = res.next;
      obs = std::move(next_obs);
      phi = phi_next;
      e_now = TotalEnergy(env.energy(), s) / normalizer;
      e_sum += e_now;
      if (res.terminal) {
        st.terminal = true;
        break;
      }
      if (res.truncated) break;
    }
    st.energy_end = e_now;
    st.energy_mean = e_sum / (st.length + 1);
    st.mean_action_energy = st.length > 0 ? energy_sum / st.length : 0.0;
    out.record.episodes.push_back(st);
    if (hooks.on_episode) hooks.on_episode(st);
  }
  out.record.total_steps = steps;
  out.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void SaveCheckpoint(const std::string& path, const ActorCritic& agent, uint64_t seed,
                    const std::string& config_hash) {
  std::ofstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw ModelError("SaveCheckpoint: cannot open " + path + ".bin");
  const Mlp* nets[] = {&agent.actor(), &agent.critic(), &agent.target_actor(),
                       &agent.target_critic()};
  nlohmann::json meta;
  meta["seed"] = seed;
  meta["config_hash"] = config_hash;
  meta["format"] = "float64-le";
  const char* names[] = {"actor", "critic", "target_actor", "target_critic"};
  for (int i = 0; i < 4; ++i) {
    const auto& p = nets[i]->params();
    bin.write(reinterpret_cast<const char*>(p.data()),
              static_cast<std::streamsize>(p.size() * sizeof(double)));
    meta["nets"].push_back({{"name", names[i]}, {"sizes", nets[i]->sizes()}, {"n_params", p.size()}});
  }
  std::ofstream js(path + ".json");
  js << meta.dump(2) << "\n";
}

void LoadCheckpoint(const std::string& path, ActorCritic& agent) {
  std::ifstream js(path + ".json");
  if (!js) throw ModelError("LoadCheckpoint: missing " + path + ".json");
  const nlohmann::json meta = nlohmann::json::parse(js);
  std::ifstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw ModelError("LoadCheckpoint: missing " + path + ".bin");
  std::vector<std::vector<double>> loaded;
  const Mlp* nets[] = {&agent.actor(), &agent.critic(), &agent.target_actor(),
                       &agent.target_critic()};
  for (int i = 0; i < 4; ++i) {
    const auto sizes = meta["nets"][i]["sizes"].get<std::vector<int>>();
    if (sizes != nets[i]->sizes()) throw ModelError("LoadCheckpoint: shape mismatch");
    std::vector<double> p(nets[i]->n_params());
    bin.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    if (!bin) throw ModelError("LoadCheckpoint: truncated parameter file");
    loaded.push_back(std::move(p));
  }
  agent.mutable_actor().params() = loaded[0];
  agent.mutable_critic().params() = loaded[1];
  agent.mutable_target_actor().params() = loaded[2];
  agent.mutable_target_critic().params() = loaded[3];
}

}  // namespace hears
