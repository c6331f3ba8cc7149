#ifndef HEARS_ENVS_GRIDNAV_H_
#define HEARS_ENVS_GRIDNAV_H_

#include <utility>
#include <vector>

#include "hears/mdp.h"
#include "hears/rng.h"
#include "hears/types.h"

namespace hears {

struct GridNavOptions {
  int size = 20;
  double gamma = 0.99;
  double slip = 0.0;           // probability that the move is replaced by a random one
  int max_steps = 2000;
  std::vector<std::pair<int, int>> walls;  // (row, col) blocked cells
};

// Sparse-reward grid: start (0, 0), goal (size-1, size-1), reward 1 on
// entering the goal, which is terminal. Actions 0..3 = up, down, left, right.
// Moves into walls or off the grid leave the agent in place.
class GridNav {
 public:
  explicit GridNav(GridNavOptions options = {});

  int size() const { return opt_.size; }
  int n_states() const { return opt_.size * opt_.size; }
  int n_actions() const { return 4; }
  int start() const { return 0; }
  int goal() const { return n_states() - 1; }
  double gamma() const { return opt_.gamma; }
  int max_steps() const { return opt_.max_steps; }
  bool wall(int s) const { return blocked_[s] != 0; }

  int Index(int row, int col) const { return row * opt_.size + col; }
  EnvState ToState(int s) const;
  int FromState(const EnvState& state) const;

  // deterministic successor for a move
  int Move(int s, int action) const;

  struct Outcome {
    int next;
    double reward;
    bool terminal;
  };
  // One step. Consumes one uniform draw from rng only when slip > 0.
  Outcome Step(int s, int action, Rng& rng) const;

  // shortest-path distance to the goal (BFS); -1 if unreachable
  int Distance(int s) const { return distance_[s]; }
  // -distance; 0 at the goal
  double TaskPotential(int s) const;
  double TaskPotential(const EnvState& state) const { return TaskPotential(FromState(state)); }

  // Exact tabular embedding with the goal as terminal state.
  const TabularMdp& mdp() const { return mdp_; }

 private:
  TabularMdp BuildMdp() const;

  GridNavOptions opt_;
  std::vector<char> blocked_;
  std::vector<int> distance_;
  TabularMdp mdp_;
};

}  // namespace hears

#endif  // HEARS_ENVS_GRIDNAV_H_
