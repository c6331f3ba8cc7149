#include "hears/envs/gridnav.h"

#include <deque>

namespace hears {

namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

// the mdp member needs a placeholder before the grid is known
TabularMdp Placeholder() {
  return TabularMdp(1, 1, {1.0}, {0.0}, 0.5, {0});
}

}  // namespace

GridNav::GridNav(GridNavOptions options) : opt_(std::move(options)), mdp_(Placeholder()) {
  if (opt_.size < 2) throw ModelError("GridNav: size must be >= 2");
  if (!(opt_.slip >= 0.0 && opt_.slip <= 1.0)) throw ModelError("GridNav: slip outside [0, 1]");
  blocked_.assign(n_states(), 0);
  for (auto [r, c] : opt_.walls) {
    if (r < 0 || c < 0 || r >= opt_.size || c >= opt_.size) {
      throw ModelError("GridNav: wall outside the grid");
    }
    blocked_[Index(r, c)] = 1;
  }
  if (blocked_[start()] || blocked_[goal()]) {
    throw ModelError("GridNav: start and goal must be free");
  }
  // bfs backwards from the goal; moves are symmetric
  distance_.assign(n_states(), -1);
  std::deque<int> queue{goal()};
  distance_[goal()] = 0;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int a = 0; a < 4; ++a) {
      const int t = Move(s, a);
      if (distance_[t] < 0) {
        distance_[t] = distance_[s] + 1;
        queue.push_back(t);
      }
    }
  }
  if (distance_[start()] < 0) throw ModelError("GridNav: goal unreachable from start");
  mdp_ = BuildMdp();
}

EnvState GridNav::ToState(int s) const {
  EnvState st;
  st.q = {static_cast<double>(s / opt_.size), static_cast<double>(s % opt_.size)};
  return st;
}

int GridNav::FromState(const EnvState& state) const {
  if (state.q.size() != 2) throw ModelError("GridNav: state must have 2 coordinates");
  return Index(static_cast<int>(state.q[0]), static_cast<int>(state.q[1]));
}

int GridNav::Move(int s, int action) const {
  const int r = s / opt_.size + kDr[action];
  const int c = s % opt_.size + kDc[action];
  if (r < 0 || c < 0 || r >= opt_.size || c >= opt_.size) return s;
  const int t = Index(r, c);
  return blocked_[t] ? s : t;
}

GridNav::Outcome GridNav::Step(int s, int action, Rng& rng) const {
  if (action < 0 || action > 3) throw ModelError("GridNav: action out of range");
  if (s == goal()) return {s, 0.0, true};
  int a = action;
  if (opt_.slip > 0.0) {
    const double u = rng.Uniform();
    // slip picks one of the four moves uniformly
    if (u < opt_.slip) a = static_cast<int>(u / opt_.slip * 4.0) % 4;
  }
  const int t = Move(s, a);
  return {t, t == goal() ? 1.0 : 0.0, t == goal()};
}

double GridNav::TaskPotential(int s) const {
  const int d = distance_[s];
  return d < 0 ? -static_cast<double>(2 * n_states()) : -static_cast<double>(d);
}

TabularMdp GridNav::BuildMdp() const {
  const int ns = n_states();
  const size_t n = static_cast<size_t>(ns) * 4 * ns;
  std::vector<double> p(n, 0.0);
  std::vector<double> r(n, 0.0);
  std::vector<char> terminal(ns, 0);
  terminal[goal()] = 1;
  auto at = [&](int s, int a, int t) { return (static_cast<size_t>(s) * 4 + a) * ns + t; };
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < 4; ++a) {
      if (s == goal()) {
        p[at(s, a, s)] = 1.0;
        continue;
      }
      const double keep = 1.0 - opt_.slip;
      p[at(s, a, Move(s, a))] += keep;
      for (int b = 0; b < 4; ++b) p[at(s, a, Move(s, b))] += opt_.slip / 4.0;
      r[at(s, a, goal())] = 1.0;
    }
  }
  return TabularMdp(ns, 4, std::move(p), std::move(r), opt_.gamma, std::move(terminal));
}

}  // namespace hears
