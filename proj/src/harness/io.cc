#include "hears/harness/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hears/types.h"

namespace hears {

namespace {

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write " + path);
  return out;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string StampLine(const FileStamp& stamp) {
  std::ostringstream os;
  os << "# config_hash=" << stamp.config_hash << " seed=";
  for (size_t i = 0; i < stamp.seeds.size(); ++i) os << (i ? ";" : "") << stamp.seeds[i];
  os << " code_version=" << stamp.code_version;
  return os.str();
}

void WriteEpisodesCsv(const std::string& path, const FileStamp& stamp,
                      const std::vector<RunRecord>& records) {
  auto out = OpenOut(path);
  out << StampLine(stamp) << "\n";
  out << "seed,episode,base_return,shaped_return,length,action_tv,mean_action_energy,"
         "energy_start,energy_end,energy_mean,terminal\n";
  for (const RunRecord& r : records) {
    for (const EpisodeStats& e : r.episodes) {
      out << r.seed << ',' << e.episode << ',' << FormatDouble(e.base_return) << ','
          << FormatDouble(e.shaped_return) << ',' << e.length << ',' << FormatDouble(e.action_tv)
          << ',' << FormatDouble(e.mean_action_energy) << ',' << FormatDouble(e.energy_start)
          << ',' << FormatDouble(e.energy_end) << ',' << FormatDouble(e.energy_mean) << ','
          << (e.terminal ? 1 : 0) << "\n";
    }
  }
}

void WriteEnergyTraceCsv(const std::string& path, const FileStamp& stamp,
                         const std::vector<SeedRollout>& rollouts) {
  auto out = OpenOut(path);
  out << StampLine(stamp) << "\n";
  out << "seed,t,energy,delta_energy,action_norm,base_reward,contact\n";
  for (const SeedRollout& sr : rollouts) {
    const Rollout& r = sr.rollout;
    for (size_t t = 0; t < r.energy.size(); ++t) {
      double an = 0.0, rew = 0.0;
      int contact = 0;
      if (t < r.actions.size()) {
        for (double a : r.actions[t]) an += a * a;
        an = std::sqrt(an);
        rew = r.rewards[t];
        contact = r.contact[t];
      }
      const double de = t > 0 ? r.energy[t] - r.energy[t - 1] : 0.0;
      out << sr.seed << ',' << t << ',' << FormatDouble(r.energy[t]) << ',' << FormatDouble(de)
          << ',' << FormatDouble(an) << ',' << FormatDouble(rew) << ',' << contact << "\n";
    }
  }
}

void WriteMpcLogCsv(const std::string& path, const FileStamp& stamp,
                    const std::vector<MpcLogRow>& rows) {
  auto out = OpenOut(path);
  out << StampLine(stamp) << "\n";
  out << "seed,t,f,u_steer,u_yaw_moment,converged,cost,within_bounds\n";
  for (const MpcLogRow& r : rows) {
    out << r.seed << ',' << r.t << ',' << FormatDouble(r.feasibility) << ','
        << FormatDouble(r.steer) << ',' << FormatDouble(r.yaw_moment) << ','
        << (r.converged ? 1 : 0) << ',' << FormatDouble(r.cost) << ','
        << (r.within_bounds ? 1 : 0) << "\n";
  }
}

std::map<uint64_t, std::vector<EpisodeStats>> ReadEpisodesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read " + path);
  std::map<uint64_t, std::vector<EpisodeStats>> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto c = SplitCsv(line);
    if (c.size() != 11) throw ModelError("episodes csv: bad row '" + line + "'");
    EpisodeStats e;
    const uint64_t seed = std::stoull(c[0]);
    e.episode = std::stoi(c[1]);
    e.base_return = std::stod(c[2]);
    e.shaped_return = std::stod(c[3]);
    e.length = std::stoi(c[4]);
    e.action_tv = std::stod(c[5]);
    e.mean_action_energy = std::stod(c[6]);
    e.energy_start = std::stod(c[7]);
    e.energy_end = std::stod(c[8]);
    e.energy_mean = std::stod(c[9]);
    e.terminal = c[10] == "1";
    out[seed].push_back(e);
  }
  return out;
}

void WriteTextFile(const std::string& path, const std::string& content) {
  auto out = OpenOut(path);
  out << content;
}

}  // namespace hears
