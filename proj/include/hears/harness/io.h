#ifndef HEARS_HARNESS_IO_H_
#define HEARS_HARNESS_IO_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hears/learner/probe.h"
#include "hears/learner/record.h"

namespace hears {

// First line of every emitted file.
struct FileStamp {
  std::string config_hash;
  std::vector<uint64_t> seeds;
  std::string code_version;
};

std::string StampLine(const FileStamp& stamp);

// shortest round-trip representation
std::string FormatDouble(double x);

struct MpcLogRow {
  uint64_t seed = 0;
  int t = 0;
  double feasibility = 0.0;
  double steer = 0.0;
  double yaw_moment = 0.0;
  bool converged = false;
  double cost = 0.0;
  bool within_bounds = true;
};

struct SeedRollout {
  uint64_t seed = 0;
  Rollout rollout;
};

void WriteEpisodesCsv(const std::string& path, const FileStamp& stamp,
                      const std::vector<RunRecord>& records);
void WriteEnergyTraceCsv(const std::string& path, const FileStamp& stamp,
                         const std::vector<SeedRollout>& rollouts);
void WriteMpcLogCsv(const std::string& path, const FileStamp& stamp,
                    const std::vector<MpcLogRow>& rows);

// Per-seed episode rows parsed back from an episodes.csv.
std::map<uint64_t, std::vector<EpisodeStats>> ReadEpisodesCsv(const std::string& path);

void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace hears

#endif  // HEARS_HARNESS_IO_H_
