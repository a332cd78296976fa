#pragma once
// CSV dumps for trajectories, event paths and rate tables.  Files whose name
// ends in .gz are written through zlib.  Every dump starts with a comment
// line carrying the config hash and seed so a stray file can be traced back
// to the run that made it.

#include <cstdint>
#include <string>
#include <vector>

#include "myosim/diffusion.hpp"
#include "myosim/walks.hpp"

namespace myosim {

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void line(const std::string& text);  // writes text plus newline
  void close();

 private:
  void* gz_ = nullptr;
  void* file_ = nullptr;
};

std::string provenance_comment(const std::string& config_hash,
                               std::uint64_t seed);

// header t,x1,...,xN then one row per grid point
void dump_trajectory_csv(const TrajectoryGrid& traj, const std::string& path,
                         const std::string& comment);
// header t,particle,new_box
void dump_boxpath_csv(const BoxPath& bp, const std::string& path,
                      const std::string& comment);
// header t,particle,delta
void dump_jumppath_csv(const JumpPath& jp, const std::string& path,
                       const std::string& comment);

struct RateRow {
  std::string config;  // rendered configuration, e.g. "(0,2)"
  std::size_t particle;
  std::string direction;  // "right" or "left"
  double rate;
};
// header config,particle,direction,rate
void dump_rates_csv(const std::vector<RateRow>& rows, const std::string& path,
                    const std::string& comment);

// whole file as text, transparently gunzipped when the name ends in .gz
std::string read_text_file(const std::string& path);

// two-column x,u samples for user_table potentials; '#' comments allowed
void load_potential_table(const std::string& path, std::vector<double>& x,
                          std::vector<double>& u);

}  // namespace myosim
