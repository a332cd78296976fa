#include "myosim/csvio.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace myosim {
namespace {

bool is_gz(const std::string& path) {
  return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

std::string format_row(double t, const double* x, std::size_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  std::string row = buf;
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g", x[i]);
    row += buf;
  }
  return row;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path) {
  if (is_gz(path)) {
    gz_ = gzopen(path.c_str(), "wb");
    if (!gz_) throw std::runtime_error("cannot open for writing: " + path);
  } else {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw std::runtime_error("cannot open for writing: " + path);
  }
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::line(const std::string& text) {
  if (gz_) {
    gzwrite(static_cast<gzFile>(gz_), text.data(),
            static_cast<unsigned>(text.size()));
    gzwrite(static_cast<gzFile>(gz_), "\n", 1);
  } else if (file_) {
    std::fwrite(text.data(), 1, text.size(), static_cast<FILE*>(file_));
    std::fputc('\n', static_cast<FILE*>(file_));
  } else {
    throw std::runtime_error("write after close");
  }
}

void CsvWriter::close() {
  if (gz_) {
    gzclose(static_cast<gzFile>(gz_));
    gz_ = nullptr;
  }
  if (file_) {
    std::fclose(static_cast<FILE*>(file_));
    file_ = nullptr;
  }
}

std::string provenance_comment(const std::string& config_hash,
                               std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%s seed=%llu",
                config_hash.c_str(), static_cast<unsigned long long>(seed));
  return buf;
}

void dump_trajectory_csv(const TrajectoryGrid& traj, const std::string& path,
                         const std::string& comment) {
  CsvWriter w(path);
  if (!comment.empty()) w.line(comment);
  std::string header = "t";
  for (std::size_t i = 1; i <= traj.n_particles; ++i)
    header += ",x" + std::to_string(i);
  w.line(header);
  for (std::size_t k = 0; k < traj.rows(); ++k)
    w.line(format_row(traj.time_at(k), traj.positions.data() + k * traj.n_particles,
                      traj.n_particles));
}

void dump_boxpath_csv(const BoxPath& bp, const std::string& path,
                      const std::string& comment) {
  CsvWriter w(path);
  if (!comment.empty()) w.line(comment);
  w.line("t,particle,new_box");
  char buf[96];
  for (const auto& e : bp.events) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%lld", e.time, e.particle, e.box);
    w.line(buf);
  }
}

void dump_jumppath_csv(const JumpPath& jp, const std::string& path,
                       const std::string& comment) {
  CsvWriter w(path);
  if (!comment.empty()) w.line(comment);
  w.line("t,particle,delta");
  char buf[96];
  for (const auto& e : jp.events) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%+d", e.time, e.particle, e.delta);
    w.line(buf);
  }
}

void dump_rates_csv(const std::vector<RateRow>& rows, const std::string& path,
                    const std::string& comment) {
  CsvWriter w(path);
  if (!comment.empty()) w.line(comment);
  w.line("config,particle,direction,rate");
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%zu,%s,%.17g", r.particle,
                  r.direction.c_str(), r.rate);
    w.line("\"" + r.config + "\"" + buf);
  }
}

std::string read_text_file(const std::string& path) {
  std::string out;
  if (is_gz(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open: " + path);
    char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, got);
    gzclose(f);
  } else {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open: " + path);
    char buf[1 << 16];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
  }
  return out;
}

void load_potential_table(const std::string& path, std::vector<double>& x,
                          std::vector<double>& u) {
  const std::string text = read_text_file(path);
  x.clear();
  u.clear();
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    double xv, uv;
    if (std::sscanf(line.c_str(), "%lf,%lf", &xv, &uv) == 2 ||
        std::sscanf(line.c_str(), "%lf %lf", &xv, &uv) == 2) {
      x.push_back(xv);
      u.push_back(uv);
    }
  }
  if (x.size() < 4)
    throw std::runtime_error("potential table needs >= 4 samples: " + path);
}

}  // namespace myosim
