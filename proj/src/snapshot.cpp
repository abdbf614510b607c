#include "wqg/snapshot.hpp"

#include "wqg/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace wqg {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

constexpr char kMagic[8] = {'W', 'Q', 'G', 'S', 'N', 'A', 'P', '\0'};

template <typename T>
void put(std::ofstream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("snapshot truncated");
  return v;
}

// Row-major write of an Eigen matrix.
void put_rows(std::ofstream& o, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put(o, m(r, c));
  }
}

Eigen::MatrixXd get_rows(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
  }
  return m;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw ConfigError("cannot write snapshot '" + path + "'");
  o.write(kMagic, sizeof(kMagic));
  put(o, kSnapshotVersion);
  put(o, s.kind);
  put(o, s.a);
  put(o, s.n);
  put(o, s.M);
  put(o, s.lx);
  put(o, s.ly);
  put(o, s.z_max);
  put(o, s.t);
  put(o, s.n1);
  put(o, s.n2);
  put(o, s.margin);
  for (Eigen::Index i = 0; i < s.theta.size(); ++i) put(o, s.theta[i]);
  put_rows(o, s.F);
  put_rows(o, s.psi1);
  put_rows(o, s.psi2);
  put_rows(o, s.F_grid.transpose());
  if (!o) throw ConfigError("error while writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ConfigError("not a snapshot file: '" + path + "'");
  if (get<std::uint32_t>(in) != kSnapshotVersion) throw ConfigError("unsupported snapshot version");
  Snapshot s;
  s.kind = get<std::uint32_t>(in);
  s.a = get<double>(in);
  s.n = get<std::uint32_t>(in);
  s.M = get<std::uint32_t>(in);
  s.lx = get<double>(in);
  s.ly = get<double>(in);
  s.z_max = get<double>(in);
  s.t = get<double>(in);
  s.n1 = get<std::uint32_t>(in);
  s.n2 = get<std::uint32_t>(in);
  s.margin = get<std::int32_t>(in);
  const Eigen::Index n = s.n;
  const Eigen::Index nl = static_cast<Eigen::Index>(s.M) + 1;
  s.theta = get_rows(in, 1, n).row(0).transpose();
  s.F = get_rows(in, nl, n);
  s.psi1 = get_rows(in, nl, n);
  s.psi2 = get_rows(in, nl, n);
  s.F_grid = get_rows(in, nl, static_cast<Eigen::Index>(s.n1) * s.n2).transpose();
  return s;
}

}  // namespace wqg
