#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace wqg {

// Flat binary snapshot, little-endian.
//
// Header:
//   char[8]  magic "WQGSNAP\0"
//   uint32   version (1)
//   uint32   domain kind (0 torus, 1 rectangle)
//   float64  a
//   uint32   n (modes)
//   uint32   M (vertical cells; M + 1 layers)
//   float64  lx, ly, z_max
//   float64  t
//   uint32   n1, n2 (horizontal grid nodes per axis)
//   int32    margin (extra grid cells beyond the rectangle; 0 on the torus)
// Payload (row-major float64 arrays):
//   theta   [n]
//   F       [M+1][n]   coefficients of P_n F per layer
//   psi1    [M+1][n]
//   psi2    [M+1][n]
//   F_grid  [M+1][n1*n2] node values, node index ix + n1*iy
struct Snapshot {
  std::uint32_t kind = 0;
  double a = 0.0;
  std::uint32_t n = 0;
  std::uint32_t M = 0;
  double lx = 0.0;
  double ly = 0.0;
  double z_max = 0.0;
  double t = 0.0;
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  std::int32_t margin = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd F;      // (M+1) x n
  Eigen::MatrixXd psi1;   // (M+1) x n
  Eigen::MatrixXd psi2;   // (M+1) x n
  Eigen::MatrixXd F_grid; // (n1*n2) x (M+1)
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

}  // namespace wqg
