#pragma once

#include <cstddef>

#include "mlid/phases/density.hpp"

namespace mlid::integrals {

struct SpaceTimeGrid {
  // Frequency cutoff K_j of each datum; 0 means estimate from the data
  // (largest |k| where |f^| exceeds cutoff_level * max |f^|).
  double frequency_cutoff = 0.0;
  double cutoff_level = 1e-10;
  // |t| <= t_uniform on uniform_steps trapezoid intervals, then geometric
  // nodes with ratio ~growth out to t_max (trapezoid in log t).
  double t_uniform = 0.1;
  int uniform_steps = 400;
  double growth = 1.05;
  double t_max = 200.0;
  // Tail beyond t_max, modelled as c / t^2, allowed relative to the value.
  double tail_tolerance = 5e-3;
  // Required decay of |f^| at the Nyquist frequency of the spatial grid.
  double spectrum_decay = 1e-8;
  int max_log2_points = 20;
  int workers = 0;
};

struct SpaceTimeResult {
  double value = 0.0;  // including the modelled tail
  double tail = 0.0;
  double norm1 = 0.0;  // ||f_1||_2^2 on the grid
  double norm2 = 0.0;
  std::size_t spatial_points = 0;
  std::size_t time_nodes = 0;
  double dx = 0.0;
  double length = 0.0;
};

// int int |D_x^{1/2}(u_1 conj(u_2))(x,t)|^2 dx dt for the free evolutions
// i u_t = u_xx of data f_1, f_2 on R: spectral propagation on a periodic grid
// wide enough that nothing wraps before t_max, |D|^{1/2} by FFT, grid rule in
// x, graded trapezoid in t. Throws kTailModelRejected when the tail is too big.
SpaceTimeResult ot_identity_lhs(const phases::Density& f1, const phases::Density& f2, const SpaceTimeGrid& grid = {});

// The space integral at a single time (exposed for oracle tests).
double ot_time_slice(const phases::Density& f1, const phases::Density& f2, double t, const SpaceTimeGrid& grid = {});

}  // namespace mlid::integrals
