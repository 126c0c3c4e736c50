#ifndef BDVARMIN_KERNELS_HPP
#define BDVARMIN_KERNELS_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "bdvarmin/grid.hpp"

namespace bdvarmin {

/// Thread cap for the OpenMP kernels. Reads BDVARMIN_THREADS once; a value of
/// 0 keeps the OpenMP default.
int max_threads();
void set_max_threads(int n);

namespace kernels {

/// Per-element partials summed in index order, so totals do not depend on the
/// thread count.
double deterministic_sum(const std::vector<double>& partial);

/// Mean oscillation table for all axis-aligned lattice squares of `w_nodes`
/// nodes per side that fit inside an nx-by-ny scalar sample: entry (i,j) is
/// the mean of |u - mean(u)| over the square with lower-left node (i,j).
/// Vector samples take the Euclidean norm of the deviation.
std::vector<double> cube_oscillation_table(const std::vector<double>& u,
                                           int nx, int ny, int w_nodes);
std::vector<double> cube_oscillation_table(const std::vector<Vec2>& u,
                                           int nx, int ny, int w_nodes);

/// Sliding-window maximum over each row then column: out(i,j) =
/// max of in over the wx-by-wy window with lower-left (i,j).
std::vector<double> window_max(const std::vector<double>& in, int nx, int ny,
                               int wx, int wy);

/// Gagliardo double sum over node pairs (diagonal excluded):
///   sum_{x != y} |u(x)-u(y)|^p / |x-y|^(dim+s*p) * h^(2*dim).
/// Returns the p-th power of the seminorm.
double gagliardo_double_sum(const std::vector<double>& u, int nx, int ny,
                            double h, double s, double p);
double gagliardo_double_sum(const std::vector<Vec2>& u, int nx, int ny,
                            double h, double s, double p);

namespace serial {

double deterministic_sum(const std::vector<double>& partial);
std::vector<double> cube_oscillation_table(const std::vector<double>& u,
                                           int nx, int ny, int w_nodes);
std::vector<double> cube_oscillation_table(const std::vector<Vec2>& u,
                                           int nx, int ny, int w_nodes);
std::vector<double> window_max(const std::vector<double>& in, int nx, int ny,
                               int wx, int wy);
double gagliardo_double_sum(const std::vector<double>& u, int nx, int ny,
                            double h, double s, double p);
double gagliardo_double_sum(const std::vector<Vec2>& u, int nx, int ny,
                            double h, double s, double p);

} // namespace serial

} // namespace kernels
} // namespace bdvarmin

#endif
