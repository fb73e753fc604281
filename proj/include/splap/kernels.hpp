#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops shared by the operator, quadrature and sweep
// code.  Every kernel has an OpenMP version and a plain-loop serial reference
// (namespace serial_ref) kept for equivalence tests and benchmarks.
//
// Reductions accumulate fixed 64-element chunks in index order, so results
// are bitwise identical for any thread count; the serial dispatch path uses
// the same chunk order.
namespace splap::kernels {

inline constexpr std::size_t kChunk = 64;

// Process-wide switch between the OpenMP kernels and the chunk-identical
// serial path.  Defaults to parallel.
void set_parallel(bool enabled);
bool parallel_enabled();

// Worker count for parallel regions (0 = OpenMP default).
void set_workers(int workers);
int workers();

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double power_sum_weighted(std::span<const double> w, std::span<const double> v, double expo);
double sup_abs(std::span<const double> v);
double sup_abs_diff(std::span<const double> a, std::span<const double> b);

// out_i = (u_i + shift)^expo
void map_shifted_power(std::span<const double> u, double shift, double expo,
                       std::span<double> out);
// out_i = a_i + t * b_i
void axpy(std::span<const double> a, double t, std::span<const double> b,
          std::span<double> out);
// out_i = min(max(v_i, lo_i), hi_i)
void clip(std::span<const double> v, std::span<const double> lo,
          std::span<const double> hi, std::span<double> out);

namespace serial_ref {
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double power_sum_weighted(std::span<const double> w, std::span<const double> v, double expo);
double sup_abs(std::span<const double> v);
double sup_abs_diff(std::span<const double> a, std::span<const double> b);
void map_shifted_power(std::span<const double> u, double shift, double expo,
                       std::span<double> out);
void axpy(std::span<const double> a, double t, std::span<const double> b,
          std::span<double> out);
}  // namespace serial_ref

}  // namespace splap::kernels
