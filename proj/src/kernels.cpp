#include "splap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

namespace splap::kernels {

namespace {
bool g_parallel = true;
int g_workers = 0;

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }
}  // namespace

void set_parallel(bool enabled) { g_parallel = enabled; }
bool parallel_enabled() { return g_parallel; }

void set_workers(int w) {
    g_workers = w;
    if (w > 0) omp_set_num_threads(w);
}
int workers() { return g_workers > 0 ? g_workers : omp_get_max_threads(); }

// ---------------------------------------------------------------------------
// serial reference implementations: plain loops, straight accumulation
// ---------------------------------------------------------------------------
namespace serial_ref {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sum(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

double power_sum_weighted(std::span<const double> w, std::span<const double> v, double expo) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(std::fabs(v[i]), expo);
    return s;
}

double sup_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::fabs(a[i] - b[i]));
    return s;
}

void map_shifted_power(std::span<const double> u, double shift, double expo,
                       std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(u[i] + shift, expo);
}

void axpy(std::span<const double> a, double t, std::span<const double> b,
          std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * b[i];
}

}  // namespace serial_ref

// ---------------------------------------------------------------------------
// dispatched kernels: chunked reductions, identical accumulation order on the
// serial and OpenMP paths
// ---------------------------------------------------------------------------
namespace {

template <typename ChunkOp>
double chunked_reduce_sum(std::size_t n, ChunkOp&& op) {
    const std::size_t nc = chunk_count(n);
    std::vector<double> partial(nc);
    if (g_parallel) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(nc); ++c) {
            const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
            partial[static_cast<std::size_t>(c)] = op(lo, std::min(lo + kChunk, n));
        }
    } else {
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t lo = c * kChunk;
            partial[c] = op(lo, std::min(lo + kChunk, n));
        }
    }
    double s = 0.0;
    for (double v : partial) s += v;  // fixed chunk order: thread-count invariant
    return s;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    return chunked_reduce_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        return s;
    });
}

double sum(std::span<const double> a) {
    return chunked_reduce_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i];
        return s;
    });
}

double power_sum_weighted(std::span<const double> w, std::span<const double> v, double expo) {
    return chunked_reduce_sum(w.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += w[i] * std::pow(std::fabs(v[i]), expo);
        return s;
    });
}

double sup_abs(std::span<const double> v) {
    const std::size_t n = v.size();
    double s = 0.0;
    if (g_parallel) {
#pragma omp parallel for reduction(max : s) schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            s = std::max(s, std::fabs(v[static_cast<std::size_t>(i)]));
    } else {
        s = serial_ref::sup_abs(v);
    }
    return s;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double s = 0.0;
    if (g_parallel) {
#pragma omp parallel for reduction(max : s) schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const auto k = static_cast<std::size_t>(i);
            s = std::max(s, std::fabs(a[k] - b[k]));
        }
    } else {
        s = serial_ref::sup_abs_diff(a, b);
    }
    return s;
}

void map_shifted_power(std::span<const double> u, double shift, double expo,
                       std::span<double> out) {
    const std::size_t n = u.size();
    if (g_parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const auto k = static_cast<std::size_t>(i);
            out[k] = std::pow(u[k] + shift, expo);
        }
    } else {
        serial_ref::map_shifted_power(u, shift, expo, out);
    }
}

void axpy(std::span<const double> a, double t, std::span<const double> b,
          std::span<double> out) {
    const std::size_t n = a.size();
    if (g_parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const auto k = static_cast<std::size_t>(i);
            out[k] = a[k] + t * b[k];
        }
    } else {
        serial_ref::axpy(a, t, b, out);
    }
}

void clip(std::span<const double> v, std::span<const double> lo, std::span<const double> hi,
          std::span<double> out) {
    const std::size_t n = v.size();
#pragma omp parallel for schedule(static) if (g_parallel)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = std::min(std::max(v[k], lo[k]), hi[k]);
    }
}

}  // namespace splap::kernels
