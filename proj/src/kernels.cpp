#include "bdvarmin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>

#include <omp.h>

namespace bdvarmin {

namespace {
int g_max_threads = -1; // -1: not yet read from env

int env_thread_cap() {
    const char* s = std::getenv("BDVARMIN_THREADS");
    if (!s) return 0;
    int v = std::atoi(s);
    return v > 0 ? v : 0;
}
} // namespace

int max_threads() {
    if (g_max_threads < 0) g_max_threads = env_thread_cap();
    int n = omp_get_max_threads();
    if (g_max_threads > 0) n = std::min(n, g_max_threads);
    return n;
}

void set_max_threads(int n) { g_max_threads = n < 0 ? 0 : n; }

namespace kernels {

double deterministic_sum(const std::vector<double>& partial) {
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

namespace serial {
double deterministic_sum(const std::vector<double>& partial) {
    return kernels::deterministic_sum(partial);
}
} // namespace serial

// ---------------------------------------------------------------------------
// Cube oscillation tables
// ---------------------------------------------------------------------------

namespace {

// Summed-area table with one zero row/column of padding.
std::vector<double> prefix_2d(const std::vector<double>& u, int nx, int ny) {
    std::vector<double> p((nx + 1) * (ny + 1), 0.0);
    for (int j = 0; j < ny; ++j) {
        double row = 0.0;
        for (int i = 0; i < nx; ++i) {
            row += u[j * nx + i];
            p[(j + 1) * (nx + 1) + (i + 1)] = p[j * (nx + 1) + (i + 1)] + row;
        }
    }
    return p;
}

inline double box_sum(const std::vector<double>& p, int nx1, int i, int j, int w) {
    return p[(j + w) * nx1 + (i + w)] - p[j * nx1 + (i + w)] -
           p[(j + w) * nx1 + i] + p[j * nx1 + i];
}

template <bool Parallel>
std::vector<double> cube_osc_scalar(const std::vector<double>& u, int nx, int ny, int w) {
    const int cx = nx - w + 1;
    const int cy = ny - w + 1;
    std::vector<double> out(std::max(0, cx) * std::max(0, cy), 0.0);
    if (cx <= 0 || cy <= 0) return out;
    const auto p = prefix_2d(u, nx, ny);
    const int nx1 = nx + 1;
    const double inv = 1.0 / (double(w) * double(w));
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
    for (int j = 0; j < cy; ++j) {
        for (int i = 0; i < cx; ++i) {
            const double mean = box_sum(p, nx1, i, j, w) * inv;
            double dev = 0.0;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a)
                    dev += std::abs(u[(j + b) * nx + (i + a)] - mean);
            out[j * cx + i] = dev * inv;
        }
    }
    return out;
}

template <bool Parallel>
std::vector<double> cube_osc_vec(const std::vector<Vec2>& u, int nx, int ny, int w) {
    const int cx = nx - w + 1;
    const int cy = ny - w + 1;
    std::vector<double> out(std::max(0, cx) * std::max(0, cy), 0.0);
    if (cx <= 0 || cy <= 0) return out;
    std::vector<double> ux(nx * ny), uy(nx * ny);
    for (int k = 0; k < nx * ny; ++k) { ux[k] = u[k].x; uy[k] = u[k].y; }
    const auto px = prefix_2d(ux, nx, ny);
    const auto py = prefix_2d(uy, nx, ny);
    const int nx1 = nx + 1;
    const double inv = 1.0 / (double(w) * double(w));
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
    for (int j = 0; j < cy; ++j) {
        for (int i = 0; i < cx; ++i) {
            const double mx = box_sum(px, nx1, i, j, w) * inv;
            const double my = box_sum(py, nx1, i, j, w) * inv;
            double dev = 0.0;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a) {
                    const Vec2& v = u[(j + b) * nx + (i + a)];
                    dev += std::hypot(v.x - mx, v.y - my);
                }
            out[j * cx + i] = dev * inv;
        }
    }
    return out;
}

} // namespace

std::vector<double> cube_oscillation_table(const std::vector<double>& u,
                                           int nx, int ny, int w_nodes) {
    return cube_osc_scalar<true>(u, nx, ny, w_nodes);
}
std::vector<double> cube_oscillation_table(const std::vector<Vec2>& u,
                                           int nx, int ny, int w_nodes) {
    return cube_osc_vec<true>(u, nx, ny, w_nodes);
}

namespace serial {

std::vector<double> cube_oscillation_table(const std::vector<double>& u,
                                           int nx, int ny, int w) {
    const int cx = nx - w + 1;
    const int cy = ny - w + 1;
    std::vector<double> out(std::max(0, cx) * std::max(0, cy), 0.0);
    if (cx <= 0 || cy <= 0) return out;
    for (int j = 0; j < cy; ++j)
        for (int i = 0; i < cx; ++i) {
            double mean = 0.0;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a) mean += u[(j + b) * nx + (i + a)];
            mean /= double(w) * double(w);
            double dev = 0.0;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a) dev += std::abs(u[(j + b) * nx + (i + a)] - mean);
            out[j * cx + i] = dev / (double(w) * double(w));
        }
    return out;
}

std::vector<double> cube_oscillation_table(const std::vector<Vec2>& u,
                                           int nx, int ny, int w) {
    const int cx = nx - w + 1;
    const int cy = ny - w + 1;
    std::vector<double> out(std::max(0, cx) * std::max(0, cy), 0.0);
    if (cx <= 0 || cy <= 0) return out;
    for (int j = 0; j < cy; ++j)
        for (int i = 0; i < cx; ++i) {
            Vec2 mean;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a) mean += u[(j + b) * nx + (i + a)];
            mean = mean * (1.0 / (double(w) * double(w)));
            double dev = 0.0;
            for (int b = 0; b < w; ++b)
                for (int a = 0; a < w; ++a) dev += (u[(j + b) * nx + (i + a)] - mean).norm();
            out[j * cx + i] = dev / (double(w) * double(w));
        }
    return out;
}

} // namespace serial

// ---------------------------------------------------------------------------
// Sliding-window maximum (van Herk / Gil-Werman along rows, then columns)
// ---------------------------------------------------------------------------

namespace {

void slide_max_1d(const double* in, int n, int w, double* out) {
    // out[i] = max(in[i..i+w-1]) for i in [0, n-w]
    std::deque<int> dq;
    for (int i = 0; i < n; ++i) {
        while (!dq.empty() && in[dq.back()] <= in[i]) dq.pop_back();
        dq.push_back(i);
        if (dq.front() <= i - w) dq.pop_front();
        if (i >= w - 1) out[i - w + 1] = in[dq.front()];
    }
}

template <bool Parallel>
std::vector<double> window_max_impl(const std::vector<double>& in, int nx, int ny,
                                    int wx, int wy) {
    const int ox = nx - wx + 1;
    const int oy = ny - wy + 1;
    std::vector<double> rowmax(std::max(0, ox) * ny);
    std::vector<double> out(std::max(0, ox) * std::max(0, oy));
    if (ox <= 0 || oy <= 0) return out;
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
    for (int j = 0; j < ny; ++j)
        slide_max_1d(in.data() + j * nx, nx, wx, rowmax.data() + j * ox);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
    for (int i = 0; i < ox; ++i) {
        std::vector<double> col(ny), cmax(oy);
        for (int j = 0; j < ny; ++j) col[j] = rowmax[j * ox + i];
        slide_max_1d(col.data(), ny, wy, cmax.data());
        for (int j = 0; j < oy; ++j) out[j * ox + i] = cmax[j];
    }
    return out;
}

} // namespace

std::vector<double> window_max(const std::vector<double>& in, int nx, int ny,
                               int wx, int wy) {
    return window_max_impl<true>(in, nx, ny, wx, wy);
}

namespace serial {
std::vector<double> window_max(const std::vector<double>& in, int nx, int ny,
                               int wx, int wy) {
    const int ox = nx - wx + 1;
    const int oy = ny - wy + 1;
    std::vector<double> out(std::max(0, ox) * std::max(0, oy));
    if (ox <= 0 || oy <= 0) return out;
    for (int j = 0; j < oy; ++j)
        for (int i = 0; i < ox; ++i) {
            double m = in[j * nx + i];
            for (int b = 0; b < wy; ++b)
                for (int a = 0; a < wx; ++a) m = std::max(m, in[(j + b) * nx + (i + a)]);
            out[j * ox + i] = m;
        }
    return out;
}
} // namespace serial

// ---------------------------------------------------------------------------
// Gagliardo double sums
// ---------------------------------------------------------------------------

namespace {

inline double pair_term(double diff_abs, double dist, double expnt, double p) {
    if (diff_abs == 0.0) return 0.0;
    return std::pow(diff_abs, p) / std::pow(dist, expnt);
}

template <bool Parallel, typename T, typename NormDiff>
double gagliardo_impl(const std::vector<T>& u, int nx, int ny, double h,
                      double s, double p, NormDiff norm_diff) {
    const int dim = (ny == 1) ? 1 : 2;
    const double expnt = dim + s * p;
    const int n = nx * ny;
    std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16) num_threads(max_threads()) if (Parallel)
    for (int k = 0; k < n; ++k) {
        const int i = k % nx;
        const int j = k / nx;
        double acc = 0.0;
        for (int l = 0; l < n; ++l) {
            if (l == k) continue;
            const int a = l % nx;
            const int b = l / nx;
            const double dist = h * std::sqrt(double(i - a) * (i - a) + double(j - b) * (j - b));
            acc += pair_term(norm_diff(u[k], u[l]), dist, expnt, p);
        }
        partial[k] = acc;
    }
    const double w = std::pow(h, 2.0 * dim);
    return deterministic_sum(partial) * w;
}

} // namespace

double gagliardo_double_sum(const std::vector<double>& u, int nx, int ny,
                            double h, double s, double p) {
    return gagliardo_impl<true>(u, nx, ny, h, s, p,
                                [](double a, double b) { return std::abs(a - b); });
}
double gagliardo_double_sum(const std::vector<Vec2>& u, int nx, int ny,
                            double h, double s, double p) {
    return gagliardo_impl<true>(u, nx, ny, h, s, p,
                                [](const Vec2& a, const Vec2& b) { return (a - b).norm(); });
}

namespace serial {
double gagliardo_double_sum(const std::vector<double>& u, int nx, int ny,
                            double h, double s, double p) {
    return gagliardo_impl<false>(u, nx, ny, h, s, p,
                                 [](double a, double b) { return std::abs(a - b); });
}
double gagliardo_double_sum(const std::vector<Vec2>& u, int nx, int ny,
                            double h, double s, double p) {
    return gagliardo_impl<false>(u, nx, ny, h, s, p,
                                 [](const Vec2& a, const Vec2& b) { return (a - b).norm(); });
}
} // namespace serial

} // namespace kernels
} // namespace bdvarmin
