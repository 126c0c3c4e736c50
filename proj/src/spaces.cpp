#include "bdvarmin/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <fftw3.h>
#include <omp.h>

#include "bdvarmin/kernels.hpp"
#include "bdvarmin/simplex.hpp"

namespace bdvarmin {

// ---------------------------------------------------------------------------
// Gagliardo
// ---------------------------------------------------------------------------

double gagliardo(const ScalarSamples& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0 && p >= 1.0))
        throw std::invalid_argument("gagliardo: need s in (0,1), p >= 1");
    const double vp = kernels::gagliardo_double_sum(u.values, u.nx, u.ny, u.h, s, p);
    return std::pow(vp, 1.0 / p);
}

double gagliardo(const VectorField& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0 && p >= 1.0))
        throw std::invalid_argument("gagliardo: need s in (0,1), p >= 1");
    const GridDomain& g = u.grid();
    const double vp = kernels::gagliardo_double_sum(u.data(), g.nx(), g.ny(), g.h(), s, p);
    return std::pow(vp, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Besov / Nikolskii
// ---------------------------------------------------------------------------

namespace {

template <typename Getter>
double shift_lp_norm(Getter get, int nx, int ny, double h, int axis, int m, double p) {
    const int dim = (ny == 1) ? 1 : 2;
    const int lim_x = nx - (axis == 0 ? m : 0);
    const int lim_y = ny - (axis == 1 ? m : 0);
    double acc = 0.0;
    for (int j = 0; j < lim_y; ++j)
        for (int i = 0; i < lim_x; ++i)
            acc += std::pow(get(i, j, axis, m), p);
    return std::pow(acc * std::pow(h, dim), 1.0 / p);
}

template <typename Getter>
double besov_impl(Getter get, int nx, int ny, double h, double alpha, double p, double q) {
    const int axes = (ny == 1) ? 1 : 2;
    const bool qinf = q <= 0.0;
    double total = 0.0, best = 0.0;
    for (int axis = 0; axis < axes; ++axis) {
        const int ext = (axis == 0 ? nx : ny);
        double axis_acc = 0.0;
        for (int m = 1; m < ext; ++m) {
            const double nrm = shift_lp_norm(get, nx, ny, h, axis, m, p);
            const double ratio = nrm / std::pow(m * h, alpha);
            if (qinf) {
                best = std::max(best, ratio);
            } else {
                // dt/t over [mh, (m+1)h): the ratio is piecewise constant in
                // the realizable scales
                axis_acc += std::pow(ratio, q) * std::log((m + 1.0) / m);
            }
        }
        if (!qinf) total += std::pow(axis_acc, 1.0 / q);
    }
    return qinf ? best : total;
}

} // namespace

double besov_nikolskii(const ScalarSamples& u, double alpha, double p, double q) {
    if (!(alpha > 0.0 && alpha < 1.0 && p >= 1.0))
        throw std::invalid_argument("besov_nikolskii: need alpha in (0,1), p >= 1");
    auto get = [&](int i, int j, int axis, int m) {
        const int i2 = i + (axis == 0 ? m : 0);
        const int j2 = j + (axis == 1 ? m : 0);
        return std::abs(u.at(i2, j2) - u.at(i, j));
    };
    return besov_impl(get, u.nx, u.ny, u.h, alpha, p, q);
}

double besov_nikolskii(const VectorField& u, double alpha, double p, double q) {
    if (!(alpha > 0.0 && alpha < 1.0 && p >= 1.0))
        throw std::invalid_argument("besov_nikolskii: need alpha in (0,1), p >= 1");
    const GridDomain& g = u.grid();
    auto get = [&](int i, int j, int axis, int m) {
        const int i2 = i + (axis == 0 ? m : 0);
        const int j2 = j + (axis == 1 ? m : 0);
        return (u.at(i2, j2) - u.at(i, j)).norm();
    };
    return besov_impl(get, g.nx(), g.ny(), g.h(), alpha, p, q);
}

// ---------------------------------------------------------------------------
// Sharp maximal operators
// ---------------------------------------------------------------------------

namespace {

// 1D interval oscillation table: entry i is the mean absolute deviation over
// the window [i, i+W).
std::vector<double> interval_osc_table(const std::vector<double>& u, int nx, int W) {
    const int c = nx - W + 1;
    std::vector<double> out(std::max(0, c), 0.0);
    for (int i = 0; i < c; ++i) {
        double mean = 0.0;
        for (int a = 0; a < W; ++a) mean += u[i + a];
        mean /= W;
        double dev = 0.0;
        for (int a = 0; a < W; ++a) dev += std::abs(u[i + a] - mean);
        out[i] = dev / W;
    }
    return out;
}

std::vector<double> interval_osc_table(const std::vector<Vec2>& u, int nx, int W) {
    const int c = nx - W + 1;
    std::vector<double> out(std::max(0, c), 0.0);
    for (int i = 0; i < c; ++i) {
        Vec2 mean;
        for (int a = 0; a < W; ++a) mean += u[i + a];
        mean = mean * (1.0 / W);
        double dev = 0.0;
        for (int a = 0; a < W; ++a) dev += (u[i + a] - mean).norm();
        out[i] = dev / W;
    }
    return out;
}

template <typename Vals>
std::vector<double> frac_sharp_impl(const Vals& vals, int nx, int ny, double h,
                                    double alpha) {
    std::vector<double> out(size_t(nx) * ny, 0.0);
    const int wmax = (std::min(nx, ny == 1 ? nx : ny) - 1) / 2;
    for (int w = 1; w <= wmax; ++w) {
        const int W = 2 * w + 1;
        std::vector<double> table;
        if (ny == 1)
            table = interval_osc_table(vals, nx, W);
        else
            table = kernels::cube_oscillation_table(vals, nx, ny, W);
        const double scale = std::pow(W * h, -alpha);
        const int cx = nx - W + 1;
        const int cy = (ny == 1 ? 1 : ny - W + 1);
        for (int j = 0; j < cy; ++j)
            for (int i = 0; i < cx; ++i) {
                const double v = table[j * cx + i] * scale;
                const int ni = i + w;
                const int nj = (ny == 1 ? 0 : j + w);
                double& o = out[size_t(nj) * nx + ni];
                o = std::max(o, v);
            }
    }
    return out;
}

} // namespace

std::vector<double> frac_sharp_maximal(const ScalarSamples& u, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("frac_sharp_maximal: alpha >= 0");
    return frac_sharp_impl(u.values, u.nx, u.ny, u.h, alpha);
}

std::vector<double> frac_sharp_maximal(const VectorField& u, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("frac_sharp_maximal: alpha >= 0");
    const GridDomain& g = u.grid();
    return frac_sharp_impl(u.data(), g.nx(), g.ny(), g.h(), alpha);
}

double bmo_norm(const ScalarSamples& u) {
    const auto m = frac_sharp_maximal(u, 0.0);
    return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

double bmo_norm(const VectorField& u) {
    const auto m = frac_sharp_maximal(u, 0.0);
    return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

double logconvexity_check(const ScalarSamples& u, double s, double t, double lambda) {
    if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0 && lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("logconvexity_check: s, t, lambda in (0,1)");
    const double mid = lambda * s + (1.0 - lambda) * t;
    const auto Ms = frac_sharp_maximal(u, s);
    const auto Mt = frac_sharp_maximal(u, t);
    const auto Mm = frac_sharp_maximal(u, mid);
    double margin = kInf;
    for (size_t k = 0; k < Mm.size(); ++k) {
        const double rhs = std::pow(Ms[k], lambda) * std::pow(Mt[k], 1.0 - lambda);
        margin = std::min(margin, rhs - Mm[k]);
    }
    return margin;
}

// ---------------------------------------------------------------------------
// Dorronsoro
// ---------------------------------------------------------------------------

namespace {

// Per-node sup over all lattice cubes of node-width W containing the node.
std::vector<double> containing_cube_sup(const std::vector<double>& table, int nx, int ny,
                                        int W) {
    const int cx = nx - W + 1;
    const int cy = ny - W + 1;
    const int px = cx + 2 * (W - 1);
    const int py = cy + 2 * (W - 1);
    std::vector<double> padded(size_t(px) * py, -1.0);
    for (int j = 0; j < cy; ++j)
        for (int i = 0; i < cx; ++i)
            padded[size_t(j + W - 1) * px + (i + W - 1)] = table[size_t(j) * cx + i];
    return kernels::window_max(padded, px, py, W, W); // exactly nx-by-ny
}

} // namespace

double doro_seminorm(const ScalarSamples& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0 && p > 1.0))
        throw std::invalid_argument("doro_seminorm: need s in (0,1), p > 1");
    if (u.ny == 1) throw std::invalid_argument("doro_seminorm: 2D samples required");
    const int nx = u.nx, ny = u.ny;
    std::vector<double> acc(size_t(nx) * ny, 0.0);
    const int Wmax = std::min(nx, ny);
    for (int W = 2; W <= Wmax; ++W) {
        const auto table = kernels::cube_oscillation_table(u.values, nx, ny, W);
        const auto sup = containing_cube_sup(table, nx, ny, W);
        const double t = W * u.h;
        const double wlog = std::log((W + 1.0) / W);
        const double scale = std::pow(t, -s);
        for (size_t k = 0; k < acc.size(); ++k)
            acc[k] += std::pow(sup[k] * scale, p) * wlog;
    }
    const double total = kernels::deterministic_sum(acc) * u.h * u.h;
    return std::pow(total, 1.0 / p);
}

double doro_ratio(const ScalarSamples& u, double s, double p) {
    const double d = doro_seminorm(u, s, p);
    const double gag = gagliardo(u, s, p);
    if (gag == 0.0) return 0.0;
    return d / gag;
}

DoroReductionReport doro_centered_reduction_check(const ScalarSamples& u, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("doro_centered_reduction_check: alpha > 0");
    if (u.ny == 1)
        throw std::invalid_argument("doro_centered_reduction_check: 2D samples required");
    const int nx = u.nx, ny = u.ny;
    DoroReductionReport rep;
    const double K = 2.0;
    rep.constant = 2.0 * std::pow(K, 4.0 + alpha); // 2 K^(2n+alpha), n = 2
    const auto sharp = frac_sharp_maximal(u, alpha);
    const int Wmax = std::min(nx, ny);
    for (int W = 2; W <= Wmax; ++W) {
        const auto table = kernels::cube_oscillation_table(u.values, nx, ny, W);
        const auto sup = containing_cube_sup(table, nx, ny, W);
        const double scale = std::pow(W * u.h, -alpha);
        // covering cube: centered, half-width W-1; require it inside the domain
        for (int j = W - 1; j < ny - (W - 1); ++j)
            for (int i = W - 1; i < nx - (W - 1); ++i) {
                const double lhs = sup[size_t(j) * nx + i] * scale;
                const double rhs = rep.constant * sharp[size_t(j) * nx + i];
                if (rhs > 0.0)
                    rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
                else if (lhs > 0.0)
                    rep.worst_ratio = kInf;
            }
    }
    rep.ok = rep.worst_ratio <= 1.0 + 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Calderon
// ---------------------------------------------------------------------------

double calderon_seminorm(const ScalarSamples& u, double alpha, double p) {
    if (!(alpha > 0.0 && p >= 1.0))
        throw std::invalid_argument("calderon_seminorm: alpha > 0, p >= 1");
    const auto m = frac_sharp_maximal(u, alpha);
    double acc = 0.0;
    for (double v : m) acc += std::pow(v, p);
    return std::pow(acc * std::pow(u.h, u.dim()), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Fourier-side reconstruction
// ---------------------------------------------------------------------------

namespace {

using cplx = std::complex<double>;

void fft2(std::vector<cplx>& a, int n, int sign) {
    fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(a.data()),
                                      sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

double freq(int m, int n, double L) {
    const int mm = (m <= n / 2) ? m : m - n;
    return 2.0 * M_PI * mm / L;
}

} // namespace

std::vector<Sym2> periodic_sym_gradient_spectral(const std::vector<Vec2>& u, int n,
                                                 double L) {
    std::vector<cplx> ux(size_t(n) * n), uy(size_t(n) * n);
    for (size_t k = 0; k < u.size(); ++k) { ux[k] = u[k].x; uy[k] = u[k].y; }
    fft2(ux, n, FFTW_FORWARD);
    fft2(uy, n, FFTW_FORWARD);
    std::vector<cplx> exx(size_t(n) * n), eyy(size_t(n) * n), exy(size_t(n) * n);
    const cplx I(0.0, 1.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const size_t k = size_t(j) * n + i;
            const double kx = freq(i, n, L), ky = freq(j, n, L);
            exx[k] = I * kx * ux[k];
            eyy[k] = I * ky * uy[k];
            exy[k] = I * 0.5 * (ky * ux[k] + kx * uy[k]);
        }
    fft2(exx, n, FFTW_BACKWARD);
    fft2(eyy, n, FFTW_BACKWARD);
    fft2(exy, n, FFTW_BACKWARD);
    std::vector<Sym2> out(size_t(n) * n);
    const double norm = 1.0 / (double(n) * n);
    for (size_t k = 0; k < out.size(); ++k)
        out[k] = Sym2(exx[k].real() * norm, eyy[k].real() * norm, exy[k].real() * norm);
    return out;
}

SmithResult smith_reconstruct(const std::vector<Sym2>& eps, int n, double L) {
    if (int(eps.size()) != n * n)
        throw std::invalid_argument("smith_reconstruct: size mismatch");
    std::vector<cplx> exx(size_t(n) * n), eyy(size_t(n) * n), exy(size_t(n) * n);
    for (size_t k = 0; k < eps.size(); ++k) {
        exx[k] = eps[k].xx;
        eyy[k] = eps[k].yy;
        exy[k] = eps[k].xy;
    }
    fft2(exx, n, FFTW_FORWARD);
    fft2(eyy, n, FFTW_FORWARD);
    fft2(exy, n, FFTW_FORWARD);

    std::vector<cplx> ux(size_t(n) * n, 0.0), uy(size_t(n) * n, 0.0);
    const cplx I(0.0, 1.0);
    double res2 = 0.0, in2 = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const size_t k = size_t(j) * n + i;
            const double kx = freq(i, n, L), ky = freq(j, n, L);
            const double k2 = kx * kx + ky * ky;
            in2 += std::norm(exx[k]) + std::norm(eyy[k]) + 2.0 * std::norm(exy[k]);
            if (k2 == 0.0) {
                // mean strain and rigid modes are outside the periodic range
                res2 += std::norm(exx[k]) + std::norm(eyy[k]) + 2.0 * std::norm(exy[k]);
                continue;
            }
            // u_hat = -i (2 E_hat k - k tr E_hat) / |k|^2
            const cplx Ek_x = exx[k] * kx + exy[k] * ky;
            const cplx Ek_y = exy[k] * kx + eyy[k] * ky;
            const cplx tr = exx[k] + eyy[k];
            ux[k] = -I * (2.0 * Ek_x - kx * tr) / k2;
            uy[k] = -I * (2.0 * Ek_y - ky * tr) / k2;
            // spectral eps of the reconstruction vs the input
            const cplx rxx = I * kx * ux[k] - exx[k];
            const cplx ryy = I * ky * uy[k] - eyy[k];
            const cplx rxy = I * 0.5 * (ky * ux[k] + kx * uy[k]) - exy[k];
            res2 += std::norm(rxx) + std::norm(ryy) + 2.0 * std::norm(rxy);
        }

    SmithResult out;
    out.residual_rel = in2 > 0.0 ? std::sqrt(res2 / in2) : 0.0;
    fft2(ux, n, FFTW_BACKWARD);
    fft2(uy, n, FFTW_BACKWARD);
    out.u.resize(size_t(n) * n);
    const double norm = 1.0 / (double(n) * n);
    for (size_t k = 0; k < out.u.size(); ++k)
        out.u[k] = Vec2(ux[k].real() * norm, uy[k].real() * norm);
    return out;
}

// ---------------------------------------------------------------------------
// L^1 Korn failure experiment
// ---------------------------------------------------------------------------

namespace {

struct Dofs {
    std::vector<int> node_to_dof;
    std::vector<int> dof_to_node;
    int n = 0;

    explicit Dofs(const GridDomain& g) : node_to_dof(g.num_nodes(), -1) {
        for (int j = 1; j < g.ny() - 1; ++j)
            for (int i = 1; i < g.nx() - 1; ++i) {
                node_to_dof[g.node_index(i, j)] = n;
                dof_to_node.push_back(g.node_index(i, j));
                n += 2;
            }
    }
};

// z per cell: (eps11, eps22, eps12)
void apply_E(const GridDomain& g, const Dofs& d, const std::vector<double>& u,
             std::vector<double>& z) {
    const double inv2h = 1.0 / (2.0 * g.h());
    const int cx = g.cells_x();
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < cx; ++i) {
            double e11 = 0.0, e22 = 0.0, e12 = 0.0;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int dof = d.node_to_dof[g.node_index(i + di, j + dj)];
                    if (dof < 0) continue;
                    const double sx = (di == 1 ? inv2h : -inv2h);
                    const double sy = (dj == 1 ? inv2h : -inv2h);
                    e11 += sx * u[dof];
                    e22 += sy * u[dof + 1];
                    e12 += 0.5 * (sy * u[dof] + sx * u[dof + 1]);
                }
            const int c = j * cx + i;
            z[3 * c] = e11;
            z[3 * c + 1] = e22;
            z[3 * c + 2] = e12;
        }
}

void apply_Et(const GridDomain& g, const Dofs& d, const std::vector<double>& y,
              std::vector<double>& out) {
    const double inv2h = 1.0 / (2.0 * g.h());
    const int cx = g.cells_x(), cy = g.cells_y();
    const int ndof = d.n;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int k = 0; k < ndof / 2; ++k) {
        const int node = d.dof_to_node[k];
        const int ni = node % g.nx();
        const int nj = node / g.nx();
        double ax = 0.0, ay = 0.0;
        for (int dj = -1; dj <= 0; ++dj)
            for (int di = -1; di <= 0; ++di) {
                const int ci = ni + di, cj = nj + dj;
                if (ci < 0 || cj < 0 || ci >= cx || cj >= cy) continue;
                const int c = cj * cx + ci;
                const double sx = (di == -1 ? inv2h : -inv2h); // corner role inside the cell
                const double sy = (dj == -1 ? inv2h : -inv2h);
                ax += sx * y[3 * c] + 0.5 * sy * y[3 * c + 2];
                ay += sy * y[3 * c + 1] + 0.5 * sx * y[3 * c + 2];
            }
        out[2 * k] = ax;
        out[2 * k + 1] = ay;
    }
}

// Projection onto { z : sum w_m |z_m| <= 1 } by bisection on the shrinkage
// parameter.
void project_weighted_l1(std::vector<double>& z, const std::vector<double>& w) {
    double mass = 0.0;
    for (size_t m = 0; m < z.size(); ++m) mass += w[m] * std::abs(z[m]);
    if (mass <= 1.0) return;
    double lo = 0.0, hi = 0.0;
    for (size_t m = 0; m < z.size(); ++m) hi = std::max(hi, std::abs(z[m]) / w[m]);
    for (int it = 0; it < 100; ++it) {
        const double lam = 0.5 * (lo + hi);
        double s = 0.0;
        for (size_t m = 0; m < z.size(); ++m)
            s += w[m] * std::max(std::abs(z[m]) - lam * w[m], 0.0);
        if (s > 1.0) lo = lam; else hi = lam;
        if (hi - lo <= 1e-15 * (1.0 + hi)) break;
    }
    const double lam = 0.5 * (lo + hi);
    for (size_t m = 0; m < z.size(); ++m) {
        const double v = std::max(std::abs(z[m]) - lam * w[m], 0.0);
        z[m] = z[m] < 0.0 ? -v : v;
    }
}

std::vector<double> objective_from_signs(const GridDomain& g, const Dofs& d,
                                         const std::vector<Mat2>& W) {
    const double inv2h = 1.0 / (2.0 * g.h());
    const double h2 = g.h() * g.h();
    std::vector<double> b(d.n, 0.0);
    const int cx = g.cells_x();
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < cx; ++i) {
            const Mat2& m = W[j * cx + i];
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int dof = d.node_to_dof[g.node_index(i + di, j + dj)];
                    if (dof < 0) continue;
                    const double sx = (di == 1 ? inv2h : -inv2h);
                    const double sy = (dj == 1 ? inv2h : -inv2h);
                    b[dof] += (m.a11 * sx + m.a12 * sy) * h2;
                    b[dof + 1] += (m.a21 * sx + m.a22 * sy) * h2;
                }
        }
    return b;
}

double operator_norm_E(const GridDomain& g, const Dofs& d) {
    std::vector<double> u(d.n, 1.0), z(size_t(3) * g.num_cells()), v(d.n);
    double nrm = 1.0;
    for (int it = 0; it < 30; ++it) {
        apply_E(g, d, u, z);
        apply_Et(g, d, z, v);
        nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 1.0;
        for (size_t k = 0; k < u.size(); ++k) u[k] = v[k] / nrm;
    }
    return std::sqrt(nrm);
}

VectorField dofs_to_field(const GridDomain& g, const Dofs& d, const std::vector<double>& u) {
    VectorField out(g);
    for (size_t k = 0; k < d.dof_to_node.size(); ++k)
        out.data()[d.dof_to_node[k]] = Vec2(u[2 * k], u[2 * k + 1]);
    return out;
}

double gradient_l1_mass(const VectorField& u) {
    const TensorField Du = full_gradient(u);
    const GridDomain& g = u.grid();
    double s = 0.0;
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) s += Du.at(i, j).norm_entry1();
    return s * g.h() * g.h();
}

double eps_l1_entry_mass(const VectorField& u) {
    const SymTensorField e = sym_gradient(u);
    double s = 0.0;
    for (const Sym2& m : e.data()) s += m.norm_entry1();
    return s * u.grid().h() * u.grid().h();
}

std::vector<Mat2> signs_of_gradient(const VectorField& u) {
    const TensorField Du = full_gradient(u);
    const GridDomain& g = u.grid();
    std::vector<Mat2> out(g.num_cells());
    auto sgn = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            const Mat2& m = Du.at(i, j);
            out[g.cell_index(i, j)] = {sgn(m.a11), sgn(m.a12), sgn(m.a21), sgn(m.a22)};
        }
    return out;
}

} // namespace

double ornstein_inner_pdhg(const GridDomain& g, const std::vector<Mat2>& W, int iters,
                           VectorField* out) {
    const Dofs d(g);
    const int nz = 3 * g.num_cells();
    const double h2 = g.h() * g.h();
    std::vector<double> wts(nz);
    for (int c = 0; c < g.num_cells(); ++c) {
        wts[3 * c] = h2;
        wts[3 * c + 1] = h2;
        wts[3 * c + 2] = 2.0 * h2;
    }
    const std::vector<double> b = objective_from_signs(g, d, W);
    const double Lop = operator_norm_E(g, d) * 1.02;
    const double tau = 0.95 / Lop, sigma = 0.95 / Lop;

    std::vector<double> u(d.n, 0.0), ubar(d.n, 0.0), uprev(d.n), y(nz, 0.0);
    std::vector<double> z(nz), Et(d.n), prox(nz);
    double best = 0.0;
    VectorField best_field(g);
    for (int it = 0; it < iters; ++it) {
        // dual: y <- y + sigma E ubar - sigma Proj((y + sigma E ubar)/sigma)
        apply_E(g, d, ubar, z);
        for (int m = 0; m < nz; ++m) z[m] = y[m] + sigma * z[m];
        prox = z;
        for (int m = 0; m < nz; ++m) prox[m] /= sigma;
        project_weighted_l1(prox, wts);
        for (int m = 0; m < nz; ++m) y[m] = z[m] - sigma * prox[m];
        // primal
        uprev = u;
        apply_Et(g, d, y, Et);
        for (int k = 0; k < d.n; ++k) u[k] += tau * (b[k] - Et[k]);
        for (int k = 0; k < d.n; ++k) ubar[k] = 2.0 * u[k] - uprev[k];
        if ((it + 1) % 100 == 0 || it + 1 == iters) {
            VectorField cand = dofs_to_field(g, d, u);
            const double mass = eps_l1_entry_mass(cand);
            if (mass > 0.0) {
                const double inv = 1.0 / mass;
                for (Vec2& v : cand.data()) v = v * inv;
                // objective of the linearized problem at the feasible point
                double obj = 0.0;
                for (int k = 0; k < d.n; ++k) obj += b[k] * u[k];
                obj *= inv;
                if (obj > best) {
                    best = obj;
                    best_field = cand;
                }
            }
        }
    }
    if (out) *out = best_field;
    return best;
}

double ornstein_inner_lp_simplex(const GridDomain& g, const std::vector<Mat2>& W) {
    const Dofs d(g);
    const int C = g.num_cells();
    const double h2 = g.h() * g.h();
    const double inv2h = 1.0 / (2.0 * g.h());

    LinearProgram lp;
    lp.n = d.n + 3 * C;
    lp.c.assign(lp.n, 0.0);
    lp.nonneg.assign(lp.n, 0);
    const std::vector<double> b = objective_from_signs(g, d, W);
    for (int k = 0; k < d.n; ++k) lp.c[k] = b[k];
    for (int m = 0; m < 3 * C; ++m) lp.nonneg[d.n + m] = 1;

    const int cx = g.cells_x();
    // rows of E per cell in sparse form
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < cx; ++i) {
            const int c = j * cx + i;
            std::array<std::vector<std::pair<int, double>>, 3> rows;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int dof = d.node_to_dof[g.node_index(i + di, j + dj)];
                    if (dof < 0) continue;
                    const double sx = (di == 1 ? inv2h : -inv2h);
                    const double sy = (dj == 1 ? inv2h : -inv2h);
                    rows[0].push_back({dof, sx});
                    rows[1].push_back({dof + 1, sy});
                    rows[2].push_back({dof, 0.5 * sy});
                    rows[2].push_back({dof + 1, 0.5 * sx});
                }
            for (int r = 0; r < 3; ++r) {
                LinearProgram::Row pos, neg;
                pos.terms = rows[r];
                pos.terms.push_back({d.n + 3 * c + r, -1.0});
                pos.rhs = 0.0;
                neg.terms = rows[r];
                for (auto& t : neg.terms) t.second = -t.second;
                neg.terms.push_back({d.n + 3 * c + r, -1.0});
                neg.rhs = 0.0;
                lp.rows.push_back(std::move(pos));
                lp.rows.push_back(std::move(neg));
            }
        }
    LinearProgram::Row budget;
    for (int c = 0; c < C; ++c) {
        budget.terms.push_back({d.n + 3 * c, h2});
        budget.terms.push_back({d.n + 3 * c + 1, h2});
        budget.terms.push_back({d.n + 3 * c + 2, 2.0 * h2});
    }
    budget.rhs = 1.0;
    lp.rows.push_back(std::move(budget));

    const LPResult res = solve_lp(lp);
    if (!res.optimal) throw std::runtime_error("ornstein_inner_lp_simplex: LP failed");
    return res.value;
}

OrnsteinResult ornstein_experiment(const GridDomain& g, const VectorField* seed,
                                   const OrnsteinOptions& opts) {
    if (g.nx() < 8 || g.ny() < 8)
        throw std::invalid_argument("ornstein_experiment: grid of at least 8x8 required");
    VectorField u0(g);
    if (seed) {
        u0 = *seed;
    } else {
        const double L = (g.nx() - 1) * g.h();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                const double bump =
                    std::sin(M_PI * p.x / L) * std::sin(M_PI * p.y / L);
                u0.at(i, j) = Vec2(-(p.y - 0.5 * L), p.x - 0.5 * L) * bump;
            }
    }
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.is_boundary(i, j)) u0.at(i, j) = Vec2();

    OrnsteinResult res(g);
    {
        const double mass = eps_l1_entry_mass(u0);
        if (mass > 0.0)
            for (Vec2& v : u0.data()) v = v * (1.0 / mass);
        res.maximizer = u0;
        res.ratio = gradient_l1_mass(u0);
    }

    for (int round = 0; round < opts.max_outer; ++round) {
        const std::vector<Mat2> W = signs_of_gradient(res.maximizer);
        VectorField cand(g);
        ornstein_inner_pdhg(g, W, opts.pdhg_iters, &cand);
        const double mass = eps_l1_entry_mass(cand);
        if (mass <= 0.0) break;
        const double ratio = gradient_l1_mass(cand); // cand is already rescaled
        res.outer_rounds = round + 1;
        if (ratio > res.ratio) {
            const double gain = ratio - res.ratio;
            res.ratio = ratio;
            res.maximizer = cand;
            if (gain < opts.outer_tol * std::max(1.0, res.ratio)) break;
        } else {
            break;
        }
    }
    return res;
}

namespace {
VectorField prolongate(const VectorField& coarse, const GridDomain& fine) {
    const GridDomain& gc = coarse.grid();
    VectorField out(fine);
    const double Lx = (gc.nx() - 1) * gc.h();
    const double Ly = (gc.ny() - 1) * gc.h();
    for (int j = 0; j < fine.ny(); ++j)
        for (int i = 0; i < fine.nx(); ++i) {
            const Vec2 p = fine.node_pos(i, j);
            const double fx = std::clamp(p.x / Lx, 0.0, 1.0) * (gc.nx() - 1);
            const double fy = std::clamp(p.y / Ly, 0.0, 1.0) * (gc.ny() - 1);
            const int a = std::min(int(fx), gc.nx() - 2);
            const int b = std::min(int(fy), gc.ny() - 2);
            const double tx = fx - a, ty = fy - b;
            out.at(i, j) = coarse.at(a, b) * ((1 - tx) * (1 - ty)) +
                           coarse.at(a + 1, b) * (tx * (1 - ty)) +
                           coarse.at(a, b + 1) * ((1 - tx) * ty) +
                           coarse.at(a + 1, b + 1) * (tx * ty);
        }
    return out;
}
} // namespace

std::vector<OrnsteinResult> ornstein_ladder(const std::vector<int>& sizes,
                                            const OrnsteinOptions& opts) {
    std::vector<OrnsteinResult> out;
    for (size_t k = 0; k < sizes.size(); ++k) {
        const int n = sizes[k];
        const GridDomain g(n, n, 1.0 / (n - 1));
        if (out.empty()) {
            out.push_back(ornstein_experiment(g, nullptr, opts));
        } else {
            const VectorField seed = prolongate(out.back().maximizer, g);
            out.push_back(ornstein_experiment(g, &seed, opts));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted difference-quotient energies
// ---------------------------------------------------------------------------

double weighted_dq_energy(const VectorField& v, const Integrand& /*f*/, double mu,
                          double alpha, int steps, int axis,
                          const std::vector<double>& rho_cells, double beta) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("weighted_dq_energy: alpha in (1,2)");
    const GridDomain& g = v.grid();
    const SymTensorField eps = sym_gradient(v);
    if (!rho_cells.empty() && int(rho_cells.size()) != g.num_cells())
        throw std::invalid_argument("weighted_dq_energy: cutoff size mismatch");
    const double hshift = steps * g.h();
    const double wexp = -0.5 * (mu + 2.0 * (1.0 - alpha));
    const int cx = g.cells_x(), cy = g.cells_y();
    const int lim_x = cx - (axis == 0 ? steps : 0);
    const int lim_y = cy - (axis == 1 ? steps : 0);
    double acc = 0.0;
    for (int j = 0; j < lim_y; ++j)
        for (int i = 0; i < lim_x; ++i) {
            const int i2 = i + (axis == 0 ? steps : 0);
            const int j2 = j + (axis == 1 ? steps : 0);
            const Sym2& e0 = eps.at(i, j);
            const Sym2& e1 = eps.at(i2, j2);
            const Sym2 dv = v_alpha(e1, alpha) - v_alpha(e0, alpha);
            const double omega =
                std::pow(1.0 + e0.inner(e0) + e1.inner(e1), wexp);
            const double rho = rho_cells.empty() ? 1.0 : rho_cells[g.cell_index(i, j)];
            acc += rho * rho * dv.inner(dv) / std::pow(hshift, beta) * omega;
        }
    return acc * g.h() * g.h();
}

double second_order_energy(const VectorField& v, double mu, int steps, int axis,
                           const std::vector<double>& rho_cells) {
    const GridDomain& g = v.grid();
    const SymTensorField eps = sym_gradient(v);
    if (!rho_cells.empty() && int(rho_cells.size()) != g.num_cells())
        throw std::invalid_argument("second_order_energy: cutoff size mismatch");
    const double hshift = steps * g.h();
    const int cx = g.cells_x(), cy = g.cells_y();
    const int lim_x = cx - (axis == 0 ? steps : 0);
    const int lim_y = cy - (axis == 1 ? steps : 0);
    double acc = 0.0;
    for (int j = 0; j < lim_y; ++j)
        for (int i = 0; i < lim_x; ++i) {
            const int i2 = i + (axis == 0 ? steps : 0);
            const int j2 = j + (axis == 1 ? steps : 0);
            const Sym2& e0 = eps.at(i, j);
            const Sym2& e1 = eps.at(i2, j2);
            const Sym2 dq = (e1 - e0) * (1.0 / hshift);
            const double w = std::pow(1.0 + e0.inner(e0) + e1.inner(e1), -0.5 * mu);
            const double rho = rho_cells.empty() ? 1.0 : rho_cells[g.cell_index(i, j)];
            acc += rho * rho * dq.inner(dq) * w;
        }
    return acc * g.h() * g.h();
}

ExponentReport exponent_report(int n, double mu) {
    if (n < 2) throw std::invalid_argument("exponent_report: n >= 2");
    ExponentReport r;
    r.n = n;
    r.mu = mu;
    r.q_max = (2.0 - mu) * 2.0 * n / (2.0 * n - 1.0);
    r.thr_all_minimizers = (n + 1.0) / n;
    r.thr_bmo_hypothesis = 1.0 + 3.0 / (2.0 * n);
    r.thr_second_order = 4.0 * n / (4.0 * n - 1.0);
    r.thr_second_order_bmo = 2.0 * n / (2.0 * n - 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// BD cap BMO embedding experiment
// ---------------------------------------------------------------------------

double bd_bmo_epsilon_cap(int n, double p) {
    return std::min((n - 1.0) * (1.0 - 1.0 / p) / (1.0 + p * n - p), 1.0 / p);
}

BdBmoReport bd_bmo_embedding_experiment(const VectorField& u, double p, double eps) {
    const double cap = bd_bmo_epsilon_cap(2, p);
    if (eps < 0.0 || eps >= 1.0 / p)
        throw std::invalid_argument("bd_bmo_embedding_experiment: eps out of range");
    BdBmoReport rep;
    rep.admissible = eps > 0.0 && eps < cap;
    rep.s = 1.0 / p - eps;
    const SymTensorField e = sym_gradient(u);
    rep.tv = l1_norm_cells(e);
    rep.bmo = bmo_norm(u);
    rep.gagliardo_s = gagliardo(u, rep.s, p);
    const double denom = rep.tv + rep.bmo;
    rep.ratio = denom > 0.0 ? rep.gagliardo_s / denom : 0.0;
    return rep;
}

BdBmoReport bd_bmo_embedding_experiment_1d(const ScalarSamples& u, double p, double eps) {
    const double cap = bd_bmo_epsilon_cap(2, p);
    if (eps < 0.0 || eps >= 1.0 / p)
        throw std::invalid_argument("bd_bmo_embedding_experiment_1d: eps out of range");
    BdBmoReport rep;
    rep.admissible = eps > 0.0 && eps < cap;
    rep.s = 1.0 / p - eps;
    double tv = 0.0;
    for (int i = 0; i + 1 < u.nx; ++i) tv += std::abs(u.at(i + 1) - u.at(i));
    rep.tv = tv;
    rep.bmo = bmo_norm(u);
    rep.gagliardo_s = gagliardo(u, rep.s, p);
    const double denom = rep.tv + rep.bmo;
    rep.ratio = denom > 0.0 ? rep.gagliardo_s / denom : 0.0;
    return rep;
}

ScalarSamples make_bbm_ramp(int k, int nx) {
    ScalarSamples u(nx, 1, 2.0 / (nx - 1));
    for (int i = 0; i < nx; ++i) {
        const double x = -1.0 + 2.0 * i / (nx - 1);
        u.at(i) = std::clamp(2.0 * k * x, -1.0, 1.0);
    }
    return u;
}

} // namespace bdvarmin
