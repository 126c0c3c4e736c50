#ifndef BDVARMIN_GRID_HPP
#define BDVARMIN_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bdvarmin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm1() const { return std::abs(x) + std::abs(y); }
};

/// Symmetric 2x2 matrix stored as (xx, yy, xy).
struct Sym2 {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;

    Sym2() = default;
    Sym2(double a, double b, double c) : xx(a), yy(b), xy(c) {}

    Sym2 operator+(const Sym2& o) const { return {xx + o.xx, yy + o.yy, xy + o.xy}; }
    Sym2 operator-(const Sym2& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
    Sym2 operator*(double c) const { return {c * xx, c * yy, c * xy}; }
    Sym2& operator+=(const Sym2& o) { xx += o.xx; yy += o.yy; xy += o.xy; return *this; }

    // Frobenius inner product; the off-diagonal entry appears twice.
    double inner(const Sym2& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }
    double norm() const { return std::sqrt(inner(*this)); }
    // Entrywise l1 norm of the full matrix, |xy| counted twice.
    double norm_entry1() const { return std::abs(xx) + std::abs(yy) + 2.0 * std::abs(xy); }

    Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

/// Symmetric dyadic product u (.) v = (u v^T + v u^T)/2.
inline Sym2 sym_dyad(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.y * v.y, 0.5 * (u.x * v.y + u.y * v.x)};
}

struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    Sym2 sym() const { return {a11, a22, 0.5 * (a12 + a21)}; }
    double norm() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }
    double norm_entry1() const { return std::abs(a11) + std::abs(a12) + std::abs(a21) + std::abs(a22); }
};

/// Uniform nx-by-ny node lattice with spacing h. Nodes on the lattice
/// boundary of the rectangle carry Dirichlet data; the rest are interior.
class GridDomain {
public:
    GridDomain(int nx, int ny, double h) : nx_(nx), ny_(ny), h_(h) {
        if (nx < 2 || ny < 2) throw std::invalid_argument("GridDomain: need at least 2x2 nodes");
        if (!(h > 0.0)) throw std::invalid_argument("GridDomain: spacing must be positive");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }

    int num_nodes() const { return nx_ * ny_; }
    int cells_x() const { return nx_ - 1; }
    int cells_y() const { return ny_ - 1; }
    int num_cells() const { return cells_x() * cells_y(); }

    int node_index(int i, int j) const { return j * nx_ + i; }
    int cell_index(int i, int j) const { return j * cells_x() + i; }

    bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
    }
    bool is_interior(int i, int j) const { return !is_boundary(i, j); }

    int num_interior() const { return (nx_ - 2) * (ny_ - 2); }

    Vec2 node_pos(int i, int j) const { return {i * h_, j * h_}; }
    Vec2 cell_center(int i, int j) const { return {(i + 0.5) * h_, (j + 0.5) * h_}; }

    /// Cell measure of the rectangle, used by all cell quadratures.
    double cell_area_total() const { return num_cells() * h_ * h_; }
    /// Node-count measure, used by node-based sums (V_alpha bound etc.).
    double node_area_total() const { return num_nodes() * h_ * h_; }

    bool operator==(const GridDomain& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_;
    }

private:
    int nx_;
    int ny_;
    double h_;
};

class VectorField {
public:
    explicit VectorField(const GridDomain& g) : grid_(g), values_(g.num_nodes()) {}

    const GridDomain& grid() const { return grid_; }
    Vec2& at(int i, int j) { return values_[grid_.node_index(i, j)]; }
    const Vec2& at(int i, int j) const { return values_[grid_.node_index(i, j)]; }
    Vec2& operator[](int k) { return values_[k]; }
    const Vec2& operator[](int k) const { return values_[k]; }
    std::vector<Vec2>& data() { return values_; }
    const std::vector<Vec2>& data() const { return values_; }

private:
    GridDomain grid_;
    std::vector<Vec2> values_;
};

class SymTensorField {
public:
    explicit SymTensorField(const GridDomain& g) : grid_(g), values_(g.num_cells()) {}

    const GridDomain& grid() const { return grid_; }
    Sym2& at(int i, int j) { return values_[grid_.cell_index(i, j)]; }
    const Sym2& at(int i, int j) const { return values_[grid_.cell_index(i, j)]; }
    Sym2& operator[](int k) { return values_[k]; }
    const Sym2& operator[](int k) const { return values_[k]; }
    std::vector<Sym2>& data() { return values_; }
    const std::vector<Sym2>& data() const { return values_; }

private:
    GridDomain grid_;
    std::vector<Sym2> values_;
};

class TensorField {
public:
    explicit TensorField(const GridDomain& g) : grid_(g), values_(g.num_cells()) {}

    const GridDomain& grid() const { return grid_; }
    Mat2& at(int i, int j) { return values_[grid_.cell_index(i, j)]; }
    const Mat2& at(int i, int j) const { return values_[grid_.cell_index(i, j)]; }
    Mat2& operator[](int k) { return values_[k]; }
    const Mat2& operator[](int k) const { return values_[k]; }

private:
    GridDomain grid_;
    std::vector<Mat2> values_;
};

/// Forward-difference gradient averaged to the cell center (the gradient of
/// the bilinear interpolant at the midpoint).
TensorField full_gradient(const VectorField& u);

/// Symmetric part of full_gradient; rigid deformations are its kernel.
SymTensorField sym_gradient(const VectorField& u);

/// Negative adjoint of sym_gradient under the h^2-weighted inner products:
///   sum_cells <sigma, eps(phi)> h^2 = -sum_nodes <div sigma, phi> h^2
/// holds exactly for all phi vanishing on boundary nodes (and for all phi at
/// interior nodes; boundary rows carry the one-sided remainder).
VectorField divergence(const SymTensorField& sigma);

enum class DiffVariant { Forward, Backward };

/// tau^{+}_{s,h} u(x) = u(x + m h e_s) - u(x), restricted to the nodes where
/// the shifted point exists; the result lives on a trimmed grid whose node 0
/// corresponds to the original node 0 (forward) or node m (backward).
VectorField translate_diff(const VectorField& u, int axis, int steps,
                           DiffVariant variant = DiffVariant::Forward,
                           bool divide_by_h = false);
SymTensorField translate_diff(const SymTensorField& e, int axis, int steps,
                              DiffVariant variant = DiffVariant::Forward,
                              bool divide_by_h = false);

/// Discrete L^2 / L^1 norms with h^2 node weights.
double l2_norm(const VectorField& u);
double l1_norm_cells(const SymTensorField& e);

} // namespace bdvarmin

#endif
