#include "bdvarmin/grid.hpp"

namespace bdvarmin {

TensorField full_gradient(const VectorField& u) {
    const GridDomain& g = u.grid();
    TensorField out(g);
    const double inv2h = 1.0 / (2.0 * g.h());
    for (int j = 0; j < g.cells_y(); ++j) {
        for (int i = 0; i < g.cells_x(); ++i) {
            const Vec2& u00 = u.at(i, j);
            const Vec2& u10 = u.at(i + 1, j);
            const Vec2& u01 = u.at(i, j + 1);
            const Vec2& u11 = u.at(i + 1, j + 1);
            Mat2 d;
            d.a11 = (u10.x - u00.x + u11.x - u01.x) * inv2h;
            d.a21 = (u10.y - u00.y + u11.y - u01.y) * inv2h;
            d.a12 = (u01.x - u00.x + u11.x - u10.x) * inv2h;
            d.a22 = (u01.y - u00.y + u11.y - u10.y) * inv2h;
            out.at(i, j) = d;
        }
    }
    return out;
}

SymTensorField sym_gradient(const VectorField& u) {
    const GridDomain& g = u.grid();
    SymTensorField out(g);
    const double inv2h = 1.0 / (2.0 * g.h());
    for (int j = 0; j < g.cells_y(); ++j) {
        for (int i = 0; i < g.cells_x(); ++i) {
            const Vec2& u00 = u.at(i, j);
            const Vec2& u10 = u.at(i + 1, j);
            const Vec2& u01 = u.at(i, j + 1);
            const Vec2& u11 = u.at(i + 1, j + 1);
            const double dxux = (u10.x - u00.x + u11.x - u01.x) * inv2h;
            const double dyuy = (u01.y - u00.y + u11.y - u10.y) * inv2h;
            const double dyux = (u01.x - u00.x + u11.x - u10.x) * inv2h;
            const double dxuy = (u10.y - u00.y + u11.y - u01.y) * inv2h;
            out.at(i, j) = Sym2(dxux, dyuy, 0.5 * (dyux + dxuy));
        }
    }
    return out;
}

VectorField divergence(const SymTensorField& sigma) {
    const GridDomain& g = sigma.grid();
    VectorField out(g);
    const double inv2h = 1.0 / (2.0 * g.h());
    // Scatter the transpose of the sym_gradient stencil. Each cell couples to
    // its four corners; corner (di,dj) sees x-difference sign sx = 2*di-1 and
    // y-difference sign sy = 2*dj-1, each with weight 1/(2h).
    for (int j = 0; j < g.cells_y(); ++j) {
        for (int i = 0; i < g.cells_x(); ++i) {
            const Sym2& s = sigma.at(i, j);
            for (int dj = 0; dj <= 1; ++dj) {
                for (int di = 0; di <= 1; ++di) {
                    const double sx = (di == 1 ? 1.0 : -1.0) * inv2h;
                    const double sy = (dj == 1 ? 1.0 : -1.0) * inv2h;
                    // d/du_x(node): eps_xx gets sx, eps_xy gets sy/2 (doubled in inner).
                    // d/du_y(node): eps_yy gets sy, eps_xy gets sx/2.
                    Vec2& v = out.at(i + di, j + dj);
                    v.x -= s.xx * sx + 2.0 * s.xy * (0.5 * sy);
                    v.y -= s.yy * sy + 2.0 * s.xy * (0.5 * sx);
                }
            }
        }
    }
    return out;
}

namespace {

template <typename FieldT>
FieldT translate_impl(const FieldT& f, int axis, int steps, DiffVariant variant,
                      bool divide_by_h, int extent_x, int extent_y) {
    if (axis != 0 && axis != 1) throw std::invalid_argument("translate_diff: axis must be 0 or 1");
    if (steps < 1) throw std::invalid_argument("translate_diff: steps must be >= 1");
    const int ext = (axis == 0) ? extent_x : extent_y;
    if (steps >= ext) throw std::invalid_argument("translate_diff: shift exceeds domain");
    const GridDomain& g = f.grid();

    const int nnx = extent_x - (axis == 0 ? steps : 0);
    const int nny = extent_y - (axis == 1 ? steps : 0);
    // Trimmed grid; +1 converts cell extents back to node counts when needed.
    const bool is_cell_field = (extent_x == g.cells_x());
    const int node_nx = nnx + (is_cell_field ? 1 : 0);
    const int node_ny = nny + (is_cell_field ? 1 : 0);
    if (node_nx < 2 || node_ny < 2) throw std::invalid_argument("translate_diff: shift exceeds domain");
    GridDomain gt(node_nx, node_ny, g.h());
    FieldT out(gt);

    const double scale = divide_by_h ? 1.0 / (steps * g.h()) : 1.0;
    const int sx = (axis == 0) ? steps : 0;
    const int sy = (axis == 1) ? steps : 0;
    for (int j = 0; j < nny; ++j) {
        for (int i = 0; i < nnx; ++i) {
            if (variant == DiffVariant::Forward) {
                out.at(i, j) = (f.at(i + sx, j + sy) - f.at(i, j)) * scale;
            } else {
                // value at x for x = original index (i+sx, j+sy):
                // f(x - h e_s) - f(x)
                out.at(i, j) = (f.at(i, j) - f.at(i + sx, j + sy)) * scale;
            }
        }
    }
    return out;
}

} // namespace

VectorField translate_diff(const VectorField& u, int axis, int steps,
                           DiffVariant variant, bool divide_by_h) {
    return translate_impl(u, axis, steps, variant, divide_by_h,
                          u.grid().nx(), u.grid().ny());
}

SymTensorField translate_diff(const SymTensorField& e, int axis, int steps,
                              DiffVariant variant, bool divide_by_h) {
    return translate_impl(e, axis, steps, variant, divide_by_h,
                          e.grid().cells_x(), e.grid().cells_y());
}

double l2_norm(const VectorField& u) {
    double s = 0.0;
    for (const Vec2& v : u.data()) s += v.dot(v);
    return std::sqrt(s * u.grid().h() * u.grid().h());
}

double l1_norm_cells(const SymTensorField& e) {
    double s = 0.0;
    for (const Sym2& m : e.data()) s += m.norm();
    return s * e.grid().h() * e.grid().h();
}

} // namespace bdvarmin
