#include "bdvarmin/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bdvarmin {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_header(const std::string& base, const GridDomain& g, const std::string& kind) {
    json h;
    h["nx"] = g.nx();
    h["ny"] = g.ny();
    h["h"] = g.h();
    h["kind"] = kind;
    std::ofstream out(base + ".json");
    if (!out) throw std::runtime_error("cannot write " + base + ".json");
    out << h.dump(2) << "\n";
}

GridDomain read_header(const std::string& base, std::string* kind = nullptr) {
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("cannot read " + base + ".json");
    json h;
    in >> h;
    if (kind) *kind = h.value("kind", "");
    return GridDomain(h.at("nx").get<int>(), h.at("ny").get<int>(), h.at("h").get<double>());
}

void expect_kind(const std::string& got, const std::string& want, const std::string& base) {
    if (got != want)
        throw std::runtime_error(base + ": expected kind '" + want + "', found '" + got + "'");
}

} // namespace

void write_vector_field(const std::string& base, const VectorField& u) {
    const GridDomain& g = u.grid();
    write_header(base, g, "vector_node");
    std::ofstream out(base + ".csv");
    if (!out) throw std::runtime_error("cannot write " + base + ".csv");
    out << "x,y,component,value\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.node_pos(i, j);
            out << format_g17(p.x) << ',' << format_g17(p.y) << ",ux,"
                << format_g17(u.at(i, j).x) << '\n';
            out << format_g17(p.x) << ',' << format_g17(p.y) << ",uy,"
                << format_g17(u.at(i, j).y) << '\n';
        }
}

void write_sym_field(const std::string& base, const SymTensorField& e) {
    const GridDomain& g = e.grid();
    write_header(base, g, "sym_cell");
    std::ofstream out(base + ".csv");
    if (!out) throw std::runtime_error("cannot write " + base + ".csv");
    out << "x,y,component,value\n";
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            const Vec2 p = g.cell_center(i, j);
            const Sym2& m = e.at(i, j);
            out << format_g17(p.x) << ',' << format_g17(p.y) << ",exx," << format_g17(m.xx) << '\n';
            out << format_g17(p.x) << ',' << format_g17(p.y) << ",eyy," << format_g17(m.yy) << '\n';
            out << format_g17(p.x) << ',' << format_g17(p.y) << ",exy," << format_g17(m.xy) << '\n';
        }
}

namespace {

struct CsvRow {
    double x, y, value;
    std::string component;
};

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        CsvRow r;
        std::string tok;
        std::getline(ss, tok, ',');
        r.x = std::stod(tok);
        std::getline(ss, tok, ',');
        r.y = std::stod(tok);
        std::getline(ss, r.component, ',');
        std::getline(ss, tok, ',');
        r.value = std::stod(tok);
        rows.push_back(r);
    }
    return rows;
}

int nearest_index(double coord, double h) { return int(coord / h + 0.5); }

} // namespace

VectorField read_vector_field(const std::string& base) {
    std::string kind;
    const GridDomain g = read_header(base, &kind);
    expect_kind(kind, "vector_node", base);
    VectorField u(g);
    for (const CsvRow& r : read_csv(base + ".csv")) {
        const int i = nearest_index(r.x, g.h());
        const int j = nearest_index(r.y, g.h());
        if (i < 0 || j < 0 || i >= g.nx() || j >= g.ny())
            throw std::runtime_error(base + ": node outside grid");
        if (r.component == "ux") u.at(i, j).x = r.value;
        else if (r.component == "uy") u.at(i, j).y = r.value;
        else throw std::runtime_error(base + ": unknown component " + r.component);
    }
    return u;
}

SymTensorField read_sym_field(const std::string& base) {
    std::string kind;
    const GridDomain g = read_header(base, &kind);
    expect_kind(kind, "sym_cell", base);
    SymTensorField e(g);
    for (const CsvRow& r : read_csv(base + ".csv")) {
        const int i = nearest_index(r.x - 0.5 * g.h(), g.h());
        const int j = nearest_index(r.y - 0.5 * g.h(), g.h());
        if (i < 0 || j < 0 || i >= g.cells_x() || j >= g.cells_y())
            throw std::runtime_error(base + ": cell outside grid");
        if (r.component == "exx") e.at(i, j).xx = r.value;
        else if (r.component == "eyy") e.at(i, j).yy = r.value;
        else if (r.component == "exy") e.at(i, j).xy = r.value;
        else throw std::runtime_error(base + ": unknown component " + r.component);
    }
    return e;
}

void write_bd_field(const std::string& base, const DiscreteBDField& u) {
    const GridDomain& g = u.grid;
    json h;
    h["nx"] = g.nx();
    h["ny"] = g.ny();
    h["h"] = g.h();
    h["kind"] = "bd_field";
    h["has_cells"] = !u.cell_values.empty();
    h["has_smooth"] = bool(u.smooth_part);
    {
        std::ofstream out(base + ".json");
        if (!out) throw std::runtime_error("cannot write " + base + ".json");
        out << h.dump(2) << "\n";
    }
    if (!u.cell_values.empty()) {
        std::ofstream out(base + ".cells.csv");
        out << "x,y,component,value\n";
        for (int j = 0; j < g.cells_y(); ++j)
            for (int i = 0; i < g.cells_x(); ++i) {
                const Vec2 p = g.cell_center(i, j);
                const Vec2 v = u.cell_value(i, j);
                out << format_g17(p.x) << ',' << format_g17(p.y) << ",ux," << format_g17(v.x) << '\n';
                out << format_g17(p.x) << ',' << format_g17(p.y) << ",uy," << format_g17(v.y) << '\n';
            }
    }
    if (u.smooth_part) write_vector_field(base + ".smooth", *u.smooth_part);
    {
        // face jump table derived from the cell values
        const SymMeasure m = bd_measure(u);
        std::ofstream out(base + ".jumps.csv");
        out << "x,y,orientation,jxx,jyy,jxy,length\n";
        const int cx = g.cells_x(), cy = g.cells_y();
        for (int j = 0; j < cy; ++j)
            for (int i = 0; i + 1 < cx; ++i) {
                const Sym2& s = m.jumps_x[j * (cx - 1) + i];
                const Vec2 p{(i + 1) * g.h(), (j + 0.5) * g.h()};
                out << format_g17(p.x) << ',' << format_g17(p.y) << ",x,"
                    << format_g17(s.xx) << ',' << format_g17(s.yy) << ','
                    << format_g17(s.xy) << ',' << format_g17(g.h()) << '\n';
            }
        for (int j = 0; j + 1 < cy; ++j)
            for (int i = 0; i < cx; ++i) {
                const Sym2& s = m.jumps_y[j * cx + i];
                const Vec2 p{(i + 0.5) * g.h(), (j + 1) * g.h()};
                out << format_g17(p.x) << ',' << format_g17(p.y) << ",y,"
                    << format_g17(s.xx) << ',' << format_g17(s.yy) << ','
                    << format_g17(s.xy) << ',' << format_g17(g.h()) << '\n';
            }
    }
}

DiscreteBDField read_bd_field(const std::string& base) {
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("cannot read " + base + ".json");
    json h;
    in >> h;
    if (h.value("kind", "") != "bd_field")
        throw std::runtime_error(base + ": not a bd_field");
    GridDomain g(h.at("nx").get<int>(), h.at("ny").get<int>(), h.at("h").get<double>());
    DiscreteBDField u(g);
    if (h.value("has_cells", false)) {
        u.cell_values.assign(g.num_cells(), Vec2());
        for (const CsvRow& r : read_csv(base + ".cells.csv")) {
            const int i = nearest_index(r.x - 0.5 * g.h(), g.h());
            const int j = nearest_index(r.y - 0.5 * g.h(), g.h());
            if (i < 0 || j < 0 || i >= g.cells_x() || j >= g.cells_y())
                throw std::runtime_error(base + ": cell outside grid");
            Vec2& v = u.cell_values[g.cell_index(i, j)];
            if (r.component == "ux") v.x = r.value;
            else if (r.component == "uy") v.y = r.value;
            else throw std::runtime_error(base + ": unknown component " + r.component);
        }
    }
    if (h.value("has_smooth", false)) u.smooth_part = read_vector_field(base + ".smooth");
    return u;
}

} // namespace bdvarmin
