#ifndef BDVARMIN_FIELD_IO_HPP
#define BDVARMIN_FIELD_IO_HPP

#include <string>

#include "bdvarmin/grid.hpp"
#include "bdvarmin/relaxation.hpp"

namespace bdvarmin {

/// %.17g formatting used for every floating value written to disk.
std::string format_g17(double v);

/// Writes <base>.csv with rows x,y,component,value and <base>.json with the
/// grid header {nx, ny, h, kind}.
void write_vector_field(const std::string& base, const VectorField& u);
void write_sym_field(const std::string& base, const SymTensorField& e);

VectorField read_vector_field(const std::string& base);
SymTensorField read_sym_field(const std::string& base);

/// BD fields: <base>.cells.csv (piecewise-constant part), <base>.jumps.csv
/// (per-face jump matrices), <base>.json header; the smooth part, when
/// present, goes to <base>.smooth.csv.
void write_bd_field(const std::string& base, const DiscreteBDField& u);
DiscreteBDField read_bd_field(const std::string& base);

} // namespace bdvarmin

#endif
