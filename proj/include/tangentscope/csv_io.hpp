#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tangentscope/arc_set.hpp"
#include "tangentscope/grid_function.hpp"

namespace tangentscope::csv {

/// GridFunction CSV: header `theta,value`, theta = 2*pi*k/N.
void write_grid(const std::string& path, const GridFunction& f);
GridFunction read_grid(const std::string& path);

/// Complex GridFunction CSV: header `theta,re,im`.
void write_complex_grid(const std::string& path, const ComplexGridFunction& f);
ComplexGridFunction read_complex_grid(const std::string& path);

/// ArcSet CSV: header `start,end`, one arc per row, radians.
void write_arcs(const std::string& path, const ArcSet& a);
ArcSet read_arcs(const std::string& path);

/// Weighted step function CSV: header `start,end,value`.
struct StepPiece {
    Arc arc;
    double value = 0.0;
};
void write_step(const std::string& path, const std::vector<StepPiece>& pieces);
std::vector<StepPiece> read_step(const std::string& path);

/// Kernel manifest CSV: header `r,path`, GridFunction CSV per row. Returns
/// (eps, grid) pairs; relative paths resolve against the manifest directory.
std::vector<std::pair<double, GridFunction>> read_kernel_manifest(const std::string& path);

std::string format_double(double v);

} // namespace tangentscope::csv
