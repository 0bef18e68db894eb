#pragma once

#include <map>
#include <string>
#include <vector>

#include "spherelab/fields.hpp"
#include "spherelab/geomsets.hpp"

namespace spherelab {
struct OperatorOutput;

namespace io {

// Shortest decimal that round-trips to the same double.
std::string shortest(double v);

// Point-set text format: header `# dim=<d> resolution=<h> label=<text>`,
// then one whitespace-separated point per line.
void write_set(const CompactSet& s, const std::string& path);
CompactSet read_set(const std::string& path);

// Grid binary format: magic "SLGF", little-endian u64 dim/n, f64 lo/hi,
// then row-major f64 payload. Plus a CSV export for plotting.
void write_grid(const GridFunction& g, const std::string& path);
GridFunction read_grid(const std::string& path);
void write_grid_csv(const GridFunction& g, const std::string& path);

// Witness sidecar: x-index, u, v, k, value.
void write_witnesses(const OperatorOutput& out, const std::string& path);

// Flat key=value config text; '#' starts a comment.
std::map<std::string, std::string> read_kv(const std::string& path);

std::string sha256_file(const std::string& path);

// Log-log scatter with a fitted line; presentation only.
void write_loglog_svg(const std::vector<std::pair<double, double>>& pts,
                      double slope, double intercept, const std::string& path);

} // namespace io
} // namespace spherelab
