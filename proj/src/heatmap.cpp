#include "relplane/heatmap.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "relplane/errors.hpp"

namespace relplane {

HeatmapGrid heatmap_from_cells(const Tensor& cells, int extent,
                               const std::vector<std::string>& headers) {
  if (cells.rows != extent * extent)
    throw ValidationError("heatmap: cell count does not match extent");
  if (static_cast<int>(headers.size()) != extent)
    throw ValidationError("heatmap: header count does not match extent");
  HeatmapGrid grid;
  grid.extent = extent;
  grid.headers = headers;
  grid.intensity = Tensor(extent, extent);
  for (int i = 0; i < extent; ++i)
    for (int j = 0; j < extent; ++j) {
      const double* row = cells.row(i * extent + j);
      double acc = 0.0;
      for (int c = 0; c < cells.cols; ++c) acc += std::abs(row[c]);
      grid.intensity.at(i, j) = acc / cells.cols;
    }
  return grid;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string heatmap_csv(const HeatmapGrid& grid) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  for (int j = 0; j < grid.extent; ++j) os << "," << csv_quote(grid.headers[j]);
  os << "\n";
  for (int i = 0; i < grid.extent; ++i) {
    os << csv_quote(grid.headers[i]);
    for (int j = 0; j < grid.extent; ++j) os << "," << grid.intensity.at(i, j);
    os << "\n";
  }
  return os.str();
}

void write_heatmap_pgm(const HeatmapGrid& grid, const std::string& path,
                       int cell_pixels) {
  double peak = 0.0;
  for (double x : grid.intensity.v) peak = std::max(peak, x);
  if (peak == 0.0) peak = 1.0;
  int side = grid.extent * cell_pixels;
  std::ostringstream os;
  os << "P2\n" << side << " " << side << "\n255\n";
  for (int py = 0; py < side; ++py) {
    for (int px = 0; px < side; ++px) {
      int i = py / cell_pixels, j = px / cell_pixels;
      int v = static_cast<int>(std::lround(255.0 * grid.intensity.at(i, j) / peak));
      os << v << (px + 1 == side ? "" : " ");
    }
    os << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("heatmap: cannot write '" + path + "'");
  f << os.str();
}

}  // namespace relplane
