#ifndef RELPLANE_HEATMAP_HPP_
#define RELPLANE_HEATMAP_HPP_

#include <string>
#include <vector>

#include "relplane/tensor.hpp"

namespace relplane {

// Per-cell scalar view of a plane tensor: the mean of absolute channel
// values at each cell.
struct HeatmapGrid {
  int extent = 0;
  std::vector<std::string> headers;  // one label per row/column
  Tensor intensity;                  // extent x extent
};

HeatmapGrid heatmap_from_cells(const Tensor& cells, int extent,
                               const std::vector<std::string>& headers);

// Comma-separated grid with header row and row labels; byte-stable.
std::string heatmap_csv(const HeatmapGrid& grid);

// Grayscale PGM raster, nearest-neighbor upscaled, intensities
// normalized to the grid maximum.
void write_heatmap_pgm(const HeatmapGrid& grid, const std::string& path,
                       int cell_pixels = 16);

}  // namespace relplane

#endif  // RELPLANE_HEATMAP_HPP_
