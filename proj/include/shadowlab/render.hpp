#pragma once

#include "shadowlab/scene.hpp"

#include <optional>
#include <string>

namespace shadowlab {

struct Projection {
  int first = 0;
  int second = 1;
};

/// "i,j" with distinct coordinate indices below `dim`.
Projection parse_projection(const std::string& spec, int dim);

struct RenderOptions {
  Projection projection;
  std::optional<Vec> witness;  // direction of a line (or ray) through the query point
  int size_px = 640;
};

/// SVG 1.1 document. Planar scenes are drawn exactly; otherwise the orthographic
/// projection onto the chosen coordinate plane is drawn and annotated as such.
std::string render_svg(const Scene& scene, const RenderOptions& options = {});

}  // namespace shadowlab
