#pragma once

#include <string>
#include <vector>

#include "icenav/planner.hpp"

namespace icenav {

/// Channel outline, floe polygons, optional planned path with ship
/// footprints, optional occupancy heat layer. Output is deterministic:
/// identical inputs produce identical bytes.
std::string render_field_svg(const IceField& field, const Path* path, const ControlSet* cs,
                             const ShipShape* ship, const OccupancyGrid* overlay);

/// Box plot (min, quartiles, max) per labeled group.
std::string render_boxplot_svg(const std::string& title, const std::string& y_label,
                               const std::vector<std::pair<std::string, std::vector<double>>>& groups);

}  // namespace icenav
