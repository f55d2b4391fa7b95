#pragma once

#include <string>

#include "arti/fields.hpp"
#include "arti/tet_grid.hpp"
#include "arti/triplane.hpp"

namespace arti {

/// Binary snapshots, little-endian, deterministic: plane contents and
/// decoder parameters as shape-prefixed float32 arrays, template geometry
/// and scalars as float64. Save/load round-trips are bit-exact.
void save_fieldset(const FieldSet& fields, const std::string& path);
FieldSet load_fieldset(const std::string& path);

void save_triplane(const TriPlane& plane, const std::string& path);
TriPlane load_triplane(const std::string& path);

void save_grid_sdf(const GridSDF& sdf, const std::string& path);
GridSDF load_grid_sdf(const std::string& path);

} // namespace arti
