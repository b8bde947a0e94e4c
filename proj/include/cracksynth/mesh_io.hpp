#pragma once

#include <string>
#include <vector>

#include "cracksynth/complex.hpp"
#include "cracksynth/graph_paths.hpp"
#include "cracksynth/minsurf.hpp"

namespace cracksynth {

// OBJ exports for visual inspection. Vertices are written with exact
// round-trip formatting so identical inputs give identical files.

// All arcs of the complex as OBJ line elements.
void export_wireframe_obj(const CellComplex& k, const std::string& path);

// A cycle as one closed OBJ polyline.
void export_cycle_obj(const CellComplex& k, const Cycle& c, const std::string& path);

// Facets as fan-triangulated OBJ faces. `facet_ids` empty means all facets.
void export_facets_obj(const CellComplex& k, const std::vector<int>& facet_ids,
                       const std::string& path);

// A surface's facets (fan triangulation).
void export_surface_obj(const CellComplex& k, const Surface& s, const std::string& path);

}  // namespace cracksynth
