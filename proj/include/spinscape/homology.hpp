#pragma once

#include "spinscape/gf2.hpp"
#include "spinscape/tri.hpp"

namespace spinscape {

// Cells are identification classes: C0 = vertex classes, C1 = edge classes,
// C2 = face classes (one per pairing), C3 = tetrahedra. Incidence is counted
// with multiplicity mod 2.
struct CellCounts {
  std::size_t vertices = 0, edges = 0, faces = 0, tets = 0;
};
CellCounts cell_counts(const Triangulation& t);

// Boundary map from k-cells to (k-1)-cells, k in {1,2,3}.
GF2Matrix boundary_matrix(const Triangulation& t, int k);

// Rank of H_k(T; Z/2), k in {0,1,2}.
std::size_t homology_rank(const Triangulation& t, int k);

}  // namespace spinscape
