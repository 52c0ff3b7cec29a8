#include "spinscape/homology.hpp"

#include <stdexcept>

namespace spinscape {

CellCounts cell_counts(const Triangulation& t) {
  CellCounts c;
  c.vertices = compute_vertex_classes(t).count;
  c.edges = compute_edge_classes(t).size();
  c.faces = t.pairings.size();
  c.tets = std::size_t(t.n_tets);
  return c;
}

GF2Matrix boundary_matrix(const Triangulation& t, int k) {
  auto classes = compute_edge_classes(t);
  auto lookup = edge_class_lookup(t, classes);

  if (k == 3) {
    // Tetrahedron boundary: its four faces, each identified to a pairing.
    TriIndex idx(t);
    GF2Matrix m(t.pairings.size(), std::size_t(t.n_tets));
    for (int tet = 0; tet < t.n_tets; ++tet)
      for (int f = 0; f < 4; ++f) m.flip(idx.at(tet, f).pairing, tet);
    return m;
  }
  if (k == 2) {
    // Face boundary: the three edges of the source face, as edge classes.
    GF2Matrix m(classes.size(), t.pairings.size());
    for (std::size_t i = 0; i < t.pairings.size(); ++i) {
      const auto& p = t.pairings[i];
      auto fv = face_vertices(p.src_face);
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          m.flip(lookup[p.src_tet * 6 + edge_slot(fv[a], fv[b])], i);
    }
    return m;
  }
  if (k == 1) {
    // Edge boundary: the two endpoint vertex classes of the reference entry.
    auto vc = compute_vertex_classes(t);
    GF2Matrix m(vc.count, classes.size());
    for (const auto& c : classes) {
      const auto& r = c.fiber[c.ref];
      m.flip(vc.class_of[r.tet * 4 + r.a], c.id);
      m.flip(vc.class_of[r.tet * 4 + r.b], c.id);
    }
    return m;
  }
  throw std::invalid_argument("boundary_matrix: k must be 1, 2, or 3");
}

std::size_t homology_rank(const Triangulation& t, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("homology_rank: k must be 0, 1, or 2");
  auto counts = cell_counts(t);
  std::size_t dim_k = k == 0 ? counts.vertices : (k == 1 ? counts.edges : counts.faces);
  std::size_t rank_dk = k == 0 ? 0 : gf2_rank(boundary_matrix(t, k));
  std::size_t rank_dk1 = gf2_rank(boundary_matrix(t, k + 1));
  return dim_k - rank_dk - rank_dk1;
}

}  // namespace spinscape
