#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinscape/perm.hpp"

namespace spinscape {

// Error with a 1-based input line number (0 when not tied to a line).
struct TriError : std::runtime_error {
  int line;
  TriError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

// Face i of a tetrahedron is opposite vertex i; its vertices are the other
// three labels in increasing order.
std::array<int, 3> face_vertices(int face);

// Rank of vertex v inside face_vertices(face); v must lie on the face.
int face_vertex_rank(int face, int v);

// A gluing of face src_face of tetrahedron src_tet to face dst_face of
// dst_tet. vertex_map[k] is the image of the k-th (increasing-order) vertex
// of the source face.
struct FacePairing {
  int src_tet = 0, src_face = 0;
  int dst_tet = 0, dst_face = 0;
  std::array<int, 3> vertex_map{0, 0, 0};

  bool operator==(const FacePairing& o) const = default;
};

// Image of a source-face vertex under the pairing.
int pairing_apply(const FacePairing& p, int v);
// Preimage of a target-face vertex.
int pairing_apply_inverse(const FacePairing& p, int v);
// The same gluing written from the target side.
FacePairing pairing_flipped(const FacePairing& p);
// Extension of vertex_map to the whole tetrahedron, sending src_face to
// dst_face. The pairing is admissible iff this permutation is odd.
Perm4 pairing_tet_perm(const FacePairing& p);

struct Triangulation {
  int n_tets = 0;
  std::vector<FacePairing> pairings;
};

// Germs are numbered tet*4 + face.
inline int germ_id(int tet, int face) { return tet * 4 + face; }

// Locates the unique pairing holding each germ. side 0 means the germ is the
// pairing's source, 1 the target.
struct TriIndex {
  struct Ref {
    int pairing = -1;
    int side = 0;
  };
  std::vector<Ref> by_germ;

  explicit TriIndex(const Triangulation& t);
  const Ref& at(int tet, int face) const { return by_germ[germ_id(tet, face)]; }
};

// Full invariant audit; the report is empty iff the triangulation is valid.
std::vector<std::string> validate(const Triangulation& t);

// Parses the text format. Throws TriError on syntax errors or invariant
// violations; the returned triangulation always validates cleanly.
Triangulation parse_triangulation(const std::string& text);

// JSON mirror of the same data.
Triangulation parse_triangulation_json(const std::string& text);
std::string serialize_triangulation_json(const Triangulation& t);

// Canonical text form: pairings sorted by source germ, each written with its
// lesser germ as the source.
std::string serialize_triangulation(const Triangulation& t);
Triangulation canonical_form(const Triangulation& t);

// Loads a file, dispatching on the .json extension.
Triangulation load_triangulation(const std::string& path);

// Abstract (unordered) edges of one tetrahedron, numbered 0..5 in the pair
// order 01,02,03,12,13,23.
int edge_slot(int a, int b);
std::array<int, 2> edge_slot_vertices(int slot);

// One identified class of abstract edges. Each unordered abstract edge of the
// triangulation appears in exactly one fiber entry; sign is +1 when the entry's
// low-to-high orientation agrees with the class reference orientation.
struct EdgeClass {
  int id = 0;
  struct Entry {
    int tet = 0;
    int a = 0, b = 0;  // a < b
    int sign = +1;
  };
  std::vector<Entry> fiber;
  int ref = 0;  // index into fiber of the reference entry (always sign +1)
};

std::vector<EdgeClass> compute_edge_classes(const Triangulation& t);

// Map from edge slot (tet*6 + slot) to the id of its EdgeClass.
std::vector<int> edge_class_lookup(const Triangulation& t, const std::vector<EdgeClass>& classes);

// Identification classes of the 4n tetrahedron vertices.
struct VertexClasses {
  std::vector<int> class_of;  // size 4n, indexed by tet*4 + vertex
  int count = 0;
};
VertexClasses compute_vertex_classes(const Triangulation& t);

// The 4-valent gluing graph: one vertex per tetrahedron, one edge per pairing.
struct GluingGraph {
  int n_vertices = 0;
  struct Edge {
    int id = 0;
    int u = 0, v = 0;  // u = source tet, v = target tet
  };
  std::vector<Edge> edges;

  int degree(int vertex) const;
  bool connected() const;
};
GluingGraph gluing_graph(const Triangulation& t);

}  // namespace spinscape
