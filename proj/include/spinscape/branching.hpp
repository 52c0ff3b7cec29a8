#pragma once

#include <array>
#include <string>
#include <vector>

#include "spinscape/tri.hpp"

namespace spinscape {

// A branching of one tetrahedron: a total order of its vertices where v_j has
// exactly j incoming edges (edges run from lower to higher vertex).
// order[j] is the vertex slot playing v_j. index is +1 iff (v0,v1,v2,v3) is an
// even permutation of the slot labels, i.e. agrees with the orientation.
struct TetBranching {
  std::array<int, 4> order{0, 1, 2, 3};
  int index = +1;

  // role_of()[v] = j such that order[j] == v.
  std::array<int, 4> role_of() const {
    std::array<int, 4> r{};
    for (int j = 0; j < 4; ++j) r[order[j]] = j;
    return r;
  }
  bool operator==(const TetBranching& o) const { return order == o.order; }
};

TetBranching make_branching(const std::array<int, 4>& order);

// All 24 branchings, lexicographic in vertex order.
const std::vector<TetBranching>& enumerate_tet_branchings();

// Whether the germ at the given face points out of the tetrahedron.
// The face opposite v_r carries an outgoing germ iff r is even on a +1
// tetrahedron, and iff r is odd on a -1 tetrahedron.
bool germ_out(const TetBranching& b, int face);
std::array<bool, 4> out_pattern(const TetBranching& b);

// Over germs are the faces opposite v0 and v1 on either index; their two
// strands pass over the under strands at the dual vertex.
std::array<int, 2> over_faces(const TetBranching& b);
std::array<int, 2> under_faces(const TetBranching& b);

// Within a face, vertices are labeled 0,1,2 by their number of incoming edges
// inside the face.
int face_label_of_vertex(const TetBranching& b, int face, int v);
int face_vertex_with_label(const TetBranching& b, int face, int label);

// A 2-in/2-out direction assignment on the gluing graph. dir[i] = 0 means the
// source germ of pairing i is outgoing (flow runs source -> target).
struct PreBranching {
  std::vector<int> dir;
  bool operator==(const PreBranching&) const = default;
};

std::string serialize_pre_branching(const PreBranching& w);
PreBranching parse_pre_branching(const std::string& text);

// Whether the germ (tet, face) is outgoing under w.
bool omega_germ_out(const Triangulation& t, const TriIndex& idx, const PreBranching& w, int tet,
                    int face);

bool pre_branching_valid(const GluingGraph& g, const PreBranching& w);
bool pre_branching_valid(const Triangulation& t, const PreBranching& w);

// Orients an Eulerian circuit of the 4-valent graph; always succeeds on valid
// input and is deterministic.
PreBranching find_pre_branching(const GluingGraph& g);
PreBranching find_pre_branching(const Triangulation& t);

// Exhaustive enumeration, guarded by edge count.
std::vector<PreBranching> enumerate_pre_branchings(const GluingGraph& g, int max_edges = 20);
std::vector<PreBranching> enumerate_pre_branchings(const Triangulation& t, int max_edges = 20);

// The in/out pattern w induces at one tetrahedron, per face slot.
std::array<bool, 4> tet_pattern(const Triangulation& t, const TriIndex& idx, const PreBranching& w,
                                int tet);

// The 4 branchings inducing a given balanced pattern. Throws on patterns
// without exactly two outs.
std::vector<TetBranching> compatible_tet_branchings(const std::array<bool, 4>& pattern);

struct WeakBranching {
  std::vector<TetBranching> tet;
  PreBranching omega;
};

std::string serialize_weak_branching(const WeakBranching& wb);
WeakBranching parse_weak_branching(const std::string& text, const PreBranching& omega);

enum class EdgeColor { empty, plus, minus };
std::string color_name(EdgeColor c);

struct EdgeTypeResult {
  bool odd = false;       // odd label permutation; not a legal type for weak branchings
  EdgeColor color = EdgeColor::empty;  // meaningful when !odd
  Perm3 perm;             // label permutation, source-face labels to target-face labels
};

// Label permutation of a gluing under branchings at both ends.
Perm3 gluing_label_perm(const FacePairing& p, const TetBranching& b_src,
                        const TetBranching& b_dst);

// Reads the permutation of a gluing into the three even/odd types. The color
// is read from the source side; reading from the target side inverts the
// cycle, swapping plus and minus.
EdgeTypeResult classify_edge_type(const FacePairing& p, const TetBranching& b_src,
                                  const TetBranching& b_dst);

bool weak_branching_valid(const Triangulation& t, const WeakBranching& wb);

struct WeakBranchingSearch {
  bool found = false;
  WeakBranching result;
  long long nodes_visited = 0;
};

// Backtracking over the 4 compatible choices per tetrahedron, rejecting odd
// edges as soon as both ends are assigned.
WeakBranchingSearch find_weak_branching(const Triangulation& t, const PreBranching& w);

// Enumerates every compatible weak branching (small inputs only).
std::vector<WeakBranching> enumerate_weak_branchings(const Triangulation& t,
                                                     const PreBranching& w);

// Signs on abstract edges: -1 exactly on each tetrahedron's v0v2 and v1v3
// pair. Asserts the per-class even count and that the -1 set only depends on
// omega.
struct TautStructure {
  std::vector<int> sign;  // indexed tet*6 + edge slot, values +1/-1
};
TautStructure z2_taut(const Triangulation& t, const PreBranching& w, const WeakBranching& wb);

struct BranchabilityResult {
  bool branchable = false;
  std::vector<TetBranching> witness;  // filled when branchable
  long long assignments_total = 0;    // 24^n
  long long nodes_visited = 0;
  bool exhaustive = false;
};

// Searches for a global branching: a branching per tetrahedron making every
// edge type empty. DFS with pruning; guard bounds the tetrahedron count.
BranchabilityResult global_branching_exists(const Triangulation& t, int guard_tets = 6);

}  // namespace spinscape
