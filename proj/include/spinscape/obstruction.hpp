#pragma once

#include <array>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/gf2.hpp"
#include "spinscape/homology.hpp"
#include "spinscape/tri.hpp"

namespace spinscape {

// Element of the group of half-integers mod 2, stored as twice the value so
// that weight 1/2 is 1 and weight 1 is 2. The subgroup {0,1} is Z/2.
struct GWeight {
  int v = 0;  // 0..3

  static GWeight half() { return {1}; }
  static GWeight one() { return {2}; }
  static GWeight minus_half() { return {3}; }
  static GWeight from_doubled(int d) { return {((d % 4) + 4) % 4}; }

  GWeight operator+(GWeight o) const { return {(v + o.v) % 4}; }
  GWeight operator-(GWeight o) const { return {(v - o.v + 4) % 4}; }
  bool operator==(const GWeight&) const = default;
  bool in_z2() const { return v % 2 == 0; }
  // The Z/2 value of an element of the subgroup {0,1}.
  bool z2() const;
  std::string str() const;
};

// The obstruction cochain over edge classes, with the unreduced ledger of
// contributions kept for the parity audits and for reporting.
struct ObstructionChain {
  GF2Vector chain;  // one bit per edge class
  struct EdgeAudit {
    std::vector<int> first_type;   // doubled G values from fiber members
    std::vector<int> second_type;  // doubled G values from gluing passages
    int total = 0;                 // doubled G value including the initial 1
  };
  std::vector<EdgeAudit> audit;
};

// The attaching walk of the dual region of one edge class: alternating
// tetrahedron passages (through a quadrant of the dual butterfly) and
// gluing traversals (along one of the three strands).
struct RegionBoundary {
  int edge_class = -1;

  enum Quadrant { other = 0, sink = 1, source = 2 };
  struct VertexPassage {
    int tet = 0;
    int a = 0, b = 0;     // the abstract edge the quadrant is dual to
    int enter_face = 0;   // face germ the walk arrives through
    int exit_face = 0;
    Quadrant quadrant = other;
    int arrow_agree = 0;  // +1/-1 walk direction versus the arrow, 0 if none
  };
  struct EdgePassage {
    int pairing = 0;
    int dir = +1;          // +1 when traversed source to target
    int src_label = 0;     // strand label on the source face
    int first_label = 0;   // strand label at the flow-first end
    int contribution = 0;  // doubled G value
  };

  std::vector<VertexPassage> vertices;
  std::vector<EdgePassage> edges;  // edges[i] joins vertices[i] to vertices[i+1 mod n]
};

// Direction conventions for the quadrant arrows, freezable so tests can probe
// every candidate. dir[k] is 0 or 1 for context k = 2*(index<0) + (wing v1v3),
// selecting which adjacent germ the arrow points toward.
struct ArrowTable {
  std::array<int, 4> dir{0, 0, 0, 0};
};
const ArrowTable& frozen_arrow_table();

// The color of a gluing read along the flow direction of omega.
EdgeColor edge_color_along_omega(const Triangulation& t, const PreBranching& w,
                                 const WeakBranching& wb, int pairing);

// Doubled weight one strand passage contributes to its region, keyed by the
// color along the flow and the strand label at the flow-first end.
int strand_weight(EdgeColor color, int first_label);

// Obstruction by the per-edge recipe: initial 1, half contributions from the
// diagonal fiber members, and gluing contributions by matched orientation.
ObstructionChain alpha_bar(const Triangulation& t, const PreBranching& w,
                           const WeakBranching& wb);

// The same obstruction assembled by walking the attaching circle of each dual
// region and summing arrow and strand contributions.
std::vector<RegionBoundary> region_boundaries(const Triangulation& t, const PreBranching& w,
                                              const WeakBranching& wb, const ArrowTable& arrows);
ObstructionChain alpha_spine_with(const Triangulation& t, const PreBranching& w,
                                  const WeakBranching& wb, const ArrowTable& arrows);
ObstructionChain alpha_spine(const Triangulation& t, const PreBranching& w,
                             const WeakBranching& wb);

// Pairing of the obstruction with the sum of all regions.
int alpha_fundamental(const Triangulation& t, const PreBranching& w, const WeakBranching& wb);

struct SpinDescriptor {
  Triangulation t;
  PreBranching omega;
  WeakBranching b;
  GF2Vector beta;  // over face classes, with d2 beta = alpha
};

struct SpinSolution {
  GF2Vector alpha;
  GF2Vector particular;
  std::vector<GF2Vector> kernel;          // null space of d2
  std::vector<GF2Vector> quotient_basis;  // kernel classes modulo im d3
  std::size_t class_count = 0;            // 2^quotient rank
  std::vector<SpinDescriptor> classes;    // one representative per class
};

// Solves d2 beta = alpha and enumerates representatives of the solution set
// modulo im d3. Infeasibility would contradict the coboundary theorem and is
// escalated as a logic error.
SpinSolution solve_spin(const Triangulation& t, const PreBranching& w, const WeakBranching& wb);

// Whether two descriptors over the same base data give the same structure:
// the difference of the betas must bound a 3-chain.
bool spin_equal(const SpinDescriptor& d0, const SpinDescriptor& d1);

// Semidirect product S3 x G^3 with the right coordinate action.
struct SemiDirect {
  Perm3 eta;
  std::array<int, 3> g{0, 0, 0};  // doubled G values
  bool operator==(const SemiDirect&) const = default;
};

SemiDirect semidirect_identity();
SemiDirect semidirect_mul(const SemiDirect& x, const SemiDirect& y);

// The homomorphism eta -> (eta, s(eta)), for the primary table and for the
// alternate table that redefines s on the transpositions.
SemiDirect psi(const Perm3& eta);
SemiDirect psi_alternate(const Perm3& eta);
std::array<int, 3> s_table(const Perm3& eta);
std::array<int, 3> s_table_alternate(const Perm3& eta);

}  // namespace spinscape
