#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/gf2.hpp"
#include "spinscape/graph.hpp"
#include "spinscape/obstruction.hpp"
#include "spinscape/tri.hpp"

namespace spinscape {

// Rewrites of a decorated state that keep the spin structure. Every
// non-structural constructor checks the coboundary certificate: the change
// of the obstruction ledger must equal the boundary of the declared weight
// change. Structural constructors re-solve the spin count instead.

enum class MoveKind {
  I,
  Ibar,
  II,
  IIbar,
  III,
  M,
  Mbar,
  N,
  Nbar,
  circuit,
  under_circuit,
  coboundary,
  bubble,
  move23,
  move32,
  normalize,  // script shorthand for normalize_edge
};

std::string move_kind_name(MoveKind k);

struct MoveStep {
  MoveKind kind = MoveKind::I;
  std::vector<int> target;  // tet id, pairing id or the circuit pairings
  SpinDescriptor after;
  GF2Vector delta_beta;  // over the old pairing indexing; empty when structural
  bool structural = false;
  std::vector<int> tet_map;      // structural: old tet id to new, -1 if retired
  std::vector<int> pairing_map;  // structural: old pairing id to new, -1 if retired
};

// Cyclic shifts of one vertex branching. The left shift lowers every role by
// one and keeps the gluing labels of the role 0 face unchanged, so the weight
// moves by that face's pairing; the right shift is its inverse and keeps the
// role 3 face. At an index -1 vertex the left shift is I and the right shift
// II; their inverses at +1 are Ibar and IIbar.
MoveStep move_I(const SpinDescriptor& s, int tet);
MoveStep move_Ibar(const SpinDescriptor& s, int tet);
MoveStep move_II(const SpinDescriptor& s, int tet);
MoveStep move_IIbar(const SpinDescriptor& s, int tet);

// Rotation of the branching by two roles, at either index. The weight moves
// by the two over germs; the two shift factorizations differ from that by
// the coboundary of the tetrahedron, so they land in the same class.
MoveStep move_III(const SpinDescriptor& s, int tet);

// A coboundary step: flips the weight of all four germs of one tetrahedron.
// Not a rewrite of the underlying state, but recorded like one so scripts
// can adjust the representative within a class.
MoveStep move_coboundary(const SpinDescriptor& s, int tet);

// Simple flow circuits crossing every visited tetrahedron through its two
// over faces (respectively under faces), as pairing sequences in flow order.
std::vector<std::vector<int>> over_circuits(const SpinDescriptor& s);
std::vector<std::vector<int>> under_circuits(const SpinDescriptor& s);

// Reverses the flow along an over circuit, swaps roles 2 and 3 of every
// visited branching, and adds 1 to the weight of each circuit pairing whose
// end indices differ. The under version swaps roles 0 and 1 instead.
MoveStep circuit_move(const SpinDescriptor& s, const std::vector<int>& gamma);
MoveStep under_circuit_move(const SpinDescriptor& s, const std::vector<int>& gamma);

struct TaggedCircuit {
  bool under = false;
  std::vector<int> pairings;
};

// Simultaneous reversal of pairwise edge-disjoint circuits, each running
// over or under, with at most one of either kind through any tetrahedron.
// Applied sequentially; validity of every later circuit is preserved by the
// earlier reversals.
std::vector<MoveStep> multi_circuit_move(const SpinDescriptor& s,
                                         const std::vector<TaggedCircuit>& gammas);

// Local classification of the strand passages of the obstruction regions
// through a reversed over circuit. A passage is backward-along when its
// flow-tail-side strand label is 0, and forward-along when the flow-read
// gluing permutation sends its label to 0. Colored passages are in (forward
// only), out (backward only) or in-out; empty ones along or in-out, telling
// right from left by strand label 1 versus 2.
enum class PassageRow {
  empty_along,
  empty_io_right,
  empty_io_left,
  plus_in,
  plus_out,
  plus_io,
  minus_in,
  minus_out,
  minus_io,
};

std::string passage_row_name(PassageRow r);

// Contribution of one passage given the indices at the ends of its pairing.
int passage_entry(PassageRow row, int eps_tail, int eps_head);

struct CircuitPassage {
  int region = 0;  // edge class id
  int pairing = 0;
  PassageRow row = PassageRow::empty_along;
  int eps_tail = +1, eps_head = +1;
};

std::vector<CircuitPassage> classify_circuit_passages(const SpinDescriptor& s,
                                                      const std::vector<int>& gamma);

// Drives a non-loop pairing to empty color, weight zero, an overpass at both
// ends and an index pair other than (+1, -1). Rotations fix the underpasses
// first (lower tet id first), then shifts at the flow tail V0 and head V1
// chosen by the color and the indices, then a coboundary at V0 clears the
// weight.
std::vector<MoveStep> normalize_edge(const SpinDescriptor& s, int pairing);

// Every applicable target of a kind on a state, for exhaustive sweeps.
std::vector<std::vector<int>> applicable_sites(const SpinDescriptor& s, MoveKind k);

// ---- weighted local rewriting ----

// The effect of one elementary move at a vertex on its four germ stretches:
// the replacement branching, which germ directions flip, the label change at
// the vertex side of each face, and the decoration of the stretch spliced in
// next to the vertex. iorient is relative to the direction away from the
// vertex and 0 on even stretches.
struct LocalLayer {
  TetBranching after;
  std::array<bool, 4> flip{};
  std::array<Perm3, 4> relabel;
  std::array<int, 4> weight2x{};
  std::array<int, 4> iorient{};
};

LocalLayer weighted_layer(MoveKind k, const TetBranching& b);

// The decorations of the four swap moves: weight and internal orientation of
// the spliced stretch at each role face. Frozen from the derivation below.
struct SwapDecorations {
  // rows M, Mbar, N, Nbar; columns role faces 0..3
  std::array<std::array<int, 4>, 4> weight2x{};
  std::array<std::array<int, 4>, 4> iorient{};
  bool operator==(const SwapDecorations&) const = default;
};

SwapDecorations frozen_swap_decorations();

// Re-derives the swap decorations from the inverse and exchange relations
// plus exact circuit generation, returning every surviving assignment. The
// survivors come as a mirror pair under swapping the half weights 1/2 and
// -1/2 on every flipped face; the frozen table is the lex-least of them.
std::vector<SwapDecorations> derive_swap_decorations();

// Splices the layer of one elementary move into the graph at one vertex.
DecoratedGraph apply_weighted_move(const DecoratedGraph& g, int vertex, MoveKind k);
DecoratedGraph apply_weighted_word(const DecoratedGraph& g, int vertex,
                                   const std::vector<MoveKind>& word);

// Free-standing germ stubs of a single vertex, for composing local words
// away from any ambient graph. Each stub's reference direction points away
// from the vertex and its chain runs vertex side first.
struct GermStubs {
  TetBranching b;
  std::array<int, 4> dir{};  // +1 out, -1 in, by face
  std::array<std::vector<Subedge>, 4> chain;
};

GermStubs stubs_identity(const TetBranching& b);
void apply_local(GermStubs& st, MoveKind k);

// Equal branching and fused stretches per germ, with weights compared up to
// the all-germ shift by 1 (the vertex coboundary).
bool stubs_equivalent(const GermStubs& a, const GermStubs& b);

// Checks one pair of local words on every branching of the given index.
bool local_words_equal(const std::vector<MoveKind>& lhs, const std::vector<MoveKind>& rhs,
                       int index);

struct RelationCheck {
  std::vector<MoveKind> lhs, rhs;
  int index;
};

// The inverse and exchange relations of the elementary weighted moves.
std::vector<RelationCheck> move_relations();

// Closure of alpha = III and beta = I then Mbar at index -1. Verifies
// alpha^2, beta^3 and (alpha beta)^3 trivial and returns the number of
// distinct effects generated (12, the alternating group on four letters).
std::size_t pi_minus_closure();

// ---- structural moves ----

MoveStep move_bubble(const SpinDescriptor& s, int pairing);
MoveStep move_23(const SpinDescriptor& s, int pairing);
MoveStep move_32(const SpinDescriptor& s, int edge_class);

// Orientation-preserving simplicial bijection, if any, found by propagating
// a seed tet assignment through the gluings.
struct TriIsomorphism {
  std::vector<int> tet_image;
  std::vector<Perm4> vertex_image;
};

std::optional<TriIsomorphism> tri_isomorphism(const Triangulation& a, const Triangulation& b);
std::vector<TriIsomorphism> tri_isomorphisms(const Triangulation& a, const Triangulation& b);

// Pushes a state through an isomorphism onto the target triangulation.
SpinDescriptor transport_state(const SpinDescriptor& s, const Triangulation& target,
                               const TriIsomorphism& iso);

// ---- good labelings ----

// Germ 2-labelings where the two ends of every edge agree and the two
// incoming (and the two outgoing) germs at every vertex differ. Found by
// parity propagation over the forced identifications; the constraint graph
// is always consistent.
struct GoodLabeling {
  std::vector<int> label;  // by germ id, 0 or 1
};

std::vector<GoodLabeling> good_labelings(const Triangulation& t, const PreBranching& w);

// Rebranches every vertex by shift and rotation words so the over pair at
// each vertex is its label 0 germ pair. Afterwards every edge is a double
// overpass or a double underpass.
std::vector<MoveStep> realize_labeling(const SpinDescriptor& s, const GoodLabeling& gl);

// ---- scripts and sessions ----

struct ScriptStep {
  MoveKind kind = MoveKind::I;
  std::vector<int> args;
};

std::vector<ScriptStep> parse_move_script(const std::string& text);

// Plays a script on a state. Swap moves accumulate on a work graph until
// every flipped germ has paired up and the graph fuses back to a state;
// other moves require no pending work. normalize expands to its step list.
struct SessionStep {
  ScriptStep script;
  bool pending = false;
  std::vector<MoveStep> landed;  // state rewrites completed by this step
};

struct MoveSession {
  SpinDescriptor state;
  DecoratedGraph work;
  bool pending = false;
  std::vector<SessionStep> log;
};

MoveSession start_session(const SpinDescriptor& s);
void session_apply(MoveSession& ms, const ScriptStep& step);
// Throws if swap moves are still unfused.
void session_finish(MoveSession& ms);

// The canonical state of a triangulation: first flow, first weak branching,
// particular weight solution.
SpinDescriptor canonical_descriptor(const Triangulation& t);

}  // namespace spinscape
