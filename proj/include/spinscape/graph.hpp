#pragma once

#include <random>
#include <string>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/gf2.hpp"
#include "spinscape/obstruction.hpp"
#include "spinscape/tri.hpp"

namespace spinscape {

// One stretch of an edge between split points. tail_or/head_or are the end
// orientations relative to the owning edge's tail-to-head direction (+1 when
// the end arrow agrees with it). perm maps strand labels at the tail end to
// labels at the head end; for an odd stretch the ends disagree and perm is
// odd. iorient is the internal orientation (+1/-1 along/against the edge
// direction), carried by odd stretches; even stretches leave it 0 since
// theirs must match the ends. weight2x is the doubled weight mod 4: even
// stretches hold 0 or 2, odd ones 1 or 3.
struct Subedge {
  int tail_or = +1, head_or = +1;
  int iorient = 0;
  Perm3 perm;
  int weight2x = 0;

  bool odd() const { return tail_or != head_or; }
  bool operator==(const Subedge&) const = default;
};

// The same stretch described from the other end.
Subedge subedge_reversed(const Subedge& s);

// S3 color composition along the chain direction: x is crossed first.
Perm3 fuse_A_colors(const Perm3& x, const Perm3& y);

// Weighted fusion of two adjacent stretches, x first. Throws TriError on the
// two adjacencies the rules do not cover (an internal orientation opposite to
// both external ones after fusion).
Subedge fuse_A_weighted(const Subedge& x, const Subedge& y);

// The Z3 color of an even stretch read tail to head.
EdgeColor color_of_perm(const Perm3& p);
Perm3 perm_of_color(EdgeColor c);

// 4-valent graph encoding a weakly branched triangulation, with edges
// optionally subdivided into decorated stretches.
struct DecoratedGraph {
  struct Vertex {
    int id = 0;
    int index = +1;
    TetBranching branching;
  };
  struct End {
    int vertex = 0;
    int germ = 0;  // face slot of the dual tetrahedron
    bool operator==(const End&) const = default;
  };
  struct Edge {
    int id = 0;
    End tail, head;
    std::vector<Subedge> parts;  // chain order runs tail to head, never empty
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

// Builds the graph of a weakly branched triangulation: one vertex per
// tetrahedron, one edge per gluing, colors from the label permutations, end
// orientations from the flow, weights from beta over face classes.
DecoratedGraph graph_of(const Triangulation& t, const PreBranching& w, const WeakBranching& wb,
                        const GF2Vector* beta = nullptr);

struct GraphState {
  PreBranching omega;
  std::vector<EdgeColor> colors;
  GF2Vector weights;
};

// Reads the flow directions, Z3 colors and weights back off a fused graph.
GraphState state_of(const DecoratedGraph& g);

// Invariant audit; empty report iff valid.
std::vector<std::string> validate_graph(const DecoratedGraph& g);

std::string serialize_graph(const DecoratedGraph& g);
DecoratedGraph parse_graph(const std::string& text);

// Collapses every chain, requiring all stretches even (Z3 colors add, Z/2
// weights add).
DecoratedGraph fuse_N(const DecoratedGraph& g);

// Collapses every chain at the color level only; weights and internal
// orientations are dropped.
DecoratedGraph fuse_A(const DecoratedGraph& g);

// Collapses every chain with the weighted rules. Each chain is also refused
// through three pseudo-random fusion orders; disagreement means the input was
// not of the move-generated shape and raises an order-dependence error.
DecoratedGraph fuse_all_weighted(const DecoratedGraph& g, int audit_orders = 3);

// Single-chain helpers used by the fusion audit and the tests.
Subedge fuse_chain(const std::vector<Subedge>& parts);
Subedge fuse_chain_in_order(const std::vector<Subedge>& parts, const std::vector<int>& order);

// Z/2 edge-weight vectors modulo the vertex coboundary action (all four
// weights at a vertex flip together; a loop is hit twice and never changes).
struct WeightClass {
  GF2Vector weights;
};
bool weight_class_equal(const DecoratedGraph& g, const GF2Vector& w0, const GF2Vector& w1);

// A random subdivision of one even edge into a chain of the move-generated
// shape: one of the four pure concatenation patterns with even stretches
// interspersed. Colors are drawn parity-consistently and compose to the
// original.
std::vector<Subedge> random_pattern_chain(const Subedge& whole, std::mt19937& rng);

// Splits every edge of a fused graph with random_pattern_chain.
DecoratedGraph split_edges_random(const DecoratedGraph& g, std::mt19937& rng);

// The obstruction computed from a split graph by the per-stretch region
// contribution table for odd colors. The table has two rows differing in the
// half signs; which row the both-out stretches take is frozen, and the _with
// variant lets tests probe both bindings.
ObstructionChain alpha_split_first_method(const Triangulation& t, const PreBranching& w,
                                          const WeakBranching& wb, const DecoratedGraph& split);
ObstructionChain alpha_split_first_method_with(const Triangulation& t, const PreBranching& w,
                                               const WeakBranching& wb, const DecoratedGraph& split,
                                               bool out_takes_plus_row);
bool frozen_first_method_row();

// The obstruction computed from a split graph by folding the section map s
// along each chain in the flow direction.
ObstructionChain alpha_split_second_method(const Triangulation& t, const PreBranching& w,
                                           const WeakBranching& wb, const DecoratedGraph& split);

}  // namespace spinscape
