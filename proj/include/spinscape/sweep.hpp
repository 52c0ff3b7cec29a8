#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/obstruction.hpp"
#include "spinscape/tri.hpp"

namespace spinscape {

// Random loose triangulation on n tets: the germs are paired up at random and
// each gluing draws admissible vertex maps until one is orientation
// reversing. Retried until the result validates and is connected.
Triangulation random_loose_triangulation(int n_tets, std::mt19937& rng);

// Random connected 4-valent multigraph on n vertices (loops and parallel
// edges allowed), by pairing the 4n germ stubs.
GluingGraph random_quartic_multigraph(int n_vertices, std::mt19937& rng);

// Every (flow, branching) pair of t, each completed with a particular weight
// solution. Order is the enumeration order of the flows, then branchings.
std::vector<SpinDescriptor> enumerate_states(const Triangulation& t);

// Exhaustive branchability scan. The parallel build splits the search over
// the first tetrahedron's candidates; it agrees with the serial scan on
// branchable, exhaustive and assignments_total, and any witness it returns
// is validated. nodes_visited depends on the schedule.
BranchabilityResult branchability_scan(const Triangulation& t, int guard_tets = 6);
BranchabilityResult branchability_scan_serial(const Triangulation& t, int guard_tets = 6);

// Solves every state of t and folds the obstruction chains, weight solutions
// and class counts into one digest. Per-state hashes land in a vector by
// state id before folding, so the parallel and serial digests are identical.
struct SweepDigest {
  std::size_t states = 0;
  std::uint64_t digest = 0;
  bool operator==(const SweepDigest&) const = default;
};
SweepDigest obstruction_sweep(const Triangulation& t);
SweepDigest obstruction_sweep_serial(const Triangulation& t);

}  // namespace spinscape
