#include "spinscape/sweep.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef SPINSCAPE_HAVE_OPENMP
#include <omp.h>
#endif

namespace spinscape {

Triangulation random_loose_triangulation(int n_tets, std::mt19937& rng) {
  if (n_tets < 1) throw std::invalid_argument("need at least one tetrahedron");
  while (true) {
    std::vector<int> germs(n_tets * 4);
    for (int i = 0; i < n_tets * 4; ++i) germs[i] = i;
    std::shuffle(germs.begin(), germs.end(), rng);
    Triangulation t;
    t.n_tets = n_tets;
    bool ok_all = true;
    for (int i = 0; i < n_tets * 4; i += 2) {
      FacePairing p;
      p.src_tet = germs[i] / 4;
      p.src_face = germs[i] % 4;
      p.dst_tet = germs[i + 1] / 4;
      p.dst_face = germs[i + 1] % 4;
      bool ok = false;
      for (int tries = 0; tries < 24 && !ok; ++tries) {
        std::array<int, 3> img{0, 1, 2};
        std::shuffle(img.begin(), img.end(), rng);
        auto dv = face_vertices(p.dst_face);
        p.vertex_map = {dv[img[0]], dv[img[1]], dv[img[2]]};
        if (pairing_tet_perm(p).sign() < 0) ok = true;
      }
      if (!ok) {
        ok_all = false;
        break;
      }
      t.pairings.push_back(p);
    }
    if (!ok_all) continue;
    try {
      validate(t);
    } catch (...) {
      continue;
    }
    if (!gluing_graph(t).connected()) continue;
    return t;
  }
}

GluingGraph random_quartic_multigraph(int n_vertices, std::mt19937& rng) {
  if (n_vertices < 1) throw std::invalid_argument("need at least one vertex");
  while (true) {
    std::vector<int> stubs(n_vertices * 4);
    for (int i = 0; i < n_vertices * 4; ++i) stubs[i] = i / 4;
    std::shuffle(stubs.begin(), stubs.end(), rng);
    GluingGraph g;
    g.n_vertices = n_vertices;
    for (int i = 0; i < n_vertices * 4; i += 2)
      g.edges.push_back({i / 2, stubs[i], stubs[i + 1]});
    if (g.connected()) return g;
  }
}

std::vector<SpinDescriptor> enumerate_states(const Triangulation& t) {
  std::vector<SpinDescriptor> out;
  for (const auto& w : enumerate_pre_branchings(t))
    for (const auto& wb : enumerate_weak_branchings(t, w)) {
      SpinDescriptor s;
      s.t = t;
      s.omega = w;
      s.b = wb;
      s.beta = solve_spin(t, w, wb).particular;
      out.push_back(std::move(s));
    }
  return out;
}

BranchabilityResult branchability_scan_serial(const Triangulation& t, int guard_tets) {
  return global_branching_exists(t, guard_tets);
}

namespace {

bool scan_dfs(const Triangulation& t, const std::vector<std::vector<TetBranching>>& cands,
              std::vector<int>& choice, long long& nodes, int tet) {
  if (tet == t.n_tets) return true;
  for (int c = 0; c < int(cands[tet].size()); ++c) {
    choice[tet] = c;
    ++nodes;
    bool ok = true;
    for (const auto& p : t.pairings) {
      if (std::max(p.src_tet, p.dst_tet) != tet) continue;
      EdgeTypeResult r = classify_edge_type(p, cands[p.src_tet][choice[p.src_tet]],
                                            cands[p.dst_tet][choice[p.dst_tet]]);
      if (r.odd || r.color != EdgeColor::empty) {
        ok = false;
        break;
      }
    }
    if (ok && scan_dfs(t, cands, choice, nodes, tet + 1)) return true;
  }
  choice[tet] = -1;
  return false;
}

// One slice of the scan: tet 0 pinned to its cand-th branching.
BranchabilityResult scan_slice(const Triangulation& t, int cand) {
  std::vector<std::vector<TetBranching>> cands(t.n_tets, enumerate_tet_branchings());
  cands[0] = {enumerate_tet_branchings()[cand]};
  std::vector<int> choice(t.n_tets, -1);
  BranchabilityResult r;
  r.branchable = scan_dfs(t, cands, choice, r.nodes_visited, 0);
  if (r.branchable)
    for (int tet = 0; tet < t.n_tets; ++tet) r.witness.push_back(cands[tet][choice[tet]]);
  return r;
}

}  // namespace

BranchabilityResult branchability_scan(const Triangulation& t, int guard_tets) {
#ifndef SPINSCAPE_HAVE_OPENMP
  return branchability_scan_serial(t, guard_tets);
#else
  if (t.n_tets > guard_tets) throw std::runtime_error("branchability guard exceeded");
  if (t.n_tets < 2) return branchability_scan_serial(t, guard_tets);
  std::array<BranchabilityResult, 24> parts;
  std::array<bool, 24> failed{};
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < 24; ++c) {
    try {
      parts[c] = scan_slice(t, c);
    } catch (...) {
      failed[c] = true;
    }
  }
  for (bool f : failed)
    if (f) throw std::runtime_error("branchability slice failed");
  BranchabilityResult r;
  r.assignments_total = 1;
  for (int i = 0; i < t.n_tets; ++i) r.assignments_total *= 24;
  for (const auto& p : parts) {
    r.nodes_visited += p.nodes_visited;
    if (p.branchable && !r.branchable) {
      r.branchable = true;
      r.witness = p.witness;
    }
  }
  r.exhaustive = !r.branchable;
  return r;
#endif
}

namespace {

std::uint64_t fold64(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  h *= 0x100000001b3ull;
  return h;
}

std::uint64_t state_digest(const Triangulation& t, const PreBranching& w,
                           const WeakBranching& wb) {
  SpinSolution sol = solve_spin(t, w, wb);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i) h = fold64(h, sol.alpha.get(i));
  for (std::size_t i = 0; i < sol.particular.size(); ++i) h = fold64(h, sol.particular.get(i));
  h = fold64(h, sol.class_count);
  for (int d : w.dir) h = fold64(h, std::uint64_t(d));
  for (const auto& b : wb.tet) {
    for (int o : b.order) h = fold64(h, std::uint64_t(o));
    h = fold64(h, std::uint64_t(b.index + 1));
  }
  return h;
}

SweepDigest fold_states(const Triangulation& t, bool parallel) {
  struct Key {
    PreBranching w;
    WeakBranching wb;
  };
  std::vector<Key> keys;
  for (const auto& w : enumerate_pre_branchings(t))
    for (const auto& wb : enumerate_weak_branchings(t, w)) keys.push_back({w, wb});
  std::vector<std::uint64_t> hashes(keys.size());
  if (parallel) {
#ifdef SPINSCAPE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(keys.size()); ++i)
      hashes[i] = state_digest(t, keys[i].w, keys[i].wb);
  } else {
    for (std::size_t i = 0; i < keys.size(); ++i)
      hashes[i] = state_digest(t, keys[i].w, keys[i].wb);
  }
  SweepDigest d;
  d.states = keys.size();
  d.digest = 0xcbf29ce484222325ull;
  for (std::uint64_t h : hashes) d.digest = fold64(d.digest, h);
  return d;
}

}  // namespace

SweepDigest obstruction_sweep(const Triangulation& t) { return fold_states(t, true); }

SweepDigest obstruction_sweep_serial(const Triangulation& t) { return fold_states(t, false); }

}  // namespace spinscape
