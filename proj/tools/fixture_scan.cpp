// Development utility: scans small gluing spaces for the triangulations kept
// under fixtures/, printing canonical text plus the invariants used to label
// them (vertex-link Euler characteristics, Z/2 Betti numbers, and integer
// first homology for single-vertex complexes via Smith normal form).

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/gf2.hpp"
#include "spinscape/homology.hpp"
#include "spinscape/tri.hpp"

using namespace spinscape;

namespace {

// Euler characteristic of the link of each vertex class.
std::vector<int> link_euler(const Triangulation& t) {
  auto vc = compute_vertex_classes(t);
  std::vector<int> faces(vc.count, 0), edges(vc.count, 0), verts(vc.count, 0);
  for (int tet = 0; tet < t.n_tets; ++tet)
    for (int v = 0; v < 4; ++v) faces[vc.class_of[tet * 4 + v]]++;
  for (const auto& p : t.pairings)
    for (int v : face_vertices(p.src_face)) edges[vc.class_of[p.src_tet * 4 + v]]++;
  for (const auto& c : compute_edge_classes(t)) {
    const auto& r = c.fiber[c.ref];
    verts[vc.class_of[r.tet * 4 + r.a]]++;
    verts[vc.class_of[r.tet * 4 + r.b]]++;
  }
  std::vector<int> chi(vc.count);
  for (int i = 0; i < vc.count; ++i) chi[i] = verts[i] - edges[i] + faces[i];
  return chi;
}

// Integer face-to-edge boundary matrix (rows = edge classes, cols = pairings).
std::vector<std::vector<long long>> integer_d2(const Triangulation& t) {
  auto classes = compute_edge_classes(t);
  auto lookup = edge_class_lookup(t, classes);
  std::map<int, std::map<int, int>> slot_sign;  // (tet*6+slot) -> sign vs reference
  for (const auto& c : classes)
    for (const auto& e : c.fiber) slot_sign[e.tet * 6 + edge_slot(e.a, e.b)][0] = e.sign;

  std::vector<std::vector<long long>> m(classes.size(),
                                        std::vector<long long>(t.pairings.size(), 0));
  for (std::size_t i = 0; i < t.pairings.size(); ++i) {
    auto fv = face_vertices(t.pairings[i].src_face);
    int tet = t.pairings[i].src_tet;
    // boundary of triangle (x0<x1<x2) = [x1x2] - [x0x2] + [x0x1]
    const int term[3][3] = {{fv[1], fv[2], +1}, {fv[0], fv[2], -1}, {fv[0], fv[1], +1}};
    for (const auto& tm : term) {
      int slot = edge_slot(tm[0], tm[1]);
      int cls = lookup[tet * 6 + slot];
      m[cls][i] += tm[2] * slot_sign[tet * 6 + slot][0];
    }
  }
  return m;
}

// Smith normal form diagonal of a small integer matrix.
std::vector<long long> snf_diagonal(std::vector<std::vector<long long>> m) {
  std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<long long> diag;
  std::size_t r0 = 0, c0 = 0;
  while (r0 < rows && c0 < cols) {
    // Find a nonzero pivot with the least absolute value.
    std::size_t pr = rows, pc = cols;
    long long best = 0;
    for (std::size_t r = r0; r < rows; ++r)
      for (std::size_t c = c0; c < cols; ++c)
        if (m[r][c] != 0 && (best == 0 || std::abs(m[r][c]) < std::abs(best))) {
          best = m[r][c];
          pr = r;
          pc = c;
        }
    if (best == 0) break;
    std::swap(m[r0], m[pr]);
    for (std::size_t r = 0; r < rows; ++r) std::swap(m[r][c0], m[r][pc]);

    bool clean = true;
    for (std::size_t r = r0 + 1; r < rows; ++r)
      if (m[r][c0] % m[r0][c0] != 0) clean = true;
    // Reduce the pivot row and column until everything divides.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t r = r0 + 1; r < rows; ++r) {
        long long q = m[r][c0] / m[r0][c0];
        if (q)
          for (std::size_t c = c0; c < cols; ++c) m[r][c] -= q * m[r0][c];
        if (m[r][c0] != 0) {
          std::swap(m[r0], m[r]);
          changed = true;
        }
      }
      for (std::size_t c = c0 + 1; c < cols; ++c) {
        long long q = m[r0][c] / m[r0][c0];
        if (q)
          for (std::size_t r = r0; r < rows; ++r) m[r][c] -= q * m[r][c0];
        if (m[r0][c] != 0) {
          for (std::size_t r = r0; r < rows; ++r) std::swap(m[r][c0], m[r][c]);
          changed = true;
        }
      }
    }
    (void)clean;
    diag.push_back(std::abs(m[r0][c0]));
    ++r0;
    ++c0;
  }
  return diag;
}

std::string h1_name(const Triangulation& t) {
  // Only valid for single-vertex complexes, where every edge is a loop.
  auto diag = snf_diagonal(integer_d2(t));
  std::size_t n_edges = compute_edge_classes(t).size();
  std::size_t free_rank = n_edges - diag.size();
  std::string s;
  for (auto d : diag)
    if (d > 1) s += (s.empty() ? "" : "+") + std::string("Z") + std::to_string(d);
  for (std::size_t i = 0; i < free_rank; ++i) s += (s.empty() ? "" : "+") + std::string("Z");
  return s.empty() ? "0" : s;
}

void describe(const Triangulation& t) {
  auto chi = link_euler(t);
  auto counts = cell_counts(t);
  std::cout << "  cells v/e/f/t = " << counts.vertices << "/" << counts.edges << "/"
            << counts.faces << "/" << counts.tets << "; link chi =";
  for (int x : chi) std::cout << " " << x;
  std::cout << "; H0/H1/H2 over Z2 = " << homology_rank(t, 0) << "/" << homology_rank(t, 1)
            << "/" << homology_rank(t, 2);
  if (counts.vertices == 1) std::cout << "; H1(Z) = " << h1_name(t);
  auto br = global_branching_exists(t);
  std::cout << "; branchable = " << (br.branchable ? "yes" : "no");
  auto w = find_pre_branching(t);
  auto wb = find_weak_branching(t, w);
  std::cout << "; weak branching for euler omega = " << (wb.found ? "yes" : "no") << "\n";
  std::cout << serialize_triangulation(t);
}

void scan_one_tet() {
  std::set<std::string> seen;
  std::cout << "== 1-tetrahedron triangulations ==\n";
  // Face matchings: {0,1}+{2,3}, {0,2}+{1,3}, {0,3}+{1,2}.
  const int match[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  for (const auto& fm : match) {
    for (int ma = 0; ma < 6; ++ma)
      for (int mb = 0; mb < 6; ++mb) {
        Triangulation t;
        t.n_tets = 1;
        FacePairing a, b;
        a.src_face = fm[0];
        a.dst_face = fm[1];
        b.src_face = fm[2];
        b.dst_face = fm[3];
        auto da = face_vertices(a.dst_face);
        auto db = face_vertices(b.dst_face);
        std::array<int, 3> pa = da, pb = db;
        for (int i = 0; i < ma; ++i) std::next_permutation(pa.begin(), pa.end());
        for (int i = 0; i < mb; ++i) std::next_permutation(pb.begin(), pb.end());
        a.vertex_map = pa;
        b.vertex_map = pb;
        t.pairings = {a, b};
        if (!validate(t).empty()) continue;
        std::string canon = serialize_triangulation(t);
        if (!seen.insert(canon).second) continue;
        describe(t);
      }
  }
}

void scan_two_tet() {
  std::cout << "== 2-tetrahedron, 2 edge classes, all torus links ==\n";
  struct Found {
    std::string canon;
    bool branchable;
  };
  std::vector<Found> found;
  std::set<std::string> seen;
  // All faces of tet 0 glue to tet 1: 4! face matchings, 6 vertex maps each.
  std::array<int, 4> fmatch{0, 1, 2, 3};
  std::vector<std::array<int, 4>> matchings;
  do {
    matchings.push_back(fmatch);
  } while (std::next_permutation(fmatch.begin(), fmatch.end()));
  for (const auto& fm : matchings) {
    int maps[4];
    for (maps[0] = 0; maps[0] < 6; ++maps[0])
      for (maps[1] = 0; maps[1] < 6; ++maps[1])
        for (maps[2] = 0; maps[2] < 6; ++maps[2])
          for (maps[3] = 0; maps[3] < 6; ++maps[3]) {
            Triangulation t;
            t.n_tets = 2;
            bool ok = true;
            for (int f = 0; f < 4 && ok; ++f) {
              FacePairing p;
              p.src_tet = 0;
              p.src_face = f;
              p.dst_tet = 1;
              p.dst_face = fm[f];
              auto dv = face_vertices(p.dst_face);
              std::array<int, 3> pv = dv;
              for (int i = 0; i < maps[f]; ++i) std::next_permutation(pv.begin(), pv.end());
              p.vertex_map = pv;
              if (pairing_tet_perm(p).sign() != -1) ok = false;
              t.pairings.push_back(p);
            }
            if (!ok || !validate(t).empty()) continue;
            auto classes = compute_edge_classes(t);
            if (classes.size() != 2) continue;
            if (classes[0].fiber.size() != 6 || classes[1].fiber.size() != 6) continue;
            auto chi = link_euler(t);
            if (!std::all_of(chi.begin(), chi.end(), [](int x) { return x == 0; })) continue;
            std::string canon = serialize_triangulation(t);
            if (!seen.insert(canon).second) continue;
            auto br = global_branching_exists(t);
            found.push_back({canon, br.branchable});
          }
  }
  int n_br = 0, n_un = 0;
  std::string first_br, first_un;
  for (const auto& f : found) {
    if (f.branchable) {
      if (n_br == 0) first_br = f.canon;
      ++n_br;
    } else {
      if (n_un == 0) first_un = f.canon;
      ++n_un;
    }
  }
  std::cout << "found " << found.size() << " gluings: " << n_br << " branchable, " << n_un
            << " not\n";
  if (n_br) {
    std::cout << "-- first branchable --\n";
    describe(parse_triangulation(first_br));
  }
  if (n_un) {
    std::cout << "-- first unbranchable --\n";
    describe(parse_triangulation(first_un));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  if (which == "1" || which == "all") scan_one_tet();
  if (which == "2" || which == "all") scan_two_tet();
  return 0;
}
