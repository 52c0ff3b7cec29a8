#include "spinscape/obstruction.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace spinscape {

bool GWeight::z2() const {
  if (v % 2 != 0) throw std::logic_error("weight " + str() + " is not in the Z/2 subgroup");
  return v == 2;
}

std::string GWeight::str() const {
  switch (v) {
    case 0: return "0";
    case 1: return "1/2";
    case 2: return "1";
    default: return "-1/2";
  }
}

EdgeColor edge_color_along_omega(const Triangulation& t, const PreBranching& w,
                                 const WeakBranching& wb, int pairing) {
  const FacePairing& p = t.pairings[pairing];
  EdgeTypeResult r = classify_edge_type(p, wb.tet[p.src_tet], wb.tet[p.dst_tet]);
  if (r.odd) throw std::logic_error("odd gluing has no color");
  if (r.color == EdgeColor::empty || w.dir[pairing] == 0) return r.color;
  // Flow runs target to source, which reads the cycle backwards.
  return r.color == EdgeColor::plus ? EdgeColor::minus : EdgeColor::plus;
}

int strand_weight(EdgeColor color, int first_label) {
  if (color == EdgeColor::empty) return 0;
  if (color == EdgeColor::plus) return first_label == 2 ? 2 : 3;
  return first_label == 0 ? 2 : 1;
}

ObstructionChain alpha_bar(const Triangulation& t, const PreBranching& w,
                           const WeakBranching& wb) {
  if (!weak_branching_valid(t, wb)) throw std::invalid_argument("weak branching invalid");
  std::vector<EdgeClass> classes = compute_edge_classes(t);
  std::vector<int> lookup = edge_class_lookup(t, classes);

  ObstructionChain out;
  out.chain = GF2Vector(classes.size());
  out.audit.resize(classes.size());

  for (const EdgeClass& e : classes) {
    auto& audit = out.audit[e.id];
    for (const auto& entry : e.fiber) {
      auto roles = wb.tet[entry.tet].role_of();
      int ra = roles[entry.a], rb = roles[entry.b];
      int lo = std::min(ra, rb), hi = std::max(ra, rb);
      bool diagonal = (lo == 0 && hi == 2) || (lo == 1 && hi == 3);
      if (!diagonal) continue;
      bool agrees = (ra < rb) == (entry.sign == +1);
      audit.first_type.push_back(agrees ? 1 : 3);
    }
  }

  for (std::size_t i = 0; i < t.pairings.size(); ++i) {
    const FacePairing& p = t.pairings[i];
    EdgeColor color = edge_color_along_omega(t, w, wb, static_cast<int>(i));
    auto roles_src = wb.tet[p.src_tet].role_of();
    auto roles_dst = wb.tet[p.dst_tet].role_of();
    std::array<int, 3> fv = face_vertices(p.src_face);
    for (int j = 0; j < 3; ++j) {
      int x = fv[j], y = fv[(j + 1) % 3];
      int cls = lookup[p.src_tet * 6 + edge_slot(x, y)];
      int value = 0;
      if (color != EdgeColor::empty) {
        int xi = pairing_apply(p, x), yi = pairing_apply(p, y);
        bool matched = (roles_src[x] < roles_src[y]) == (roles_dst[xi] < roles_dst[yi]);
        if (matched)
          value = 2;
        else
          value = color == EdgeColor::plus ? 3 : 1;
      }
      out.audit[cls].second_type.push_back(value);
    }
  }

  for (const EdgeClass& e : classes) {
    auto& audit = out.audit[e.id];
    int first = 0, second = 0;
    for (int v : audit.first_type) first += v;
    for (int v : audit.second_type) second += v;
    if (first % 2 != 0) throw std::logic_error("fiber contribution sum left the Z/2 subgroup");
    if (second % 2 != 0) throw std::logic_error("gluing contribution sum left the Z/2 subgroup");
    audit.total = (2 + first + second) % 4;
    out.chain.set(e.id, GWeight{audit.total}.z2());
  }
  return out;
}

// On a +1 tetrahedron the quadrant arrow runs from the higher-role germ to
// the lower one; on a -1 tetrahedron the other way. The globally flipped
// table gives the same obstruction (each region crosses an even number of
// arrows), so this is the only real choice.
const ArrowTable& frozen_arrow_table() {
  static const ArrowTable table{{1, 1, 0, 0}};
  return table;
}

namespace {

// The two faces of a tetrahedron containing the abstract edge {a,b} are the
// faces opposite the two complementary vertices.
std::array<int, 2> containing_faces(int a, int b) {
  std::array<int, 2> out{};
  int k = 0;
  for (int v = 0; v < 4; ++v)
    if (v != a && v != b) out[k++] = v;
  return out;
}

struct WalkState {
  int tet, a, b, enter_face, exit_face;
  bool operator==(const WalkState&) const = default;
};

}  // namespace

std::vector<RegionBoundary> region_boundaries(const Triangulation& t, const PreBranching& w,
                                              const WeakBranching& wb, const ArrowTable& arrows) {
  if (!weak_branching_valid(t, wb)) throw std::invalid_argument("weak branching invalid");
  std::vector<EdgeClass> classes = compute_edge_classes(t);
  TriIndex idx(t);

  std::vector<RegionBoundary> out;
  for (const EdgeClass& e : classes) {
    RegionBoundary region;
    region.edge_class = e.id;

    const auto& ref = e.fiber[e.ref];
    std::array<int, 2> faces = containing_faces(ref.a, ref.b);
    WalkState start{ref.tet, ref.a, ref.b, faces[1], faces[0]};
    WalkState cur = start;

    std::map<std::pair<int, int>, int> seen;  // abstract edge -> visit count
    do {
      const TetBranching& br = wb.tet[cur.tet];
      auto roles = br.role_of();
      RegionBoundary::VertexPassage vp;
      vp.tet = cur.tet;
      vp.a = cur.a;
      vp.b = cur.b;
      vp.enter_face = cur.enter_face;
      vp.exit_face = cur.exit_face;
      int lo = std::min(roles[cur.a], roles[cur.b]);
      int hi = std::max(roles[cur.a], roles[cur.b]);
      bool wing02 = lo == 0 && hi == 2;
      bool wing13 = lo == 1 && hi == 3;
      if (wing02 || wing13) {
        bool plus = br.index == +1;
        vp.quadrant = (wing02 == plus) ? RegionBoundary::sink : RegionBoundary::source;
        int ctx = 2 * (br.index < 0 ? 1 : 0) + (wing13 ? 1 : 0);
        int g_enter = roles[cur.enter_face];
        int g_exit = roles[cur.exit_face];
        bool ascending = g_enter < g_exit;
        vp.arrow_agree = (ascending == (arrows.dir[ctx] == 0)) ? +1 : -1;
      }
      region.vertices.push_back(vp);
      ++seen[{cur.tet, edge_slot(cur.a, cur.b)}];

      const TriIndex::Ref& ref_g = idx.at(cur.tet, cur.exit_face);
      const FacePairing& p = t.pairings[ref_g.pairing];
      RegionBoundary::EdgePassage ep;
      ep.pairing = ref_g.pairing;
      ep.dir = ref_g.side == 0 ? +1 : -1;

      int na, nb, next_tet, next_enter;
      int u;  // the third face vertex, the strand the walk crosses
      {
        std::array<int, 3> fv = face_vertices(cur.exit_face);
        u = fv[0] != cur.a && fv[0] != cur.b ? fv[0] : (fv[1] != cur.a && fv[1] != cur.b ? fv[1] : fv[2]);
      }
      int u_src, u_dst;
      if (ref_g.side == 0) {
        na = pairing_apply(p, cur.a);
        nb = pairing_apply(p, cur.b);
        u_src = u;
        u_dst = pairing_apply(p, u);
        next_tet = p.dst_tet;
        next_enter = p.dst_face;
      } else {
        na = pairing_apply_inverse(p, cur.a);
        nb = pairing_apply_inverse(p, cur.b);
        u_dst = u;
        u_src = pairing_apply_inverse(p, u);
        next_tet = p.src_tet;
        next_enter = p.src_face;
      }
      if (na > nb) std::swap(na, nb);

      ep.src_label = face_label_of_vertex(wb.tet[p.src_tet], p.src_face, u_src);
      int dst_label = face_label_of_vertex(wb.tet[p.dst_tet], p.dst_face, u_dst);
      ep.first_label = w.dir[ref_g.pairing] == 0 ? ep.src_label : dst_label;
      ep.contribution =
          strand_weight(edge_color_along_omega(t, w, wb, ref_g.pairing), ep.first_label);
      region.edges.push_back(ep);

      std::array<int, 2> nf = containing_faces(na, nb);
      int next_exit = nf[0] == next_enter ? nf[1] : nf[0];
      if (nf[0] != next_enter && nf[1] != next_enter)
        throw std::logic_error("edge left its own link while walking the region");
      cur = WalkState{next_tet, na, nb, next_enter, next_exit};
    } while (!(cur == start));

    if (region.vertices.size() != e.fiber.size())
      throw std::logic_error("region walk did not pass each fiber member exactly once");
    for (const auto& entry : e.fiber)
      if (seen[{entry.tet, edge_slot(entry.a, entry.b)}] != 1)
        throw std::logic_error("region walk did not pass each fiber member exactly once");
    out.push_back(std::move(region));
  }
  return out;
}

ObstructionChain alpha_spine_with(const Triangulation& t, const PreBranching& w,
                                  const WeakBranching& wb, const ArrowTable& arrows) {
  std::vector<RegionBoundary> regions = region_boundaries(t, w, wb, arrows);
  ObstructionChain out;
  out.chain = GF2Vector(regions.size());
  out.audit.resize(regions.size());
  for (const RegionBoundary& r : regions) {
    auto& audit = out.audit[r.edge_class];
    int first = 0, second = 0;
    for (const auto& vp : r.vertices) {
      if (vp.quadrant == RegionBoundary::other) continue;
      int v = vp.arrow_agree > 0 ? 1 : 3;
      audit.first_type.push_back(v);
      first += v;
    }
    for (const auto& ep : r.edges) {
      audit.second_type.push_back(ep.contribution);
      second += ep.contribution;
    }
    if (first % 2 != 0) throw std::logic_error("arrow contribution sum left the Z/2 subgroup");
    if (second % 2 != 0) throw std::logic_error("strand contribution sum left the Z/2 subgroup");
    audit.total = (2 + first + second) % 4;
    out.chain.set(r.edge_class, GWeight{audit.total}.z2());
  }
  return out;
}

ObstructionChain alpha_spine(const Triangulation& t, const PreBranching& w,
                             const WeakBranching& wb) {
  return alpha_spine_with(t, w, wb, frozen_arrow_table());
}

int alpha_fundamental(const Triangulation& t, const PreBranching& w, const WeakBranching& wb) {
  return static_cast<int>(alpha_bar(t, w, wb).chain.popcount() % 2);
}

SpinSolution solve_spin(const Triangulation& t, const PreBranching& w, const WeakBranching& wb) {
  SpinSolution out;
  out.alpha = alpha_bar(t, w, wb).chain;

  GF2Matrix d2 = boundary_matrix(t, 2);
  GF2Solution sol = gf2_solve(d2, out.alpha);
  if (!sol.feasible)
    throw std::logic_error("obstruction is not a coboundary; this contradicts the theory");
  out.particular = sol.particular;
  out.kernel = sol.kernel;

  // Representatives of ker d2 modulo im d3: grow a basis of the quotient by
  // keeping kernel vectors independent from the boundary image.
  GF2Matrix d3 = boundary_matrix(t, 3);
  GF2Matrix d3t = d3.transpose();  // rows are now images of single tetrahedra
  std::vector<GF2Vector> span;
  for (std::size_t r = 0; r < d3t.rows(); ++r)
    if (!d3t.row(r).is_zero()) span.push_back(d3t.row(r));
  for (const GF2Vector& k : out.kernel) {
    if (!gf2_in_span(span, k)) {
      out.quotient_basis.push_back(k);
      span.push_back(k);
    }
  }

  if (out.quotient_basis.size() > 20)
    throw std::runtime_error("spin class count exceeds enumeration guard");
  out.class_count = std::size_t{1} << out.quotient_basis.size();
  for (std::size_t mask = 0; mask < out.class_count; ++mask) {
    GF2Vector beta = out.particular;
    for (std::size_t j = 0; j < out.quotient_basis.size(); ++j)
      if (mask >> j & 1) beta ^= out.quotient_basis[j];
    out.classes.push_back(SpinDescriptor{t, w, wb, beta});
  }
  return out;
}

bool spin_equal(const SpinDescriptor& d0, const SpinDescriptor& d1) {
  if (serialize_triangulation(d0.t) != serialize_triangulation(d1.t) ||
      !(d0.omega == d1.omega))
    throw std::invalid_argument("descriptors live on different base data");
  GF2Vector diff = d0.beta;
  diff ^= d1.beta;
  GF2Matrix d3 = boundary_matrix(d0.t, 3);
  GF2Matrix d3t = d3.transpose();
  std::vector<GF2Vector> image;
  for (std::size_t r = 0; r < d3t.rows(); ++r) image.push_back(d3t.row(r));
  return gf2_in_span(image, diff);
}

SemiDirect semidirect_identity() { return SemiDirect{}; }

SemiDirect semidirect_mul(const SemiDirect& x, const SemiDirect& y) {
  SemiDirect out;
  out.eta = compose(x.eta, y.eta);  // y acts first on coordinates
  for (int i = 0; i < 3; ++i) out.g[i] = (x.g[y.eta(i)] + y.g[i]) % 4;
  return out;
}

std::array<int, 3> s_table(const Perm3& eta) {
  // Doubled values; rows follow the fixed enumeration order of all_perm3.
  static const std::array<std::array<int, 3>, 6> values = {{
      {0, 0, 0},  // identity
      {3, 3, 2},  // (012)
      {2, 1, 1},  // (021)
      {3, 1, 0},  // (01)
      {0, 3, 1},  // (12)
      {2, 0, 2},  // (02)
  }};
  return values[perm3_index(eta)];
}

std::array<int, 3> s_table_alternate(const Perm3& eta) {
  static const std::array<std::array<int, 3>, 6> values = {{
      {0, 0, 0},
      {3, 3, 2},
      {2, 1, 1},
      {1, 3, 2},  // (01)
      {2, 1, 3},  // (12)
      {0, 2, 0},  // (02)
  }};
  return values[perm3_index(eta)];
}

SemiDirect psi(const Perm3& eta) { return SemiDirect{eta, s_table(eta)}; }

SemiDirect psi_alternate(const Perm3& eta) { return SemiDirect{eta, s_table_alternate(eta)}; }

}  // namespace spinscape
