#include "spinscape/moves.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "spinscape/homology.hpp"
#include "spinscape/sweep.hpp"

namespace spinscape {

std::string move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::I: return "I";
    case MoveKind::Ibar: return "Ibar";
    case MoveKind::II: return "II";
    case MoveKind::IIbar: return "IIbar";
    case MoveKind::III: return "III";
    case MoveKind::M: return "M";
    case MoveKind::Mbar: return "Mbar";
    case MoveKind::N: return "N";
    case MoveKind::Nbar: return "Nbar";
    case MoveKind::circuit: return "circuit";
    case MoveKind::under_circuit: return "undercircuit";
    case MoveKind::coboundary: return "coboundary";
    case MoveKind::bubble: return "bubble";
    case MoveKind::move23: return "move23";
    case MoveKind::move32: return "move32";
    case MoveKind::normalize: return "normalize";
  }
  throw std::logic_error("unknown move kind");
}

namespace {

TetBranching shift_left(const TetBranching& b) {
  return make_branching({b.order[1], b.order[2], b.order[3], b.order[0]});
}

TetBranching shift_right(const TetBranching& b) {
  return make_branching({b.order[3], b.order[0], b.order[1], b.order[2]});
}

TetBranching rotate2(const TetBranching& b) {
  return make_branching({b.order[2], b.order[3], b.order[0], b.order[1]});
}

TetBranching swap_roles(const TetBranching& b, int r0, int r1) {
  std::array<int, 4> o = b.order;
  std::swap(o[r0], o[r1]);
  return make_branching(o);
}

GF2Vector alpha_of(const SpinDescriptor& s) { return alpha_bar(s.t, s.omega, s.b).chain; }

void check_state(const SpinDescriptor& s) {
  if (!weak_branching_valid(s.t, s.b) || !(s.b.omega == s.omega))
    throw std::invalid_argument("state branching is not valid for its flow");
  if (!(boundary_matrix(s.t, 2).apply(s.beta) == alpha_of(s)))
    throw std::invalid_argument("state weights do not solve the obstruction ledger");
}

// The resting shape normalize_edge leaves behind: no color, no weight, both
// germs over, and the flow does not run from a +1 tet into a -1 tet.
bool pairing_normalized(const SpinDescriptor& s, int p) {
  const FacePairing& fp = s.t.pairings[p];
  auto over_at = [&](int tet, int face) {
    auto ov = over_faces(s.b.tet[tet]);
    return face == ov[0] || face == ov[1];
  };
  int v0 = s.omega.dir[p] == 0 ? fp.src_tet : fp.dst_tet;
  int v1 = s.omega.dir[p] == 0 ? fp.dst_tet : fp.src_tet;
  return edge_color_along_omega(s.t, s.omega, s.b, p) == EdgeColor::empty && !s.beta.get(p) &&
         over_at(fp.src_tet, fp.src_face) && over_at(fp.dst_tet, fp.dst_face) &&
         !(s.b.tet[v0].index == +1 && s.b.tet[v1].index == -1);
}

// Completes a non-structural step: transported weights, validity and the
// coboundary certificate.
MoveStep finish_step(const SpinDescriptor& before, MoveKind kind, std::vector<int> target,
                     PreBranching omega2, WeakBranching b2, const GF2Vector& delta_beta) {
  MoveStep st;
  st.kind = kind;
  st.target = std::move(target);
  b2.omega = omega2;
  if (!weak_branching_valid(before.t, b2))
    throw std::logic_error(move_kind_name(kind) + " produced an invalid branching");
  st.after.t = before.t;
  st.after.omega = std::move(omega2);
  st.after.b = std::move(b2);
  st.after.beta = before.beta ^ delta_beta;
  st.delta_beta = delta_beta;
  GF2Vector da = alpha_of(st.after) ^ alpha_of(before);
  if (!(boundary_matrix(before.t, 2).apply(delta_beta) == da))
    throw std::logic_error(move_kind_name(kind) + " failed its coboundary certificate");
  return st;
}

MoveStep shift_move(const SpinDescriptor& s, int tet, bool left, MoveKind kind, int need_index) {
  if (tet < 0 || tet >= s.t.n_tets) throw std::invalid_argument("tet id out of range");
  const TetBranching& b = s.b.tet[tet];
  if (b.index != need_index)
    throw std::invalid_argument(move_kind_name(kind) + " needs a vertex of index " +
                                (need_index < 0 ? std::string("-1") : std::string("+1")));
  WeakBranching b2 = s.b;
  b2.tet[tet] = left ? shift_left(b) : shift_right(b);
  TriIndex idx(s.t);
  GF2Vector db(s.t.pairings.size());
  db.flip(idx.at(tet, b.order[left ? 0 : 3]).pairing);
  return finish_step(s, kind, {tet}, s.omega, std::move(b2), db);
}

int flow_tail_germ(const Triangulation& t, const PreBranching& w, int p) {
  const FacePairing& fp = t.pairings[p];
  return w.dir[p] == 0 ? fp.src_tet * 4 + fp.src_face : fp.dst_tet * 4 + fp.dst_face;
}

int flow_head_germ(const Triangulation& t, const PreBranching& w, int p) {
  const FacePairing& fp = t.pairings[p];
  return w.dir[p] == 0 ? fp.dst_tet * 4 + fp.dst_face : fp.src_tet * 4 + fp.src_face;
}

// The outgoing and incoming germ of the over (or under) pair of each tet.
struct PassGerms {
  std::vector<int> out_f, in_f;
};

PassGerms pass_germs(const SpinDescriptor& s, bool under) {
  TriIndex idx(s.t);
  PassGerms pg;
  pg.out_f.resize(s.t.n_tets);
  pg.in_f.resize(s.t.n_tets);
  for (int v = 0; v < s.t.n_tets; ++v) {
    auto pr = under ? under_faces(s.b.tet[v]) : over_faces(s.b.tet[v]);
    bool first_out = omega_germ_out(s.t, idx, s.omega, v, pr[0]);
    pg.out_f[v] = first_out ? pr[0] : pr[1];
    pg.in_f[v] = first_out ? pr[1] : pr[0];
  }
  return pg;
}

std::vector<std::vector<int>> flow_circuits(const SpinDescriptor& s, bool under) {
  TriIndex idx(s.t);
  PassGerms pg = pass_germs(s, under);
  std::vector<std::vector<int>> res;
  std::set<int> used;
  for (int v0 = 0; v0 < s.t.n_tets; ++v0) {
    int p0 = idx.at(v0, pg.out_f[v0]).pairing;
    if (used.count(p0)) continue;
    std::vector<int> cyc;
    std::set<int> seen;
    int p = p0;
    bool ok = true;
    while (true) {
      if (seen.count(p)) {
        ok = false;
        break;
      }
      seen.insert(p);
      cyc.push_back(p);
      int hg = flow_head_germ(s.t, s.omega, p);
      if (hg % 4 != pg.in_f[hg / 4]) {
        ok = false;
        break;
      }
      p = idx.at(hg / 4, pg.out_f[hg / 4]).pairing;
      if (p == p0) break;
    }
    if (!ok || cyc.empty()) continue;
    int hg = flow_head_germ(s.t, s.omega, cyc.back());
    if (hg / 4 != v0 || hg % 4 != pg.in_f[v0]) continue;
    for (int q : cyc) used.insert(q);
    res.push_back(std::move(cyc));
  }
  return res;
}

// Validates that gamma is a simple circuit entering every visited tet by its
// over-in (or under-in) germ and leaving by the over-out (under-out) one, and
// returns the visited tets.
std::set<int> check_circuit(const SpinDescriptor& s, const std::vector<int>& gamma, bool under) {
  if (gamma.empty()) throw std::invalid_argument("empty circuit");
  TriIndex idx(s.t);
  PassGerms pg = pass_germs(s, under);
  std::set<int> pair_set(gamma.begin(), gamma.end());
  if (pair_set.size() != gamma.size()) throw std::invalid_argument("circuit repeats a pairing");
  std::set<int> tets;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    int p = gamma[i];
    if (p < 0 || p >= int(s.t.pairings.size()))
      throw std::invalid_argument("circuit pairing out of range");
    int tg = flow_tail_germ(s.t, s.omega, p);
    int hg = flow_head_germ(s.t, s.omega, p);
    if (tg % 4 != pg.out_f[tg / 4] || hg % 4 != pg.in_f[hg / 4])
      throw std::invalid_argument("circuit does not follow the " +
                                  std::string(under ? "under" : "over") + " pair flow");
    int nt = flow_tail_germ(s.t, s.omega, gamma[(i + 1) % gamma.size()]) / 4;
    if (nt != hg / 4) throw std::invalid_argument("circuit pairings do not chain up");
    if (!tets.insert(hg / 4).second) throw std::invalid_argument("circuit revisits a tet");
  }
  return tets;
}

MoveStep circuit_rewrite(const SpinDescriptor& s, const std::vector<int>& gamma, bool under) {
  std::set<int> tets = check_circuit(s, gamma, under);
  PreBranching w2 = s.omega;
  WeakBranching b2 = s.b;
  for (int p : gamma) w2.dir[p] ^= 1;
  for (int v : tets) b2.tet[v] = under ? swap_roles(s.b.tet[v], 0, 1) : swap_roles(s.b.tet[v], 2, 3);
  GF2Vector db(s.t.pairings.size());
  for (int p : gamma) {
    const FacePairing& fp = s.t.pairings[p];
    if (s.b.tet[fp.src_tet].index != s.b.tet[fp.dst_tet].index) db.flip(p);
  }
  std::vector<int> target(gamma);
  return finish_step(s, under ? MoveKind::under_circuit : MoveKind::circuit, std::move(target),
                     std::move(w2), std::move(b2), db);
}

}  // namespace

MoveStep move_I(const SpinDescriptor& s, int tet) {
  check_state(s);
  return shift_move(s, tet, true, MoveKind::I, -1);
}

MoveStep move_Ibar(const SpinDescriptor& s, int tet) {
  check_state(s);
  return shift_move(s, tet, false, MoveKind::Ibar, +1);
}

MoveStep move_II(const SpinDescriptor& s, int tet) {
  check_state(s);
  return shift_move(s, tet, false, MoveKind::II, -1);
}

MoveStep move_IIbar(const SpinDescriptor& s, int tet) {
  check_state(s);
  return shift_move(s, tet, true, MoveKind::IIbar, +1);
}

MoveStep move_III(const SpinDescriptor& s, int tet) {
  check_state(s);
  if (tet < 0 || tet >= s.t.n_tets) throw std::invalid_argument("tet id out of range");
  const TetBranching& b = s.b.tet[tet];
  WeakBranching b2 = s.b;
  b2.tet[tet] = rotate2(b);
  TriIndex idx(s.t);
  GF2Vector db(s.t.pairings.size());
  auto ov = over_faces(b);
  db.flip(idx.at(tet, ov[0]).pairing);
  db.flip(idx.at(tet, ov[1]).pairing);
  return finish_step(s, MoveKind::III, {tet}, s.omega, std::move(b2), db);
}

MoveStep move_coboundary(const SpinDescriptor& s, int tet) {
  check_state(s);
  if (tet < 0 || tet >= s.t.n_tets) throw std::invalid_argument("tet id out of range");
  TriIndex idx(s.t);
  GF2Vector db(s.t.pairings.size());
  for (int f = 0; f < 4; ++f) db.flip(idx.at(tet, f).pairing);
  return finish_step(s, MoveKind::coboundary, {tet}, s.omega, s.b, db);
}

std::vector<std::vector<int>> over_circuits(const SpinDescriptor& s) {
  return flow_circuits(s, false);
}

std::vector<std::vector<int>> under_circuits(const SpinDescriptor& s) {
  return flow_circuits(s, true);
}

MoveStep circuit_move(const SpinDescriptor& s, const std::vector<int>& gamma) {
  check_state(s);
  return circuit_rewrite(s, gamma, false);
}

MoveStep under_circuit_move(const SpinDescriptor& s, const std::vector<int>& gamma) {
  check_state(s);
  return circuit_rewrite(s, gamma, true);
}

std::vector<MoveStep> multi_circuit_move(const SpinDescriptor& s,
                                         const std::vector<TaggedCircuit>& gammas) {
  check_state(s);
  std::set<int> all_pairings;
  std::map<int, int> over_count, under_count;
  for (const auto& g : gammas) {
    std::set<int> tets = check_circuit(s, g.pairings, g.under);
    for (int p : g.pairings)
      if (!all_pairings.insert(p).second)
        throw std::invalid_argument("circuits share a pairing");
    for (int v : tets) {
      int& c = g.under ? under_count[v] : over_count[v];
      if (++c > 1)
        throw std::invalid_argument("two circuits of the same kind cross one tet");
    }
  }
  std::vector<MoveStep> steps;
  SpinDescriptor cur = s;
  for (const auto& g : gammas) {
    steps.push_back(circuit_rewrite(cur, g.pairings, g.under));
    cur = steps.back().after;
  }
  return steps;
}

std::string passage_row_name(PassageRow r) {
  switch (r) {
    case PassageRow::empty_along: return "empty-along";
    case PassageRow::empty_io_right: return "empty-in-out-right";
    case PassageRow::empty_io_left: return "empty-in-out-left";
    case PassageRow::plus_in: return "plus-in";
    case PassageRow::plus_out: return "plus-out";
    case PassageRow::plus_io: return "plus-in-out";
    case PassageRow::minus_in: return "minus-in";
    case PassageRow::minus_out: return "minus-out";
    case PassageRow::minus_io: return "minus-in-out";
  }
  throw std::logic_error("unknown passage row");
}

int passage_entry(PassageRow row, int eps_tail, int eps_head) {
  switch (row) {
    case PassageRow::empty_along:
      return 0;
    case PassageRow::plus_in:
    case PassageRow::minus_in:
      return eps_tail == +1 ? 1 : 0;
    case PassageRow::plus_out:
    case PassageRow::minus_out:
      return eps_head == +1 ? 1 : 0;
    default:
      return eps_tail != eps_head ? 1 : 0;
  }
}

std::vector<CircuitPassage> classify_circuit_passages(const SpinDescriptor& s,
                                                      const std::vector<int>& gamma) {
  check_state(s);
  check_circuit(s, gamma, false);
  std::set<int> on(gamma.begin(), gamma.end());
  std::vector<CircuitPassage> out;
  auto regions = region_boundaries(s.t, s.omega, s.b, frozen_arrow_table());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (const auto& ep : regions[r].edges) {
      if (!on.count(ep.pairing)) continue;
      const FacePairing& fp = s.t.pairings[ep.pairing];
      EdgeTypeResult ty = classify_edge_type(fp, s.b.tet[fp.src_tet], s.b.tet[fp.dst_tet]);
      Perm3 flow_perm = s.omega.dir[ep.pairing] == 0 ? ty.perm : ty.perm.inverse();
      EdgeColor col = edge_color_along_omega(s.t, s.omega, s.b, ep.pairing);
      int slot = ep.first_label;
      bool bwd = slot == 0;
      bool fwd = flow_perm.img[slot] == 0;
      CircuitPassage cp;
      cp.region = int(r);
      cp.pairing = ep.pairing;
      cp.eps_tail = s.b.tet[flow_tail_germ(s.t, s.omega, ep.pairing) / 4].index;
      cp.eps_head = s.b.tet[flow_head_germ(s.t, s.omega, ep.pairing) / 4].index;
      if (col == EdgeColor::empty) {
        cp.row = (fwd && bwd) ? PassageRow::empty_along
                              : (slot == 1 ? PassageRow::empty_io_right : PassageRow::empty_io_left);
      } else if (col == EdgeColor::plus) {
        cp.row = fwd && !bwd ? PassageRow::plus_in
                             : (bwd && !fwd ? PassageRow::plus_out : PassageRow::plus_io);
      } else {
        cp.row = fwd && !bwd ? PassageRow::minus_in
                             : (bwd && !fwd ? PassageRow::minus_out : PassageRow::minus_io);
      }
      out.push_back(cp);
    }
  }
  return out;
}

std::vector<MoveStep> normalize_edge(const SpinDescriptor& s, int pairing) {
  check_state(s);
  if (pairing < 0 || pairing >= int(s.t.pairings.size()))
    throw std::invalid_argument("pairing id out of range");
  const FacePairing& fp = s.t.pairings[pairing];
  if (fp.src_tet == fp.dst_tet)
    throw std::invalid_argument("cannot normalize a pairing joining a tet to itself");

  std::vector<MoveStep> steps;
  SpinDescriptor cur = s;
  auto push = [&](MoveStep st) {
    cur = st.after;
    steps.push_back(std::move(st));
  };
  auto is_over = [&](int tet, int face) {
    auto ov = over_faces(cur.b.tet[tet]);
    return face == ov[0] || face == ov[1];
  };

  // Rotations turn underpasses into overpasses, lower tet id first.
  for (int tet : {std::min(fp.src_tet, fp.dst_tet), std::max(fp.src_tet, fp.dst_tet)}) {
    int face = tet == fp.src_tet ? fp.src_face : fp.dst_face;
    if (!is_over(tet, face)) push(move_III(cur, tet));
  }

  // Shifts at the flow tail V0 and head V1 clear the color.
  int v0 = cur.omega.dir[pairing] == 0 ? fp.src_tet : fp.dst_tet;
  int v1 = cur.omega.dir[pairing] == 0 ? fp.dst_tet : fp.src_tet;
  EdgeColor col = edge_color_along_omega(cur.t, cur.omega, cur.b, pairing);
  int e0 = cur.b.tet[v0].index, e1 = cur.b.tet[v1].index;
  if (col == EdgeColor::plus) {
    if (e0 == -1 && e1 == -1) {
      push(move_I(cur, v0));
      push(move_II(cur, v1));
    } else if (e0 == -1 && e1 == +1) {
      push(move_IIbar(cur, v1));
    } else {
      push(move_Ibar(cur, v0));
    }
  } else if (col == EdgeColor::minus) {
    if (e0 == +1 && e1 == +1) {
      push(move_Ibar(cur, v0));
      push(move_IIbar(cur, v1));
    } else if (e0 == +1 && e1 == -1) {
      push(move_II(cur, v1));
    } else {
      push(move_I(cur, v0));
    }
  }
  if (edge_color_along_omega(cur.t, cur.omega, cur.b, pairing) != EdgeColor::empty)
    throw std::logic_error("normalization did not clear the color");

  // The index pair (+1, -1) is traded for (-1, +1).
  if (cur.b.tet[v0].index == +1 && cur.b.tet[v1].index == -1) {
    push(move_Ibar(cur, v0));
    push(move_II(cur, v1));
  }

  // A coboundary at V0 clears the weight.
  if (cur.beta.get(pairing)) push(move_coboundary(cur, v0));

  if (edge_color_along_omega(cur.t, cur.omega, cur.b, pairing) != EdgeColor::empty ||
      cur.beta.get(pairing) || !is_over(fp.src_tet, fp.src_face) ||
      !is_over(fp.dst_tet, fp.dst_face) ||
      (cur.b.tet[v0].index == +1 && cur.b.tet[v1].index == -1))
    throw std::logic_error("normalization postcondition failed");
  return steps;
}

std::vector<std::vector<int>> applicable_sites(const SpinDescriptor& s, MoveKind k) {
  std::vector<std::vector<int>> sites;
  auto tets_of_index = [&](int want) {
    for (int v = 0; v < s.t.n_tets; ++v)
      if (want == 0 || s.b.tet[v].index == want) sites.push_back({v});
  };
  switch (k) {
    case MoveKind::I:
    case MoveKind::II:
    case MoveKind::M:
    case MoveKind::N:
      tets_of_index(-1);
      break;
    case MoveKind::Ibar:
    case MoveKind::IIbar:
    case MoveKind::Mbar:
    case MoveKind::Nbar:
      tets_of_index(+1);
      break;
    case MoveKind::III:
    case MoveKind::coboundary:
      tets_of_index(0);
      break;
    case MoveKind::circuit:
      return over_circuits(s);
    case MoveKind::under_circuit:
      return under_circuits(s);
    case MoveKind::normalize:
      for (std::size_t p = 0; p < s.t.pairings.size(); ++p)
        if (s.t.pairings[p].src_tet != s.t.pairings[p].dst_tet) sites.push_back({int(p)});
      break;
    case MoveKind::bubble:
      for (std::size_t p = 0; p < s.t.pairings.size(); ++p) sites.push_back({int(p)});
      break;
    case MoveKind::move23:
      for (std::size_t p = 0; p < s.t.pairings.size(); ++p) {
        const FacePairing& fp = s.t.pairings[p];
        if (fp.src_tet != fp.dst_tet && pairing_normalized(s, int(p))) sites.push_back({int(p)});
      }
      break;
    case MoveKind::move32: {
      for (const auto& cls : compute_edge_classes(s.t)) {
        if (cls.fiber.size() != 3) continue;
        std::set<int> tets;
        for (const auto& e : cls.fiber) tets.insert(e.tet);
        if (tets.size() == 3) sites.push_back({cls.id});
      }
      break;
    }
  }
  return sites;
}

namespace {

int swap_row(MoveKind k) {
  switch (k) {
    case MoveKind::M: return 0;
    case MoveKind::Mbar: return 1;
    case MoveKind::N: return 2;
    case MoveKind::Nbar: return 3;
    default: throw std::logic_error("not a swap move");
  }
}

LocalLayer layer_with(MoveKind k, const TetBranching& b, const SwapDecorations& sd) {
  LocalLayer L;
  auto need = [&](int want) {
    if (b.index != want)
      throw std::invalid_argument(move_kind_name(k) + " needs a vertex of index " +
                                  (want < 0 ? std::string("-1") : std::string("+1")));
  };
  const Perm3 plus = perm3_cycle012(), minus = perm3_cycle021();
  switch (k) {
    case MoveKind::I:
    case MoveKind::IIbar: {
      need(k == MoveKind::I ? -1 : +1);
      L.after = shift_left(b);
      for (int f = 0; f < 4; ++f) L.relabel[f] = minus;
      L.relabel[b.order[0]] = Perm3{};
      L.weight2x[b.order[0]] = 2;
      break;
    }
    case MoveKind::II:
    case MoveKind::Ibar: {
      need(k == MoveKind::II ? -1 : +1);
      L.after = shift_right(b);
      for (int f = 0; f < 4; ++f) L.relabel[f] = plus;
      L.relabel[b.order[3]] = Perm3{};
      L.weight2x[b.order[3]] = 2;
      break;
    }
    case MoveKind::III: {
      L.after = rotate2(b);
      L.relabel[b.order[0]] = L.relabel[b.order[1]] = minus;
      L.relabel[b.order[2]] = L.relabel[b.order[3]] = plus;
      L.weight2x[b.order[0]] = L.weight2x[b.order[1]] = 2;
      break;
    }
    case MoveKind::M:
    case MoveKind::Mbar:
    case MoveKind::N:
    case MoveKind::Nbar: {
      need(k == MoveKind::M || k == MoveKind::N ? -1 : +1);
      bool over = k == MoveKind::M || k == MoveKind::Mbar;
      L.after = over ? swap_roles(b, 2, 3) : swap_roles(b, 0, 1);
      int row = swap_row(k);
      for (int j = 0; j < 4; ++j) {
        int f = b.order[j];
        bool flipped = over ? j <= 1 : j >= 2;
        L.flip[f] = flipped;
        L.relabel[f] = flipped ? (over ? perm3_swap(1, 2) : perm3_swap(0, 1)) : Perm3{};
        L.weight2x[f] = sd.weight2x[row][j];
        L.iorient[f] = sd.iorient[row][j];
      }
      break;
    }
    default:
      throw std::invalid_argument(move_kind_name(k) + " is not an elementary weighted move");
  }
  return L;
}

bool trivial_stretch(const Subedge& s) {
  return !s.odd() && s.perm.is_identity() && s.weight2x == 0;
}

DecoratedGraph splice_with(const DecoratedGraph& g, int vertex, MoveKind k,
                           const SwapDecorations& sd) {
  if (vertex < 0 || vertex >= int(g.vertices.size()))
    throw std::invalid_argument("vertex id out of range");
  LocalLayer L = layer_with(k, g.vertices[vertex].branching, sd);
  DecoratedGraph r = g;
  for (auto& e : r.edges) {
    if (e.tail.vertex == vertex) {
      int f = e.tail.germ;
      Subedge s;
      int prior = e.parts.front().tail_or;
      s.head_or = prior;
      s.tail_or = L.flip[f] ? -prior : prior;
      s.perm = L.relabel[f].inverse();
      s.weight2x = L.weight2x[f];
      s.iorient = L.iorient[f];
      if (!trivial_stretch(s)) e.parts.insert(e.parts.begin(), s);
    }
    if (e.head.vertex == vertex) {
      int f = e.head.germ;
      Subedge s;
      int prior = e.parts.back().head_or;
      s.tail_or = prior;
      s.head_or = L.flip[f] ? -prior : prior;
      s.perm = L.relabel[f];
      s.weight2x = L.weight2x[f];
      s.iorient = -L.iorient[f];
      if (!trivial_stretch(s)) e.parts.push_back(s);
    }
  }
  r.vertices[vertex].branching = L.after;
  r.vertices[vertex].index = L.after.index;
  return r;
}

void apply_local_with(GermStubs& st, MoveKind k, const SwapDecorations& sd) {
  LocalLayer L = layer_with(k, st.b, sd);
  for (int f = 0; f < 4; ++f) {
    Subedge s;
    s.head_or = st.dir[f];
    int nd = L.flip[f] ? -st.dir[f] : st.dir[f];
    s.tail_or = nd;
    s.perm = L.relabel[f].inverse();
    s.weight2x = L.weight2x[f];
    s.iorient = L.iorient[f];
    if (!trivial_stretch(s)) st.chain[f].insert(st.chain[f].begin(), s);
    st.dir[f] = nd;
  }
  st.b = L.after;
}

std::optional<Subedge> fuse_some_order(std::vector<Subedge> parts) {
  if (parts.size() == 1) return parts[0];
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    std::optional<Subedge> joined;
    try {
      joined = fuse_A_weighted(parts[i], parts[i + 1]);
    } catch (const TriError&) {
      continue;
    }
    std::vector<Subedge> next(parts.begin(), parts.begin() + i);
    next.push_back(*joined);
    next.insert(next.end(), parts.begin() + i + 2, parts.end());
    if (auto r = fuse_some_order(std::move(next))) return r;
  }
  return std::nullopt;
}

std::optional<Subedge> robust_fuse(const std::vector<Subedge>& parts) {
  if (parts.empty()) return std::nullopt;
  try {
    return fuse_chain(parts);
  } catch (const TriError&) {
  }
  return fuse_some_order(parts);
}

bool stubs_equivalent_fused(const GermStubs& a, const GermStubs& b) {
  if (!(a.b == b.b) || a.b.index != b.b.index || a.dir != b.dir) return false;
  std::array<Subedge, 4> fa, fb;
  for (int f = 0; f < 4; ++f) {
    auto x = robust_fuse(a.chain[f]), y = robust_fuse(b.chain[f]);
    if (!x || !y) return false;
    fa[f] = *x;
    fb[f] = *y;
    if (fa[f].tail_or != fb[f].tail_or || fa[f].head_or != fb[f].head_or ||
        fa[f].iorient != fb[f].iorient || !(fa[f].perm == fb[f].perm))
      return false;
  }
  for (int shift : {0, 2}) {
    bool all = true;
    for (int f = 0; f < 4; ++f) all = all && (fa[f].weight2x + shift) % 4 == fb[f].weight2x;
    if (all) return true;
  }
  return false;
}

bool words_equal_with(const std::vector<MoveKind>& lhs, const std::vector<MoveKind>& rhs,
                      int index, const SwapDecorations& sd) {
  for (const TetBranching& b : enumerate_tet_branchings()) {
    if (b.index != index) continue;
    GermStubs s1 = stubs_identity(b), s2 = stubs_identity(b);
    try {
      for (MoveKind k : lhs) apply_local_with(s1, k, sd);
      for (MoveKind k : rhs) apply_local_with(s2, k, sd);
    } catch (const std::invalid_argument&) {
      return false;
    }
    if (!stubs_equivalent_fused(s1, s2)) return false;
  }
  return true;
}

}  // namespace

SwapDecorations frozen_swap_decorations() {
  // Lex-least of the two derivation survivors; the other is its mirror under
  // swapping the half weights 1/2 and -1/2 on every flipped face.
  SwapDecorations sd;
  sd.weight2x = {{{1, 3, 0, 0}, {1, 3, 0, 0}, {0, 0, 1, 3}, {0, 0, 1, 3}}};
  sd.iorient = {{{1, -1, 0, 0}, {-1, 1, 0, 0}, {0, 0, 1, -1}, {0, 0, -1, 1}}};
  return sd;
}

LocalLayer weighted_layer(MoveKind k, const TetBranching& b) {
  return layer_with(k, b, frozen_swap_decorations());
}

DecoratedGraph apply_weighted_move(const DecoratedGraph& g, int vertex, MoveKind k) {
  return splice_with(g, vertex, k, frozen_swap_decorations());
}

DecoratedGraph apply_weighted_word(const DecoratedGraph& g, int vertex,
                                   const std::vector<MoveKind>& word) {
  DecoratedGraph cur = g;
  for (MoveKind k : word) cur = apply_weighted_move(cur, vertex, k);
  return cur;
}

GermStubs stubs_identity(const TetBranching& b) {
  GermStubs st;
  st.b = b;
  auto out = out_pattern(b);
  for (int f = 0; f < 4; ++f) {
    st.dir[f] = out[f] ? +1 : -1;
    Subedge s;
    s.tail_or = s.head_or = st.dir[f];
    st.chain[f] = {s};
  }
  return st;
}

void apply_local(GermStubs& st, MoveKind k) {
  apply_local_with(st, k, frozen_swap_decorations());
}

bool stubs_equivalent(const GermStubs& a, const GermStubs& b) {
  return stubs_equivalent_fused(a, b);
}

bool local_words_equal(const std::vector<MoveKind>& lhs, const std::vector<MoveKind>& rhs,
                       int index) {
  return words_equal_with(lhs, rhs, index, frozen_swap_decorations());
}

std::vector<RelationCheck> move_relations() {
  using K = MoveKind;
  return {
      {{K::I, K::Ibar}, {}, -1},
      {{K::Ibar, K::I}, {}, +1},
      {{K::II, K::IIbar}, {}, -1},
      {{K::IIbar, K::II}, {}, +1},
      {{K::M, K::Mbar}, {}, -1},
      {{K::Mbar, K::M}, {}, +1},
      {{K::N, K::Nbar}, {}, -1},
      {{K::Nbar, K::N}, {}, +1},
      {{K::III, K::M}, {K::N, K::III}, -1},
      {{K::III, K::Mbar}, {K::Nbar, K::III}, +1},
      {{K::M, K::Nbar}, {K::N, K::Mbar}, -1},
      {{K::Mbar, K::N}, {K::Nbar, K::M}, +1},
      {{K::III}, {K::I, K::IIbar}, -1},
      {{K::III}, {K::II, K::Ibar}, -1},
      {{K::III}, {K::Ibar, K::II}, +1},
      {{K::III}, {K::IIbar, K::I}, +1},
  };
}

namespace {

std::string stub_signature(const std::vector<MoveKind>& word) {
  std::ostringstream os;
  for (const TetBranching& b : enumerate_tet_branchings()) {
    if (b.index != -1) continue;
    GermStubs st = stubs_identity(b);
    for (MoveKind k : word) apply_local(st, k);
    std::array<Subedge, 4> fz;
    for (int f = 0; f < 4; ++f) {
      auto r = robust_fuse(st.chain[f]);
      if (!r) throw std::logic_error("closure word does not fuse");
      fz[f] = *r;
    }
    // weight class representative: the lex smaller of the two coboundary shifts
    std::array<int, 4> w0, w1;
    for (int f = 0; f < 4; ++f) {
      w0[f] = fz[f].weight2x;
      w1[f] = (fz[f].weight2x + 2) % 4;
    }
    if (w1 < w0) w0 = w1;
    os << 'B';
    for (int f = 0; f < 4; ++f) os << st.b.order[f];
    for (int f = 0; f < 4; ++f)
      os << '|' << fz[f].tail_or << ',' << fz[f].head_or << ',' << fz[f].iorient << ','
         << perm3_index(fz[f].perm) << ',' << w0[f];
    os << ';';
  }
  return os.str();
}

}  // namespace

std::size_t pi_minus_closure() {
  using K = MoveKind;
  const std::vector<K> alpha = {K::III};
  const std::vector<K> beta = {K::I, K::Mbar};
  auto thrice = [](const std::vector<K>& a) {
    std::vector<K> w;
    for (int i = 0; i < 3; ++i) w.insert(w.end(), a.begin(), a.end());
    return w;
  };
  std::vector<K> alphabeta = alpha;
  alphabeta.insert(alphabeta.end(), beta.begin(), beta.end());
  if (!local_words_equal({K::III, K::III}, {}, -1))
    throw std::logic_error("alpha squared is not trivial");
  if (!local_words_equal(thrice(beta), {}, -1)) throw std::logic_error("beta cubed is not trivial");
  if (!local_words_equal(thrice(alphabeta), {}, -1))
    throw std::logic_error("alpha beta cubed is not trivial");
  if (!local_words_equal(alphabeta, {K::II, K::Mbar}, -1))
    throw std::logic_error("alpha beta does not collapse to II then Mbar");

  std::map<std::string, std::vector<K>> seen;
  std::vector<std::vector<K>> queue = {{}};
  seen[stub_signature({})] = {};
  while (!queue.empty()) {
    std::vector<K> w = queue.back();
    queue.pop_back();
    for (const auto& gen : {alpha, beta}) {
      std::vector<K> nxt = w;
      nxt.insert(nxt.end(), gen.begin(), gen.end());
      std::string sig = stub_signature(nxt);
      if (seen.emplace(sig, nxt).second) queue.push_back(nxt);
    }
  }
  return seen.size();
}

std::vector<SwapDecorations> derive_swap_decorations() {
  struct Cand {
    std::array<int, 4> w{};   // by role
    std::array<int, 4> io{};  // by role
  };
  auto enumerate_cands = [](bool over) {
    std::vector<Cand> out;
    int fa = over ? 0 : 2, fb = over ? 1 : 3;
    int ea = over ? 2 : 0, eb = over ? 3 : 1;
    for (int wa : {1, 3})
      for (int ia : {-1, 1})
        for (int wb : {1, 3})
          for (int ib : {-1, 1})
            for (int wc : {0, 2})
              for (int wd : {0, 2}) {
                Cand c;
                c.w[fa] = wa;
                c.io[fa] = ia;
                c.w[fb] = wb;
                c.io[fb] = ib;
                c.w[ea] = wc;
                c.w[eb] = wd;
                out.push_back(c);
              }
    return out;
  };
  auto cands_over = enumerate_cands(true), cands_under = enumerate_cands(false);

  auto with_rows = [](const Cand* m, const Cand* mb, const Cand* n, const Cand* nb) {
    SwapDecorations sd;
    const Cand* rows[4] = {m, mb, n, nb};
    for (int r = 0; r < 4; ++r)
      if (rows[r]) {
        sd.weight2x[r] = rows[r]->w;
        sd.iorient[r] = rows[r]->io;
      }
    return sd;
  };

  using K = MoveKind;
  std::vector<std::pair<const Cand*, const Cand*>> m_pairs, n_pairs;
  for (const Cand& a : cands_over)
    for (const Cand& c : cands_over) {
      SwapDecorations sd = with_rows(&a, &c, nullptr, nullptr);
      if (words_equal_with({K::M, K::Mbar}, {}, -1, sd) &&
          words_equal_with({K::Mbar, K::M}, {}, +1, sd))
        m_pairs.push_back({&a, &c});
    }
  for (const Cand& a : cands_under)
    for (const Cand& c : cands_under) {
      SwapDecorations sd = with_rows(nullptr, nullptr, &a, &c);
      if (words_equal_with({K::N, K::Nbar}, {}, -1, sd) &&
          words_equal_with({K::Nbar, K::N}, {}, +1, sd))
        n_pairs.push_back({&a, &c});
    }

  std::vector<SwapDecorations> joint;
  for (const auto& mp : m_pairs)
    for (const auto& np : n_pairs) {
      SwapDecorations sd = with_rows(mp.first, mp.second, np.first, np.second);
      if (words_equal_with({K::III, K::M}, {K::N, K::III}, -1, sd) &&
          words_equal_with({K::III, K::Mbar}, {K::Nbar, K::III}, +1, sd) &&
          words_equal_with({K::M, K::Nbar}, {K::N, K::Mbar}, -1, sd) &&
          words_equal_with({K::Mbar, K::N}, {K::Nbar, K::M}, +1, sd))
        joint.push_back(sd);
    }

  // Circuit generation: reversing a circuit by one swap move per visited tet
  // and fusing must reproduce the direct rewrite. The probe states are
  // synthetic so the derivation needs no input files.
  std::vector<SpinDescriptor> states;
  std::mt19937 rng(9127);
  for (int i = 0; i < 14; ++i) {
    Triangulation t = random_loose_triangulation(1 + i % 3, rng);
    auto st = enumerate_states(t);
    states.insert(states.end(), st.begin(), st.end());
  }

  std::vector<SwapDecorations> out;
  for (const SwapDecorations& sd : joint) {
    bool ok = true;
    for (const SpinDescriptor& s : states) {
      if (!ok) break;
      for (bool under : {false, true}) {
        if (!ok) break;
        for (const auto& gamma : under ? under_circuits(s) : over_circuits(s)) {
          MoveStep direct = under ? under_circuit_move(s, gamma) : circuit_move(s, gamma);
          DecoratedGraph g = graph_of(s.t, s.omega, s.b, &s.beta);
          std::set<int> tets;
          for (int p : gamma) {
            tets.insert(flow_tail_germ(s.t, s.omega, p) / 4);
            tets.insert(flow_head_germ(s.t, s.omega, p) / 4);
          }
          try {
            for (int v : tets) {
              MoveKind k = under ? (s.b.tet[v].index == -1 ? K::N : K::Nbar)
                                 : (s.b.tet[v].index == -1 ? K::M : K::Mbar);
              g = splice_with(g, v, k, sd);
            }
            DecoratedGraph fused = fuse_all_weighted(g);
            GraphState st = state_of(fused);
            bool match = st.omega == direct.after.omega && st.weights == direct.after.beta;
            for (int v = 0; v < s.t.n_tets && match; ++v)
              match = fused.vertices[v].branching == direct.after.b.tet[v];
            if (!match) ok = false;
          } catch (const TriError&) {
            ok = false;
          }
          if (!ok) break;
        }
      }
    }
    if (ok) out.push_back(sd);
  }
  return out;
}

// ---- structural rewrites ----

namespace {

// New home of a face germ destroyed by a structural rewrite, with the
// correspondence from the new face's sorted slots to the old tet's vertices.
struct GermHome {
  int tet = -1, face = -1;
  std::array<int, 3> old_vertex{};
};

// Rewrites a pairing whose ends may have moved, composing the slot
// correspondences into the vertex map and renumbering surviving tets.
FacePairing rehome_pairing(const FacePairing& q, const std::map<int, GermHome>& moved,
                           const std::vector<int>& tet_map) {
  FacePairing r = q;
  auto src_it = moved.find(germ_id(q.src_tet, q.src_face));
  auto dst_it = moved.find(germ_id(q.dst_tet, q.dst_face));
  if (src_it != moved.end()) {
    const GermHome& h = src_it->second;
    r.src_tet = h.tet;
    r.src_face = h.face;
    for (int k = 0; k < 3; ++k)
      r.vertex_map[k] = q.vertex_map[face_vertex_rank(q.src_face, h.old_vertex[k])];
  } else {
    r.src_tet = tet_map[q.src_tet];
  }
  if (dst_it != moved.end()) {
    const GermHome& h = dst_it->second;
    r.dst_tet = h.tet;
    r.dst_face = h.face;
    std::array<int, 3> nfv = face_vertices(h.face);
    for (int k = 0; k < 3; ++k) {
      int j = 0;
      while (j < 3 && h.old_vertex[j] != r.vertex_map[k]) ++j;
      if (j == 3) throw std::logic_error("germ replacement lost a vertex");
      r.vertex_map[k] = nfv[j];
    }
  } else {
    r.dst_tet = tet_map[q.dst_tet];
  }
  if (r.src_tet < 0 || r.dst_tet < 0) throw std::logic_error("pairing end fell off the complex");
  return r;
}

// The rebuilt complex with its inherited decoration: flow values for the kept
// pairings, branchings for the kept tets, and the freedom left to fill.
struct StructuralPatch {
  Triangulation t2;
  std::vector<int> dir2;
  std::vector<TetBranching> kept;
  std::vector<int> free_pairings;
  std::vector<int> new_tets;
};

// Valid completions of the decoration in lexicographic order, dirs first and
// then catalogue positions of the new branchings.
std::vector<std::pair<PreBranching, WeakBranching>> enumerate_patch_completions(
    const StructuralPatch& sp, std::size_t limit = std::size_t(-1)) {
  std::vector<std::pair<PreBranching, WeakBranching>> out;
  TriIndex idx(sp.t2);
  const auto& cat = enumerate_tet_branchings();
  const std::size_t nd = sp.free_pairings.size();
  for (std::uint64_t bits = 0; bits < (1ull << nd); ++bits) {
    PreBranching w;
    w.dir.assign(sp.dir2.begin(), sp.dir2.end());
    for (std::size_t k = 0; k < nd; ++k)
      w.dir[sp.free_pairings[k]] = int((bits >> (nd - 1 - k)) & 1);
    std::vector<std::vector<TetBranching>> cands(sp.new_tets.size());
    bool dead = false;
    for (std::size_t i = 0; i < sp.new_tets.size() && !dead; ++i) {
      std::array<bool, 4> need{};
      for (int f = 0; f < 4; ++f) need[f] = omega_germ_out(sp.t2, idx, w, sp.new_tets[i], f);
      for (const TetBranching& b : cat)
        if (out_pattern(b) == need) cands[i].push_back(b);
      dead = cands[i].empty();
    }
    if (dead) continue;
    std::vector<std::size_t> pick(sp.new_tets.size(), 0);
    while (true) {
      WeakBranching wb;
      wb.tet = sp.kept;
      for (std::size_t i = 0; i < sp.new_tets.size(); ++i)
        wb.tet[sp.new_tets[i]] = cands[i][pick[i]];
      wb.omega = w;
      if (weak_branching_valid(sp.t2, wb)) {
        out.push_back({w, wb});
        if (out.size() >= limit) return out;
      }
      std::size_t j = pick.size();
      while (j > 0) {
        if (++pick[j - 1] < cands[j - 1].size()) break;
        pick[j - 1] = 0;
        --j;
      }
      if (j == 0) break;
    }
  }
  return out;
}

// Least completion of the decoration, or a hard failure when none exists.
std::pair<PreBranching, WeakBranching> complete_patch(const StructuralPatch& sp) {
  auto all = enumerate_patch_completions(sp, 1);
  if (all.empty()) throw std::logic_error("structural move admits no compatible decoration");
  return all.front();
}

GF2Vector apply_patch_bits(const GF2Vector& base, const std::vector<int>& patch,
                           std::uint32_t bits) {
  GF2Vector out = base;
  for (std::size_t k = 0; k < patch.size(); ++k)
    if ((bits >> k) & 1) out.flip(patch[k]);
  return out;
}

// All weight completions on the rebuilt complex reachable by flipping patch
// pairings over the transported weights. The coboundaries of the new tets are
// checked to live inside the patch and to permute the solutions.
std::vector<std::uint32_t> patch_weight_solutions(const Triangulation& t2, const PreBranching& w2,
                                                  const WeakBranching& wb2, const GF2Vector& base,
                                                  const std::vector<int>& patch,
                                                  const std::vector<int>& new_tets) {
  GF2Vector alpha2 = alpha_bar(t2, w2, wb2).chain;
  GF2Matrix d2 = boundary_matrix(t2, 2);
  std::vector<std::uint32_t> sols;
  for (std::uint32_t bits = 0; bits < (1u << patch.size()); ++bits) {
    if (d2.apply(apply_patch_bits(base, patch, bits)) == alpha2) sols.push_back(bits);
  }
  if (sols.empty()) throw std::logic_error("structural move weights are infeasible");
  GF2Matrix d3 = boundary_matrix(t2, 3);
  std::set<std::uint32_t> solset(sols.begin(), sols.end());
  for (int tet : new_tets) {
    std::uint32_t colbits = 0;
    for (std::size_t r = 0; r < t2.pairings.size(); ++r) {
      if (!d3.row(r).get(tet)) continue;
      auto it = std::find(patch.begin(), patch.end(), int(r));
      if (it == patch.end()) throw std::logic_error("new tet coboundary escapes the patch");
      colbits |= 1u << (it - patch.begin());
    }
    for (std::uint32_t b : sols)
      if (!solset.count(b ^ colbits))
        throw std::logic_error("patch solutions are not closed under the new coboundaries");
  }
  return sols;
}

// Key ranks the admissible flip patterns; the least one wins.
template <class Key>
GF2Vector solve_patch_weights(const Triangulation& t2, const PreBranching& w2,
                              const WeakBranching& wb2, const GF2Vector& base,
                              const std::vector<int>& patch, const std::vector<int>& new_tets,
                              Key key) {
  auto sols = patch_weight_solutions(t2, w2, wb2, base, patch, new_tets);
  std::uint32_t best = sols[0];
  for (std::uint32_t b : sols)
    if (key(b) < key(best)) best = b;
  return apply_patch_bits(base, patch, best);
}

// Shared tail of the structural moves: the rebuilt state must be coherent and
// must carry the same number of spin classes as the input.
void certify_structural(const SpinDescriptor& before, const MoveStep& st) {
  try {
    check_state(st.after);
  } catch (const std::invalid_argument&) {
    throw std::logic_error(move_kind_name(st.kind) + " produced an inconsistent state");
  }
  if (solve_spin(st.after.t, st.after.omega, st.after.b).class_count !=
      solve_spin(before.t, before.omega, before.b).class_count)
    throw std::logic_error(move_kind_name(st.kind) + " changed the spin class count");
}

}  // namespace

MoveStep move_bubble(const SpinDescriptor& s, int pairing) {
  check_state(s);
  if (pairing < 0 || pairing >= int(s.t.pairings.size()))
    throw std::invalid_argument("pairing id out of range");
  const FacePairing p = s.t.pairings[pairing];
  const int n = s.t.n_tets;
  const int tp = n, tpp = n + 1;
  std::array<int, 3> fv = face_vertices(p.src_face);

  // Pillow corners, with the first two swapped when needed so every new
  // gluing reverses orientation. The two external correspondences always
  // share their parity, so one bit fixes both.
  Perm4 p1{{fv[0], fv[1], fv[2], p.src_face}};
  int sw = p1.sign() < 0 ? 0 : 1;
  std::array<int, 3> corner{fv[sw], fv[1 - sw], fv[2]};
  std::array<int, 3> corner_img{pairing_apply(p, corner[0]), pairing_apply(p, corner[1]),
                                pairing_apply(p, corner[2])};

  Triangulation t2 = s.t;
  t2.n_tets = n + 2;
  FacePairing bottom{p.src_tet, p.src_face, tp, 3, {}};
  for (int k = 0; k < 3; ++k)
    bottom.vertex_map[k] = fv[k] == corner[0] ? 0 : fv[k] == corner[1] ? 1 : 2;
  t2.pairings[pairing] = bottom;
  const int topid = int(s.t.pairings.size());
  FacePairing top{p.dst_tet, p.dst_face, tpp, 3, {}};
  std::array<int, 3> gw = face_vertices(p.dst_face);
  for (int k = 0; k < 3; ++k)
    top.vertex_map[k] = gw[k] == corner_img[1] ? 0 : gw[k] == corner_img[0] ? 1 : 2;
  t2.pairings.push_back(top);
  t2.pairings.push_back({tp, 0, tpp, 1, {0, 2, 3}});
  t2.pairings.push_back({tp, 1, tpp, 0, {1, 2, 3}});
  t2.pairings.push_back({tp, 2, tpp, 2, {1, 0, 3}});
  if (!validate(t2).empty()) throw std::logic_error("bubble produced an invalid complex");

  StructuralPatch sp;
  sp.t2 = t2;
  sp.dir2.assign(t2.pairings.size(), -1);
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q) sp.dir2[q] = s.omega.dir[q];
  // both old germs keep their flow status, so only the seams are free
  sp.dir2[topid] = s.omega.dir[pairing] ^ 1;
  sp.free_pairings = {topid + 1, topid + 2, topid + 3};
  sp.new_tets = {tp, tpp};
  sp.kept = s.b.tet;
  sp.kept.resize(t2.n_tets);
  auto [w2, wb2] = complete_patch(sp);

  GF2Vector base(t2.pairings.size());
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q)
    if (s.beta.get(q)) base.flip(int(q));
  if (s.beta.get(pairing)) base.flip(topid);
  std::vector<int> patch{pairing, topid, topid + 1, topid + 2, topid + 3};
  auto key = [](std::uint32_t bits) {
    int seam_ones = int((bits >> 2 & 1) + (bits >> 3 & 1) + (bits >> 4 & 1));
    int ext_flips = int((bits & 1) + (bits >> 1 & 1));
    return std::tuple(seam_ones == 1 ? 0 : 1, ext_flips, bits);
  };
  GF2Vector beta2 = solve_patch_weights(t2, w2, wb2, base, patch, sp.new_tets, key);

  MoveStep st;
  st.kind = MoveKind::bubble;
  st.target = {pairing};
  st.structural = true;
  st.after = {std::move(t2), std::move(w2), std::move(wb2), std::move(beta2)};
  st.tet_map.resize(n);
  for (int i = 0; i < n; ++i) st.tet_map[i] = i;
  st.pairing_map.resize(s.t.pairings.size());
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q) st.pairing_map[q] = int(q);
  st.pairing_map[pairing] = -1;
  certify_structural(s, st);
  return st;
}

// The forward rewrite, optionally skipping the certificate: the inverse move
// replays this on trial decorations, which are checked another way.
static MoveStep move_23_impl(const SpinDescriptor& s, int pairing, bool certify) {
  check_state(s);
  if (pairing < 0 || pairing >= int(s.t.pairings.size()))
    throw std::invalid_argument("pairing id out of range");
  const FacePairing e = s.t.pairings[pairing];
  if (e.src_tet == e.dst_tet)
    throw std::invalid_argument("the move needs two distinct tetrahedra");
  if (!pairing_normalized(s, pairing))
    throw std::invalid_argument("the pairing is not in normalized shape");
  const int n = s.t.n_tets;
  const int t1 = e.src_tet, t2 = e.dst_tet;
  const int u = e.src_face, v = e.dst_face;
  std::array<int, 3> fv = face_vertices(u);
  std::array<int, 3> gv = e.vertex_map;

  // Apex slots of the three new tets, swapped as one block when the external
  // correspondences would otherwise preserve orientation.
  Perm4 pi{{u, fv[2], fv[0], fv[1]}};
  const int sw = pi.sign() < 0 ? 0 : 1;
  const int us = sw, vs = 1 - sw;

  std::vector<int> tet_map(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (i != t1 && i != t2) tet_map[i] = next++;
  std::array<int, 3> at{next, next + 1, next + 2};

  std::map<int, GermHome> moved;
  for (int i = 0; i < 3; ++i) {
    GermHome h1{at[i], vs, {}};
    std::array<int, 3> slots = face_vertices(vs);
    for (int k = 0; k < 3; ++k)
      h1.old_vertex[k] = slots[k] == us ? u : slots[k] == 2 ? fv[i] : fv[(i + 1) % 3];
    moved[germ_id(t1, fv[(i + 2) % 3])] = h1;
    GermHome h2{at[i], us, {}};
    slots = face_vertices(us);
    for (int k = 0; k < 3; ++k)
      h2.old_vertex[k] = slots[k] == vs ? v : slots[k] == 2 ? gv[i] : gv[(i + 1) % 3];
    moved[germ_id(t2, gv[(i + 2) % 3])] = h2;
  }

  Triangulation nt;
  nt.n_tets = n + 1;
  std::vector<int> pairing_map(s.t.pairings.size(), -1);
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q) {
    if (int(q) == pairing) continue;
    pairing_map[q] = int(nt.pairings.size());
    nt.pairings.push_back(rehome_pairing(s.t.pairings[q], moved, tet_map));
  }
  const int first_seam = int(nt.pairings.size());
  for (int i = 0; i < 3; ++i)
    nt.pairings.push_back({at[i], 2, at[(i + 1) % 3], 3, {0, 1, 2}});
  if (!validate(nt).empty()) throw std::logic_error("move23 produced an invalid complex");

  StructuralPatch sp;
  sp.t2 = nt;
  sp.dir2.assign(nt.pairings.size(), -1);
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q)
    if (pairing_map[q] >= 0) sp.dir2[pairing_map[q]] = s.omega.dir[q];
  sp.free_pairings = {first_seam, first_seam + 1, first_seam + 2};
  sp.new_tets = {at[0], at[1], at[2]};
  sp.kept.resize(nt.n_tets);
  for (int i = 0; i < n; ++i)
    if (tet_map[i] >= 0) sp.kept[tet_map[i]] = s.b.tet[i];
  auto [w2, wb2] = complete_patch(sp);

  GF2Vector base(nt.pairings.size());
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q)
    if (pairing_map[q] >= 0 && s.beta.get(q)) base.flip(pairing_map[q]);
  TriIndex oldidx(s.t);
  std::set<int> patchset{first_seam, first_seam + 1, first_seam + 2};
  for (const auto& gh : moved) patchset.insert(pairing_map[oldidx.at(gh.first / 4, gh.first % 4).pairing]);
  std::vector<int> patch(patchset.begin(), patchset.end());
  auto key = [&](std::uint32_t bits) {
    int seam_ones = 0, ext_flips = 0;
    for (std::size_t k = 0; k < patch.size(); ++k)
      if (bits >> k & 1) ++(patch[k] >= first_seam ? seam_ones : ext_flips);
    bool caption = seam_ones == 1 && ext_flips == 1;
    return std::tuple(caption ? 0 : 1, bits);
  };
  GF2Vector beta2 = solve_patch_weights(nt, w2, wb2, base, patch, sp.new_tets, key);

  MoveStep st;
  st.kind = MoveKind::move23;
  st.target = {pairing};
  st.structural = true;
  st.after = {std::move(nt), std::move(w2), std::move(wb2), std::move(beta2)};
  st.tet_map = std::move(tet_map);
  st.pairing_map = std::move(pairing_map);
  if (certify) certify_structural(s, st);
  return st;
}

MoveStep move_23(const SpinDescriptor& s, int pairing) { return move_23_impl(s, pairing, true); }

MoveStep move_32(const SpinDescriptor& s, int edge_class) {
  check_state(s);
  auto classes = compute_edge_classes(s.t);
  if (edge_class < 0 || edge_class >= int(classes.size()))
    throw std::invalid_argument("edge class id out of range");
  const EdgeClass& cls = classes[edge_class];
  if (cls.fiber.size() != 3)
    throw std::invalid_argument("the move needs an edge class of three tetrahedra");
  {
    std::set<int> tets;
    for (const auto& en : cls.fiber) tets.insert(en.tet);
    if (tets.size() != 3)
      throw std::invalid_argument("the move needs an edge class of three distinct tetrahedra");
  }
  TriIndex idx(s.t);
  const int n = s.t.n_tets;

  // One lap around the class. Each leg records where the two apexes and the
  // two cyclic corners of its tet sit; the seam pairings walked through are
  // the ones the move dissolves.
  struct Leg {
    int tet, uslot, vslot, e0slot, e1slot;
  };
  std::array<Leg, 3> legs{};
  std::array<int, 3> seams{};
  {
    const auto& en = cls.fiber[0];
    int c = 0;
    while (c == en.a || c == en.b) ++c;
    int d = c + 1;
    while (d == en.a || d == en.b) ++d;
    legs[0] = {en.tet, en.a, en.b, c, d};
  }
  for (int i = 0; i < 3; ++i) {
    const Leg& leg = legs[i];
    auto ref = idx.at(leg.tet, leg.e0slot);
    const FacePairing& q = s.t.pairings[ref.pairing];
    FacePairing fq = ref.side == 0 ? q : pairing_flipped(q);
    seams[i] = ref.pairing;
    int nu = pairing_apply(fq, leg.uslot), nv = pairing_apply(fq, leg.vslot);
    int ne0 = pairing_apply(fq, leg.e1slot);
    if (i == 2) {
      if (fq.dst_tet != legs[0].tet || ne0 != legs[0].e0slot)
        throw std::logic_error("edge class lap did not close");
      if (nu == legs[0].vslot)
        throw std::invalid_argument("the edge class swaps its ends going around");
      if (nu != legs[0].uslot) throw std::logic_error("edge class lap did not close");
    } else {
      int ne1 = 0;
      while (ne1 == nu || ne1 == nv || ne1 == ne0) ++ne1;
      legs[i + 1] = {fq.dst_tet, nu, nv, ne0, ne1};
    }
  }
  if (seams[0] == seams[1] || seams[1] == seams[2] || seams[0] == seams[2])
    throw std::logic_error("edge class lap reused a seam");

  std::vector<int> base_tet_map(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (i != legs[0].tet && i != legs[1].tet && i != legs[2].tet) base_tet_map[i] = next++;
  const int nt1 = next, nt2 = next + 1;

  // The two rebuilt tets can each be assembled two ways, mirror images of one
  // another, and only one matches the orientation of the dissolved tets.
  // Landing a leg's germ on a rebuilt tet is a face pairing, so the slot
  // correspondence must be an odd permutation; swap the first two slots of a
  // tet whose correspondences would come out even.
  int s1 = -1, s2 = -1;
  for (int i = 0; i < 3; ++i) {
    const Leg& leg = legs[i];
    std::array<int, 4> img2{};
    img2[leg.vslot] = 0;
    img2[leg.e0slot] = 1 + i;
    img2[leg.e1slot] = 1 + (i + 1) % 3;
    img2[leg.uslot] = 1 + (i + 2) % 3;
    int want2 = Perm4{img2}.sign() < 0 ? 0 : 1;
    std::array<int, 4> img1{};
    img1[leg.uslot] = 0;
    img1[leg.e0slot] = 1 + i;
    img1[leg.e1slot] = 1 + (i + 1) % 3;
    img1[leg.vslot] = 1 + (i + 2) % 3;
    int want1 = Perm4{img1}.sign() < 0 ? 0 : 1;
    if (i == 0) {
      s1 = want1;
      s2 = want2;
    } else if (s1 != want1 || s2 != want2) {
      throw std::logic_error("the legs disagree about the rebuilt orientations");
    }
  }

  // slot_t1[x]: slot of geometric label x in the rebuilt bottom tet,
  // labels 0 = apex, 1 + j = corner j
  std::array<int, 4> slot_t1{s1 ? 1 : 0, s1 ? 0 : 1, 2, 3};
  std::array<int, 4> slot_t2{s2 ? 1 : 0, s2 ? 0 : 1, 2, 3};
  std::map<int, GermHome> moved;
  for (int i = 0; i < 3; ++i) {
    const Leg& leg = legs[i];
    GermHome h2{nt2, slot_t2[1 + (i + 2) % 3], {}};
    std::array<int, 3> slots = face_vertices(h2.face);
    for (int k = 0; k < 3; ++k) {
      int g = slots[k];
      h2.old_vertex[k] = g == slot_t2[0]           ? leg.vslot
                         : g == slot_t2[1 + i % 3] ? leg.e0slot
                                                   : leg.e1slot;
    }
    moved[germ_id(leg.tet, leg.uslot)] = h2;
    GermHome h1{nt1, slot_t1[1 + (i + 2) % 3], {}};
    slots = face_vertices(h1.face);
    for (int k = 0; k < 3; ++k) {
      int g = slots[k];
      h1.old_vertex[k] = g == slot_t1[0]           ? leg.uslot
                         : g == slot_t1[1 + i % 3] ? leg.e0slot
                                                   : leg.e1slot;
    }
    moved[germ_id(leg.tet, leg.vslot)] = h1;
  }

  Triangulation nt;
  nt.n_tets = n - 1;
  std::vector<int> tet_map = base_tet_map;
  std::vector<int> pairing_map(s.t.pairings.size(), -1);
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q) {
    if (int(q) == seams[0] || int(q) == seams[1] || int(q) == seams[2]) continue;
    pairing_map[q] = int(nt.pairings.size());
    nt.pairings.push_back(rehome_pairing(s.t.pairings[q], moved, tet_map));
  }
  const int eid = int(nt.pairings.size());
  FacePairing e{nt1, slot_t1[0], nt2, slot_t2[0], {}};
  std::array<int, 3> efv = face_vertices(e.src_face);
  for (int k = 0; k < 3; ++k) {
    int j = 0;
    while (slot_t1[1 + j] != efv[k]) ++j;
    e.vertex_map[k] = slot_t2[1 + j];
  }
  nt.pairings.push_back(e);
  if (!validate(nt).empty()) throw std::logic_error("move32 produced an invalid complex");

  StructuralPatch sp;
  sp.t2 = nt;
  sp.dir2.assign(nt.pairings.size(), -1);
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q)
    if (pairing_map[q] >= 0) sp.dir2[pairing_map[q]] = s.omega.dir[q];
  sp.free_pairings = {eid};
  sp.new_tets = {nt1, nt2};
  sp.kept.resize(nt.n_tets);
  for (int i = 0; i < n; ++i)
    if (tet_map[i] >= 0) sp.kept[tet_map[i]] = s.b.tet[i];

  GF2Vector base(nt.pairings.size());
  for (std::size_t q = 0; q < s.t.pairings.size(); ++q)
    if (pairing_map[q] >= 0 && s.beta.get(q)) base.flip(pairing_map[q]);
  std::set<int> patchset{eid};
  for (const auto& gh : moved) patchset.insert(pairing_map[idx.at(gh.first / 4, gh.first % 4).pairing]);
  std::vector<int> patch(patchset.begin(), patchset.end());

  auto build = [&](const PreBranching& wp, const WeakBranching& wbp, GF2Vector betap) {
    MoveStep st;
    st.kind = MoveKind::move32;
    st.target = {edge_class};
    st.structural = true;
    st.after = {nt, wp, wbp, std::move(betap)};
    st.tet_map = tet_map;
    st.pairing_map = pairing_map;
    certify_structural(s, st);
    return st;
  };

  // The patch decoration is free; the input state cannot name the one it
  // came from. A candidate is right when replaying the forward move on it
  // lands back on the input, base and spin class alike, so search the
  // candidates for one the forward move inverts. When none does (the
  // input need not lie in the forward move's image at all), settle for
  // the least admissible completion with the fewest weight flips.
  auto completions = enumerate_patch_completions(sp);
  if (completions.empty())
    throw std::logic_error("structural move admits no compatible decoration");
  const bool dbg = std::getenv("SPINSCAPE_DEBUG_32") != nullptr;
  if (dbg) std::fprintf(stderr, "[32] completions=%zu patch=%zu\n", completions.size(), patch.size());
  for (const auto& [wc, wbc] : completions) {
    for (std::uint32_t bits : patch_weight_solutions(nt, wc, wbc, base, patch, sp.new_tets)) {
      SpinDescriptor cand{nt, wc, wbc, apply_patch_bits(base, patch, bits)};
      if (!pairing_normalized(cand, eid)) continue;
      MoveStep fwd = move_23_impl(cand, eid, false);
      auto isos = tri_isomorphisms(fwd.after.t, s.t);
      if (dbg) std::fprintf(stderr, "[32] cand bits=%u isos=%zu\n", bits, isos.size());
      for (const TriIsomorphism& iso : isos) {
        SpinDescriptor back = transport_state(fwd.after, s.t, iso);
        bool bo = back.omega.dir == s.omega.dir, bb = back.b.tet == s.b.tet;
        if (dbg)
          std::fprintf(stderr, "[32]   omega=%d branch=%d spin=%d\n", int(bo), int(bb),
                       int(bo && bb && spin_equal(back, s)));
        if (bo && bb && spin_equal(back, s))
          return build(wc, wbc, std::move(cand.beta));
      }
    }
  }
  if (dbg) std::fprintf(stderr, "[32] fallback\n");
  const auto& [w2, wb2] = completions.front();
  auto key = [&](std::uint32_t bits) {
    int ext_flips = 0, e_weight = 0;
    for (std::size_t k = 0; k < patch.size(); ++k)
      if (bits >> k & 1) ++(patch[k] == eid ? e_weight : ext_flips);
    return std::tuple(ext_flips, e_weight, bits);
  };
  GF2Vector beta2 = solve_patch_weights(nt, w2, wb2, base, patch, sp.new_tets, key);
  return build(w2, wb2, std::move(beta2));
}

std::vector<TriIsomorphism> tri_isomorphisms(const Triangulation& a, const Triangulation& b) {
  std::vector<TriIsomorphism> found;
  if (a.n_tets != b.n_tets || a.pairings.size() != b.pairings.size()) return found;
  if (a.n_tets == 0) {
    found.push_back({});
    return found;
  }
  TriIndex ia(a), ib(b);
  std::array<int, 4> seed_img{0, 1, 2, 3};
  std::vector<Perm4> evens;
  do {
    Perm4 p{seed_img};
    if (p.sign() > 0) evens.push_back(p);
  } while (std::next_permutation(seed_img.begin(), seed_img.end()));
  for (int seed_tet = 0; seed_tet < b.n_tets; ++seed_tet) {
    for (const Perm4& seed : evens) {
      std::vector<int> tet_image(a.n_tets, -1);
      std::vector<Perm4> vertex_image(a.n_tets);
      std::vector<bool> taken(b.n_tets, false);
      tet_image[0] = seed_tet;
      vertex_image[0] = seed;
      taken[seed_tet] = true;
      std::vector<int> queue{0};
      bool ok = true;
      for (std::size_t qi = 0; qi < queue.size() && ok; ++qi) {
        int t = queue[qi];
        for (int f = 0; f < 4 && ok; ++f) {
          auto ra = ia.at(t, f);
          const FacePairing& pa = a.pairings[ra.pairing];
          FacePairing fa = ra.side == 0 ? pa : pairing_flipped(pa);
          auto rb = ib.at(tet_image[t], vertex_image[t](f));
          const FacePairing& pb = b.pairings[rb.pairing];
          FacePairing fb = rb.side == 0 ? pb : pairing_flipped(pb);
          Perm4 cand = compose(pairing_tet_perm(fb),
                               compose(vertex_image[t], pairing_tet_perm(fa).inverse()));
          int v = fa.dst_tet;
          if (tet_image[v] == -1) {
            if (taken[fb.dst_tet]) {
              ok = false;
              break;
            }
            tet_image[v] = fb.dst_tet;
            vertex_image[v] = cand;
            taken[fb.dst_tet] = true;
            queue.push_back(v);
          } else if (tet_image[v] != fb.dst_tet || !(vertex_image[v] == cand)) {
            ok = false;
          }
        }
      }
      if (ok && int(queue.size()) == a.n_tets) found.push_back({tet_image, vertex_image});
    }
  }
  return found;
}

std::optional<TriIsomorphism> tri_isomorphism(const Triangulation& a, const Triangulation& b) {
  auto all = tri_isomorphisms(a, b);
  if (all.empty()) return std::nullopt;
  return all.front();
}

SpinDescriptor transport_state(const SpinDescriptor& s, const Triangulation& target,
                               const TriIsomorphism& iso) {
  TriIndex it(target);
  SpinDescriptor r;
  r.t = target;
  r.omega.dir.assign(target.pairings.size(), 0);
  r.beta = GF2Vector(target.pairings.size());
  for (std::size_t p = 0; p < s.t.pairings.size(); ++p) {
    const FacePairing& fp = s.t.pairings[p];
    auto ref = it.at(iso.tet_image[fp.src_tet], iso.vertex_image[fp.src_tet](fp.src_face));
    r.omega.dir[ref.pairing] = s.omega.dir[p] ^ ref.side;
    if (s.beta.get(p)) r.beta.flip(ref.pairing);
  }
  r.b.tet.resize(target.n_tets);
  for (int t = 0; t < s.t.n_tets; ++t) {
    std::array<int, 4> o{};
    for (int j = 0; j < 4; ++j) o[j] = iso.vertex_image[t](s.b.tet[t].order[j]);
    r.b.tet[iso.tet_image[t]] = make_branching(o);
  }
  r.b.omega = r.omega;
  check_state(r);
  return r;
}

}  // namespace spinscape
