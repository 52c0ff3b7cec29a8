#include "spinscape/tri.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace spinscape {

std::string Perm3::str() const {
  if (is_identity()) return "()";
  std::string s = "(";
  for (int i : img) s += char('0' + i);
  return s + ")";
}

const std::array<Perm3, 6>& all_perm3() {
  static const std::array<Perm3, 6> all = {
      Perm3{{0, 1, 2}}, Perm3{{1, 2, 0}}, Perm3{{2, 0, 1}},
      Perm3{{1, 0, 2}}, Perm3{{0, 2, 1}}, Perm3{{2, 1, 0}},
  };
  return all;
}

int perm3_index(const Perm3& p) {
  const auto& all = all_perm3();
  for (int i = 0; i < 6; ++i)
    if (all[i] == p) return i;
  throw std::logic_error("perm3_index: not a permutation");
}

std::array<int, 3> face_vertices(int face) {
  std::array<int, 3> v{};
  int k = 0;
  for (int i = 0; i < 4; ++i)
    if (i != face) v[k++] = i;
  return v;
}

int face_vertex_rank(int face, int v) {
  auto fv = face_vertices(face);
  for (int k = 0; k < 3; ++k)
    if (fv[k] == v) return k;
  throw std::logic_error("vertex not on face");
}

int pairing_apply(const FacePairing& p, int v) {
  return p.vertex_map[face_vertex_rank(p.src_face, v)];
}

int pairing_apply_inverse(const FacePairing& p, int v) {
  for (int k = 0; k < 3; ++k)
    if (p.vertex_map[k] == v) return face_vertices(p.src_face)[k];
  throw std::logic_error("vertex not in pairing image");
}

FacePairing pairing_flipped(const FacePairing& p) {
  FacePairing q;
  q.src_tet = p.dst_tet;
  q.src_face = p.dst_face;
  q.dst_tet = p.src_tet;
  q.dst_face = p.src_face;
  auto fv = face_vertices(p.dst_face);
  for (int k = 0; k < 3; ++k) q.vertex_map[k] = pairing_apply_inverse(p, fv[k]);
  return q;
}

Perm4 pairing_tet_perm(const FacePairing& p) {
  Perm4 r;
  r.img[p.src_face] = p.dst_face;
  auto fv = face_vertices(p.src_face);
  for (int k = 0; k < 3; ++k) r.img[fv[k]] = p.vertex_map[k];
  return r;
}

TriIndex::TriIndex(const Triangulation& t) : by_germ(std::size_t(t.n_tets) * 4) {
  for (std::size_t i = 0; i < t.pairings.size(); ++i) {
    const auto& p = t.pairings[i];
    by_germ[germ_id(p.src_tet, p.src_face)] = {int(i), 0};
    by_germ[germ_id(p.dst_tet, p.dst_face)] = {int(i), 1};
  }
}

namespace {

bool germ_in_range(const Triangulation& t, int tet, int face) {
  return tet >= 0 && tet < t.n_tets && face >= 0 && face < 4;
}

std::string germ_name(int tet, int face) {
  return "(" + std::to_string(tet) + "," + std::to_string(face) + ")";
}

// Union-find over abstract edges with an orientation parity bit per link.
struct ParityForest {
  std::vector<int> parent, par;
  explicit ParityForest(int n) : parent(n), par(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  // Returns {root, parity of x relative to root}.
  std::pair<int, int> find(int x) {
    if (parent[x] == x) return {x, 0};
    auto [r, p] = find(parent[x]);
    parent[x] = r;
    par[x] ^= p;
    return {r, par[x]};
  }
  // Joins x and y with relative parity q. Returns false on a parity conflict.
  bool unite(int x, int y, int q) {
    auto [rx, px] = find(x);
    auto [ry, py] = find(y);
    if (rx == ry) return (px ^ py) == q;
    parent[rx] = ry;
    par[rx] = px ^ py ^ q;
    return true;
  }
};

}  // namespace

std::vector<std::string> validate(const Triangulation& t) {
  std::vector<std::string> report;
  if (t.n_tets <= 0) {
    report.push_back("no tetrahedra");
    return report;
  }
  if (int(t.pairings.size()) != 2 * t.n_tets)
    report.push_back("expected " + std::to_string(2 * t.n_tets) + " pairings, got " +
                     std::to_string(t.pairings.size()));

  std::vector<int> germ_count(std::size_t(t.n_tets) * 4, 0);
  bool indices_ok = true;
  for (const auto& p : t.pairings) {
    if (!germ_in_range(t, p.src_tet, p.src_face) || !germ_in_range(t, p.dst_tet, p.dst_face)) {
      report.push_back("pairing with out-of-range tetrahedron or face");
      indices_ok = false;
      continue;
    }
    if (p.src_tet == p.dst_tet && p.src_face == p.dst_face)
      report.push_back("face " + germ_name(p.src_tet, p.src_face) + " glued to itself");

    auto dv = face_vertices(p.dst_face);
    auto sorted = p.vertex_map;
    std::sort(sorted.begin(), sorted.end());
    if (!std::equal(sorted.begin(), sorted.end(), dv.begin()))
      report.push_back("vertex map of face " + germ_name(p.src_tet, p.src_face) +
                       " is not onto the target face");
    else if (pairing_tet_perm(p).sign() != -1)
      report.push_back("pairing of face " + germ_name(p.src_tet, p.src_face) +
                       " is orientation-preserving");

    germ_count[germ_id(p.src_tet, p.src_face)]++;
    germ_count[germ_id(p.dst_tet, p.dst_face)]++;
  }
  if (!indices_ok) return report;

  for (int tet = 0; tet < t.n_tets; ++tet)
    for (int face = 0; face < 4; ++face) {
      int c = germ_count[germ_id(tet, face)];
      if (c == 0) report.push_back("face " + germ_name(tet, face) + " unglued");
      if (c > 1) report.push_back("face " + germ_name(tet, face) + " paired twice");
    }
  if (!report.empty()) return report;

  if (!gluing_graph(t).connected()) report.push_back("gluing graph is disconnected");

  // Orientation parity of edge identifications must be globally consistent.
  ParityForest forest(t.n_tets * 6);
  bool parity_ok = true;
  for (const auto& p : t.pairings) {
    auto fv = face_vertices(p.src_face);
    for (int i = 0; i < 3 && parity_ok; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int x = fv[i], y = fv[j];
        int xi = pairing_apply(p, x), yi = pairing_apply(p, y);
        int parity = (xi < yi) ? 0 : 1;
        if (!forest.unite(p.src_tet * 6 + edge_slot(x, y),
                          p.dst_tet * 6 + edge_slot(std::min(xi, yi), std::max(xi, yi)),
                          parity)) {
          report.push_back("edge identified with itself reversing orientation");
          parity_ok = false;
          break;
        }
      }
    if (!parity_ok) break;
  }
  return report;
}

namespace {

FacePairing parse_glue_line(const std::string& body, int line_no) {
  std::istringstream is(body);
  FacePairing p;
  char c1 = 0, c2 = 0;
  if (!(is >> p.src_tet >> p.src_face >> c1 >> p.dst_tet >> p.dst_face >> c2 >>
        p.vertex_map[0] >> p.vertex_map[1] >> p.vertex_map[2]) ||
      c1 != ':' || c2 != ':')
    throw TriError(line_no, "malformed glue line");
  std::string extra;
  if (is >> extra) throw TriError(line_no, "trailing tokens on glue line");
  return p;
}

void throw_if_invalid(const Triangulation& t, int line_hint) {
  auto report = validate(t);
  if (!report.empty()) throw TriError(line_hint, report.front());
}

}  // namespace

Triangulation parse_triangulation(const std::string& text) {
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  Triangulation t;
  bool have_header = false;
  int glue_lines = 0;

  while (std::getline(is, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;

    if (!have_header) {
      if (kw != "tri") throw TriError(line_no, "expected 'tri <n>' header");
      if (!(ls >> t.n_tets) || t.n_tets <= 0) throw TriError(line_no, "bad tetrahedron count");
      have_header = true;
      continue;
    }
    if (kw != "glue") throw TriError(line_no, "expected 'glue' line");
    std::string body;
    std::getline(ls, body);
    t.pairings.push_back(parse_glue_line(body, line_no));
    ++glue_lines;
  }
  if (!have_header) throw TriError(line_no, "missing 'tri <n>' header");
  if (glue_lines != 2 * t.n_tets)
    throw TriError(line_no, "expected " + std::to_string(2 * t.n_tets) + " glue lines, got " +
                                std::to_string(glue_lines));
  throw_if_invalid(t, 0);
  return t;
}

Triangulation parse_triangulation_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw TriError(0, std::string("bad json: ") + e.what());
  }
  Triangulation t;
  try {
    t.n_tets = j.at("n_tetrahedra").get<int>();
    for (const auto& jp : j.at("pairings")) {
      FacePairing p;
      p.src_tet = jp.at("source").at(0).get<int>();
      p.src_face = jp.at("source").at(1).get<int>();
      p.dst_tet = jp.at("target").at(0).get<int>();
      p.dst_face = jp.at("target").at(1).get<int>();
      for (int k = 0; k < 3; ++k) p.vertex_map[k] = jp.at("vertex_map").at(k).get<int>();
      t.pairings.push_back(p);
    }
  } catch (const std::exception& e) {
    throw TriError(0, std::string("bad json triangulation: ") + e.what());
  }
  throw_if_invalid(t, 0);
  return t;
}

std::string serialize_triangulation_json(const Triangulation& t) {
  nlohmann::json j;
  j["n_tetrahedra"] = t.n_tets;
  j["pairings"] = nlohmann::json::array();
  for (const auto& p : canonical_form(t).pairings) {
    nlohmann::json jp;
    jp["source"] = {p.src_tet, p.src_face};
    jp["target"] = {p.dst_tet, p.dst_face};
    jp["vertex_map"] = {p.vertex_map[0], p.vertex_map[1], p.vertex_map[2]};
    j["pairings"].push_back(jp);
  }
  return j.dump(2) + "\n";
}

Triangulation canonical_form(const Triangulation& t) {
  Triangulation c = t;
  for (auto& p : c.pairings)
    if (germ_id(p.dst_tet, p.dst_face) < germ_id(p.src_tet, p.src_face)) p = pairing_flipped(p);
  std::sort(c.pairings.begin(), c.pairings.end(), [](const FacePairing& a, const FacePairing& b) {
    return germ_id(a.src_tet, a.src_face) < germ_id(b.src_tet, b.src_face);
  });
  return c;
}

std::string serialize_triangulation(const Triangulation& t) {
  std::ostringstream os;
  os << "tri " << t.n_tets << "\n";
  for (const auto& p : canonical_form(t).pairings) {
    os << "glue " << p.src_tet << " " << p.src_face << " : " << p.dst_tet << " " << p.dst_face
       << " : " << p.vertex_map[0] << " " << p.vertex_map[1] << " " << p.vertex_map[2] << "\n";
  }
  return os.str();
}

Triangulation load_triangulation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TriError(0, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return parse_triangulation_json(buf.str());
  return parse_triangulation(buf.str());
}

int edge_slot(int a, int b) {
  static const int table[4][4] = {
      {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  int s = table[a][b];
  if (s < 0) throw std::logic_error("degenerate edge");
  return s;
}

std::array<int, 2> edge_slot_vertices(int slot) {
  static const std::array<std::array<int, 2>, 6> table = {
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  return table[slot];
}

std::vector<EdgeClass> compute_edge_classes(const Triangulation& t) {
  ParityForest forest(t.n_tets * 6);
  for (const auto& p : t.pairings) {
    auto fv = face_vertices(p.src_face);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int x = fv[i], y = fv[j];
        int xi = pairing_apply(p, x), yi = pairing_apply(p, y);
        int parity = (xi < yi) ? 0 : 1;
        if (!forest.unite(p.src_tet * 6 + edge_slot(x, y),
                          p.dst_tet * 6 + edge_slot(std::min(xi, yi), std::max(xi, yi)), parity))
          throw std::logic_error("edge orientation parity conflict");
      }
  }

  // Group by root; the reference is the lexicographically least abstract edge.
  std::map<int, std::vector<int>> groups;
  for (int e = 0; e < t.n_tets * 6; ++e) groups[forest.find(e).first].push_back(e);

  std::vector<EdgeClass> classes;
  for (auto& [root, members] : groups) {
    EdgeClass c;
    c.id = int(classes.size());
    std::sort(members.begin(), members.end());
    int ref_parity = forest.find(members.front()).second;
    for (int e : members) {
      auto [a, b] = edge_slot_vertices(e % 6);
      EdgeClass::Entry entry;
      entry.tet = e / 6;
      entry.a = a;
      entry.b = b;
      entry.sign = (forest.find(e).second == ref_parity) ? +1 : -1;
      c.fiber.push_back(entry);
    }
    c.ref = 0;
    classes.push_back(std::move(c));
  }
  return classes;
}

std::vector<int> edge_class_lookup(const Triangulation& t, const std::vector<EdgeClass>& classes) {
  std::vector<int> lookup(std::size_t(t.n_tets) * 6, -1);
  for (const auto& c : classes)
    for (const auto& e : c.fiber) lookup[e.tet * 6 + edge_slot(e.a, e.b)] = c.id;
  return lookup;
}

VertexClasses compute_vertex_classes(const Triangulation& t) {
  std::vector<int> parent(std::size_t(t.n_tets) * 4);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : t.pairings)
    for (int v : face_vertices(p.src_face)) {
      int a = find(p.src_tet * 4 + v);
      int b = find(p.dst_tet * 4 + pairing_apply(p, v));
      if (a != b) parent[a] = b;
    }
  VertexClasses vc;
  vc.class_of.resize(parent.size());
  std::map<int, int> renum;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    int r = find(int(i));
    auto it = renum.find(r);
    if (it == renum.end()) it = renum.emplace(r, int(renum.size())).first;
    vc.class_of[i] = it->second;
  }
  vc.count = int(renum.size());
  return vc;
}

int GluingGraph::degree(int vertex) const {
  int d = 0;
  for (const auto& e : edges) {
    if (e.u == vertex) ++d;
    if (e.v == vertex) ++d;
  }
  return d;
}

bool GluingGraph::connected() const {
  if (n_vertices == 0) return false;
  std::vector<char> seen(n_vertices, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& e : edges) {
      int w = -1;
      if (e.u == v) w = e.v;
      if (e.v == v) w = e.u;
      if (w >= 0 && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

GluingGraph gluing_graph(const Triangulation& t) {
  GluingGraph g;
  g.n_vertices = t.n_tets;
  for (std::size_t i = 0; i < t.pairings.size(); ++i)
    g.edges.push_back({int(i), t.pairings[i].src_tet, t.pairings[i].dst_tet});
  return g;
}

}  // namespace spinscape
