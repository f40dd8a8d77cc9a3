#include "phir/mesh_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "phir/errors.hpp"

namespace phir {

namespace {

[[noreturn]] void fail(const std::string& what, std::size_t line) {
  throw ParseError(what + " (line " + std::to_string(line) + ")");
}

double parse_double(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) fail("bad number '" + tok + "'", line);
    return v;
  } catch (const std::logic_error&) {
    fail("bad number '" + tok + "'", line);
  }
}

long parse_long(const std::string& tok, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad integer '" + tok + "'", line);
  return v;
}

std::string strip_comment(const std::string& s) {
  auto pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

TriMesh read_obj(std::istream& in) {
  TriMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      std::string x, y, z;
      if (!(ss >> x >> y >> z)) fail("vertex record needs 3 coordinates", lineno);
      mesh.vertices.push_back(
          {parse_double(x, lineno), parse_double(y, lineno), parse_double(z, lineno)});
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        long i = parse_long(tok.substr(0, tok.find('/')), lineno);
        const long n = static_cast<long>(mesh.vertices.size());
        if (i < 0) i = n + i + 1;
        if (i < 1 || i > n) fail("face index " + tok + " out of range", lineno);
        idx.push_back(static_cast<int>(i - 1));
      }
      if (idx.size() < 3) fail("face record needs at least 3 indices", lineno);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
    // Other records (vt, vn, o, g, s, usemtl, ...) carry nothing we use.
  }
  return mesh;
}

TriMesh load_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_obj(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_obj(const TriMesh& mesh, std::ostream& out) {
  for (const auto& v : mesh.vertices)
    out << "v " << fmt_double(v.x) << ' ' << fmt_double(v.y) << ' ' << fmt_double(v.z) << '\n';
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_obj(mesh, out);
}

namespace {

// Next non-empty, comment-stripped record split into tokens.
bool next_record(std::istream& in, std::vector<std::string>& tokens, std::size_t& lineno) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    tokens.clear();
    std::string t;
    while (ss >> t) tokens.push_back(t);
    if (!tokens.empty()) return true;
  }
  return false;
}

}  // namespace

TetComplex read_tetgen(std::istream& node, std::istream& ele) {
  std::vector<std::string> tok;
  std::size_t ln = 0;
  if (!next_record(node, tok, ln)) throw ParseError(".node: missing header");
  const long npts = parse_long(tok[0], ln);
  if (tok.size() >= 2 && parse_long(tok[1], ln) != 3) fail(".node: dimension must be 3", ln);
  if (npts < 0) fail(".node: negative point count", ln);
  std::vector<Vec3> pts(static_cast<std::size_t>(npts));
  long base = 0;
  for (long i = 0; i < npts; ++i) {
    if (!next_record(node, tok, ln))
      throw ParseError(".node: expected " + std::to_string(npts) + " points, record " +
                       std::to_string(i + 1) + " is missing");
    if (tok.size() < 4) fail(".node: point record needs index and 3 coordinates", ln);
    const long idx = parse_long(tok[0], ln);
    if (i == 0) {
      if (idx != 0 && idx != 1) fail(".node: first index must be 0 or 1", ln);
      base = idx;
    }
    if (idx - base != i) fail(".node: point indices must be consecutive", ln);
    pts[i] = {parse_double(tok[1], ln), parse_double(tok[2], ln), parse_double(tok[3], ln)};
  }

  ln = 0;
  if (!next_record(ele, tok, ln)) throw ParseError(".ele: missing header");
  const long ntets = parse_long(tok[0], ln);
  const long per = tok.size() >= 2 ? parse_long(tok[1], ln) : 4;
  if (per != 4 && per != 10) fail(".ele: nodes per tet must be 4 or 10", ln);
  std::vector<Tet> tets;
  tets.reserve(static_cast<std::size_t>(std::max(0L, ntets)));
  for (long i = 0; i < ntets; ++i) {
    if (!next_record(ele, tok, ln))
      throw ParseError(".ele: expected " + std::to_string(ntets) + " tets, record " +
                       std::to_string(i + 1) + " is missing");
    if (static_cast<long>(tok.size()) < 1 + per)
      fail(".ele: record " + std::to_string(i + 1) + " is short", ln);
    Tet t{};
    for (int k = 0; k < 4; ++k) {
      const long v = parse_long(tok[1 + k], ln) - base;
      if (v < 0 || v >= npts)
        fail(".ele: record " + std::to_string(i + 1) + " index out of range", ln);
      t[k] = static_cast<int>(v);
    }
    tets.push_back(t);
  }
  return TetComplex(std::move(pts), std::move(tets));
}

TetComplex load_tetgen(const std::filesystem::path& node_path,
                       const std::filesystem::path& ele_path) {
  auto node = open_in(node_path);
  auto ele = open_in(ele_path);
  return read_tetgen(node, ele);
}

void save_tetgen(const TetComplex& tets, const std::filesystem::path& node_path,
                 const std::filesystem::path& ele_path) {
  auto node = open_out(node_path);
  node << tets.vertices().size() << " 3 0 0\n";
  for (std::size_t i = 0; i < tets.vertices().size(); ++i) {
    const auto& p = tets.vertices()[i];
    node << i << ' ' << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z)
         << '\n';
  }
  auto ele = open_out(ele_path);
  ele << tets.tets().size() << " 4 0\n";
  for (std::size_t i = 0; i < tets.tets().size(); ++i) {
    const auto& t = tets.tets()[i];
    ele << i << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
}

}  // namespace phir
