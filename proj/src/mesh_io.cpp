#include "dirmatch/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dirmatch/errors.hpp"

namespace dirmatch {

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

// Next line that is neither blank nor a '#' comment.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

// Fan-triangulates a polygon face row.
void append_polygon(std::vector<Eigen::Vector3i>& faces, const std::vector<long>& poly,
                    const std::string& path) {
  if (poly.size() < 3) parse_fail(path, "face with fewer than 3 vertices");
  for (std::size_t c = 1; c + 1 < poly.size(); ++c)
    faces.emplace_back(int(poly[0]), int(poly[c]), int(poly[c + 1]));
}

TriangleMesh finish_mesh(std::vector<Eigen::Vector3d>& verts, std::vector<Eigen::Vector3i>& faces,
                         const MeshOptions& opts, const std::string& path) {
  Eigen::MatrixX3d V(verts.size(), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i];
  Eigen::MatrixX3i F(faces.size(), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) F.row(i) = faces[i];
  for (int t = 0; t < int(F.rows()); ++t)
    for (int c = 0; c < 3; ++c)
      if (F(t, c) < 0 || F(t, c) >= int(V.rows()))
        parse_fail(path, "face " + std::to_string(t) + " references vertex " +
                             std::to_string(F(t, c)) + " outside [0, " +
                             std::to_string(V.rows()) + ")");
  return make_mesh(V, F, opts);
}

TriangleMesh load_off(const std::string& path, const MeshOptions& opts) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  std::string line;
  if (!next_content_line(in, line)) parse_fail(path, "empty OFF file");

  std::istringstream header(line);
  std::string tag;
  header >> tag;
  long nv = -1, nf = -1, ne = -1;
  if (tag == "OFF" || tag == "COFF" || tag == "NOFF") {
    if (!(header >> nv >> nf >> ne)) {
      if (!next_content_line(in, line)) parse_fail(path, "missing count line");
      std::istringstream counts(line);
      if (!(counts >> nv >> nf >> ne)) parse_fail(path, "bad count line");
    }
  } else {
    std::istringstream counts(line);
    if (!(counts >> nv >> nf >> ne)) parse_fail(path, "bad OFF header");
  }
  if (nv < 0 || nf < 0) parse_fail(path, "negative counts");

  std::vector<Eigen::Vector3d> verts(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line)) parse_fail(path, "unexpected end in vertex list");
    std::istringstream row(line);
    if (!(row >> verts[i][0] >> verts[i][1] >> verts[i][2]))
      parse_fail(path, "bad vertex line " + std::to_string(i));
  }
  std::vector<Eigen::Vector3i> faces;
  faces.reserve(nf);
  for (long t = 0; t < nf; ++t) {
    if (!next_content_line(in, line)) parse_fail(path, "unexpected end in face list");
    std::istringstream row(line);
    long count = 0;
    if (!(row >> count) || count < 3) parse_fail(path, "bad face line " + std::to_string(t));
    std::vector<long> poly(count);
    for (long c = 0; c < count; ++c)
      if (!(row >> poly[c])) parse_fail(path, "bad face line " + std::to_string(t));
    append_polygon(faces, poly, path);
  }
  return finish_mesh(verts, faces, opts, path);
}

TriangleMesh load_obj(const std::string& path, const MeshOptions& opts) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  std::vector<Eigen::Vector3d> verts;
  std::vector<Eigen::Vector3i> faces;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag)) continue;
    if (tag == "v") {
      Eigen::Vector3d p;
      if (!(row >> p[0] >> p[1] >> p[2]))
        parse_fail(path, "bad vertex at line " + std::to_string(lineno));
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<long> poly;
      std::string tok;
      while (row >> tok) {
        // "f v", "f v/t", "f v/t/n", "f v//n" all start with the vertex index.
        long idx = 0;
        try {
          idx = std::stol(tok.substr(0, tok.find('/')));
        } catch (...) {
          parse_fail(path, "bad face token at line " + std::to_string(lineno));
        }
        if (idx <= 0) parse_fail(path, "non-positive OBJ index at line " + std::to_string(lineno));
        poly.push_back(idx - 1);  // OBJ is 1-based
      }
      append_polygon(faces, poly, path);
    }
    // everything else (vn, vt, usemtl, ...) ignored
  }
  return finish_mesh(verts, faces, opts, path);
}

TriangleMesh load_ply(const std::string& path, const MeshOptions& opts) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) parse_fail(path, "missing ply magic");

  struct Element {
    std::string name;
    long count = 0;
    int n_scalar_props = 0;  // before any list property
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string tag;
    row >> tag;
    if (tag == "format") {
      std::string fmt;
      row >> fmt;
      ascii = (fmt == "ascii");
    } else if (tag == "element") {
      Element e;
      row >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) parse_fail(path, "property before element");
      std::string kind;
      row >> kind;
      if (kind == "list")
        elements.back().has_list = true;
      else if (!elements.back().has_list)
        elements.back().n_scalar_props++;
    } else if (tag == "end_header") {
      break;
    } else if (tag == "comment" || tag == "obj_info") {
      continue;
    }
  }
  if (!ascii) parse_fail(path, "only ascii PLY is supported");

  std::vector<Eigen::Vector3d> verts;
  std::vector<Eigen::Vector3i> faces;
  for (const Element& e : elements) {
    if (e.name == "vertex") {
      if (e.n_scalar_props < 3) parse_fail(path, "vertex element lacks x y z");
      verts.resize(e.count);
      for (long i = 0; i < e.count; ++i) {
        if (!next_content_line(in, line)) parse_fail(path, "unexpected end in vertex list");
        std::istringstream row(line);
        if (!(row >> verts[i][0] >> verts[i][1] >> verts[i][2]))
          parse_fail(path, "bad vertex line " + std::to_string(i));
      }
    } else if (e.name == "face") {
      for (long t = 0; t < e.count; ++t) {
        if (!next_content_line(in, line)) parse_fail(path, "unexpected end in face list");
        std::istringstream row(line);
        long count = 0;
        if (!(row >> count) || count < 3) parse_fail(path, "bad face line " + std::to_string(t));
        std::vector<long> poly(count);
        for (long c = 0; c < count; ++c)
          if (!(row >> poly[c])) parse_fail(path, "bad face line " + std::to_string(t));
        append_polygon(faces, poly, path);
      }
    } else {
      for (long i = 0; i < e.count; ++i)
        if (!next_content_line(in, line)) parse_fail(path, "unexpected end in element " + e.name);
    }
  }
  return finish_mesh(verts, faces, opts, path);
}

PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  std::vector<Eigen::Vector3d> pts;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream row(line);
    Eigen::Vector3d p;
    if (!(row >> p[0] >> p[1] >> p[2])) parse_fail(path, "bad line " + std::to_string(lineno));
    pts.push_back(p);
  }
  PointCloud cloud;
  cloud.points.resize(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) cloud.points.row(i) = pts[i];
  return cloud;
}

}  // namespace

ShapeFormat format_from_path(const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "off") return ShapeFormat::OFF;
  if (ext == "obj") return ShapeFormat::OBJ;
  if (ext == "ply") return ShapeFormat::PLY;
  if (ext == "xyz") return ShapeFormat::XYZ;
  throw ParseError(path + ": unknown shape extension '" + ext + "'");
}

LoadedShape load_shape(const std::string& path, ShapeFormat format, const MeshOptions& opts) {
  switch (format) {
    case ShapeFormat::OFF:
      return load_off(path, opts);
    case ShapeFormat::OBJ:
      return load_obj(path, opts);
    case ShapeFormat::PLY:
      return load_ply(path, opts);
    case ShapeFormat::XYZ:
      return load_xyz(path);
  }
  throw ParseError(path + ": unreachable format");
}

LoadedShape load_shape(const std::string& path, const MeshOptions& opts) {
  return load_shape(path, format_from_path(path), opts);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

}  // namespace

void save_mesh(const std::string& path, const TriangleMesh& mesh, ShapeFormat format) {
  std::ofstream out = open_out(path);
  const auto& V = mesh.vertices;
  const auto& F = mesh.faces;
  switch (format) {
    case ShapeFormat::OFF: {
      out << "OFF\n" << V.rows() << " " << F.rows() << " 0\n";
      for (int i = 0; i < V.rows(); ++i) out << V(i, 0) << " " << V(i, 1) << " " << V(i, 2) << "\n";
      for (int t = 0; t < F.rows(); ++t)
        out << "3 " << F(t, 0) << " " << F(t, 1) << " " << F(t, 2) << "\n";
      break;
    }
    case ShapeFormat::OBJ: {
      for (int i = 0; i < V.rows(); ++i)
        out << "v " << V(i, 0) << " " << V(i, 1) << " " << V(i, 2) << "\n";
      for (int t = 0; t < F.rows(); ++t)
        out << "f " << F(t, 0) + 1 << " " << F(t, 1) + 1 << " " << F(t, 2) + 1 << "\n";
      break;
    }
    case ShapeFormat::PLY: {
      out << "ply\nformat ascii 1.0\n";
      out << "element vertex " << V.rows() << "\n";
      out << "property double x\nproperty double y\nproperty double z\n";
      out << "element face " << F.rows() << "\n";
      out << "property list uchar int vertex_indices\nend_header\n";
      for (int i = 0; i < V.rows(); ++i) out << V(i, 0) << " " << V(i, 1) << " " << V(i, 2) << "\n";
      for (int t = 0; t < F.rows(); ++t)
        out << "3 " << F(t, 0) << " " << F(t, 1) << " " << F(t, 2) << "\n";
      break;
    }
    case ShapeFormat::XYZ:
      throw Error("cannot save a mesh as XYZ; use save_point_cloud");
  }
}

void save_point_cloud(const std::string& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < cloud.points.rows(); ++i)
    out << cloud.points(i, 0) << " " << cloud.points(i, 1) << " " << cloud.points(i, 2) << "\n";
}

void save_shape(const std::string& path, const LoadedShape& shape) {
  if (std::holds_alternative<TriangleMesh>(shape))
    save_mesh(path, std::get<TriangleMesh>(shape), format_from_path(path));
  else
    save_point_cloud(path, std::get<PointCloud>(shape));
}

}  // namespace dirmatch
