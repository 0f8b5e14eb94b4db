#include "lbdie/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace lbdie {

bool DomainShape::inside(const Eigen::Vector3d& x) const {
  if (kind == DomainKind::Ball) return x.squaredNorm() <= radius * radius;
  if (kind == DomainKind::Faceted) {
    double r2 = x.squaredNorm();
    if (r2 <= r_in * r_in) return true;
    if (r2 >= r_out * r_out) return false;
    for (const auto& pl : *planes)
      if (pl[0] * x[0] + pl[1] * x[1] + pl[2] * x[2] > pl[3]) return false;
    return true;
  }
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

double DomainShape::exit_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& d,
                                  double cap) const {
  if (kind == DomainKind::Ball) {
    double b = x.dot(d);
    double c = x.squaredNorm() - radius * radius;
    double disc = b * b - c;
    if (disc <= 0.0) return 0.0;
    double t = -b + std::sqrt(disc);
    return std::clamp(t, 0.0, cap);
  }
  if (kind == DomainKind::Faceted) {
    double t = cap;
    for (const auto& pl : *planes) {
      double denom = pl[0] * d[0] + pl[1] * d[1] + pl[2] * d[2];
      if (denom > 1e-300) {
        double gap = pl[3] - (pl[0] * x[0] + pl[1] * x[1] + pl[2] * x[2]);
        t = std::min(t, gap / denom);
      }
    }
    return std::clamp(t, 0.0, cap);
  }
  double t = cap;
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 1e-300) t = std::min(t, (hi[i] - x[i]) / d[i]);
    if (d[i] < -1e-300) t = std::min(t, (lo[i] - x[i]) / d[i]);
  }
  return std::max(t, 0.0);
}

double VolumeMesh::total_volume() const {
  double v = 0.0;
  for (const auto& c : cells) v += c.volume;
  return v;
}

double SurfaceMesh::total_area() const {
  double a = 0.0;
  for (const auto& p : panels) a += p.area;
  return a;
}

Eigen::Vector3d SurfaceMesh::vector_area() const {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& p : panels) s += p.normal * p.area;
  return s;
}

double SurfaceMesh::max_diameter() const {
  double d = 0.0;
  for (const auto& p : panels) d = std::max(d, p.diameter);
  return d;
}

namespace {

VolumeMesh build_grid_volume(const DomainShape& dom, const Eigen::Vector3d& lo,
                             const Eigen::Vector3d& hi, int n) {
  VolumeMesh m;
  m.domain = dom;
  m.h = (hi[0] - lo[0]) / n;
  m.origin = lo;
  const int sub = 5;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Eigen::Vector3d corner = lo + m.h * Eigen::Vector3d(i, j, k);
        int cnt = 0;
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (int a = 0; a < sub; ++a)
          for (int b = 0; b < sub; ++b)
            for (int c = 0; c < sub; ++c) {
              Eigen::Vector3d x =
                  corner + m.h / sub * (Eigen::Vector3d(a, b, c) + Eigen::Vector3d(.5, .5, .5));
              if (dom.inside(x)) {
                ++cnt;
                acc += x;
              }
            }
        if (cnt == 0) continue;
        VolumeCell cell;
        cell.fill = double(cnt) / (sub * sub * sub);
        cell.volume = m.h * m.h * m.h * cell.fill;
        cell.centroid = acc / cnt;
        cell.idx = {i, j, k};
        m.cells.push_back(cell);
      }
  return m;
}

SurfacePanel make_panel(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                        const Eigen::Vector3d& c, const Eigen::Vector3d& outward_hint) {
  SurfacePanel p;
  p.v = {a, b, c};
  p.centroid = (a + b + c) / 3.0;
  Eigen::Vector3d n = (b - a).cross(c - a);
  p.area = 0.5 * n.norm();
  p.normal = n.normalized();
  if (p.normal.dot(outward_hint) < 0.0) {
    std::swap(p.v[1], p.v[2]);
    p.normal = -p.normal;
  }
  p.diameter = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
  return p;
}

}  // namespace

VolumeMesh build_ball_volume(int n) {
  DomainShape dom;
  dom.kind = DomainKind::Ball;
  dom.radius = 1.0;
  return build_grid_volume(dom, {-1, -1, -1}, {1, 1, 1}, n);
}

VolumeMesh build_ball_volume_matched(int n, const SurfaceMesh& sm) {
  if (sm.panels.empty()) throw std::invalid_argument("matched volume needs a surface mesh");
  auto planes = std::make_shared<std::vector<Eigen::Vector4d>>();
  planes->reserve(sm.panels.size());
  DomainShape dom;
  dom.kind = DomainKind::Faceted;
  dom.r_in = std::numeric_limits<double>::max();
  dom.r_out = 0.0;
  for (const auto& p : sm.panels) {
    double off = p.normal.dot(p.v[0]);
    if (off <= 0.0) throw std::invalid_argument("matched volume needs the origin inside");
    planes->push_back({p.normal[0], p.normal[1], p.normal[2], off});
    dom.r_in = std::min(dom.r_in, off);
    for (const auto& v : p.v) dom.r_out = std::max(dom.r_out, v.norm());
  }
  dom.planes = std::move(planes);
  double half = dom.r_out;
  return build_grid_volume(dom, {-half, -half, -half}, {half, half, half}, n);
}

VolumeMesh build_box_volume(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, int n) {
  DomainShape dom;
  dom.kind = DomainKind::Box;
  dom.lo = lo;
  dom.hi = hi;
  return build_grid_volume(dom, lo, hi, n);
}

SurfaceMesh build_ball_surface(int level) {
  // Icosahedron vertices.
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> vx = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : vx) v.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
      {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
      {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
      {8, 6, 7},  {9, 8, 1}};

  for (int lvl = 0; lvl < level; ++lvl) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (vx[a] + vx[b]).normalized();
      vx.push_back(m);
      int id = int(vx.size()) - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (auto& tr : tris) {
      int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
      next.push_back({tr[0], ab, ca});
      next.push_back({tr[1], bc, ab});
      next.push_back({tr[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  SurfaceMesh s;
  s.panels.reserve(tris.size());
  for (auto& tr : tris) {
    Eigen::Vector3d hint = (vx[tr[0]] + vx[tr[1]] + vx[tr[2]]) / 3.0;
    s.panels.push_back(make_panel(vx[tr[0]], vx[tr[1]], vx[tr[2]], hint));
  }
  return s;
}

SurfaceMesh build_box_surface(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, int n) {
  SurfaceMesh s;
  // axis = face normal direction, side = 0 for lo face, 1 for hi face
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      int u = (axis + 1) % 3, w = (axis + 2) % 3;
      Eigen::Vector3d outward = Eigen::Vector3d::Zero();
      outward[axis] = side ? 1.0 : -1.0;
      double plane = side ? hi[axis] : lo[axis];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto pt = [&](int a, int b) {
            Eigen::Vector3d x;
            x[axis] = plane;
            x[u] = lo[u] + (hi[u] - lo[u]) * a / n;
            x[w] = lo[w] + (hi[w] - lo[w]) * b / n;
            return x;
          };
          Eigen::Vector3d p00 = pt(i, j), p10 = pt(i + 1, j), p01 = pt(i, j + 1),
                          p11 = pt(i + 1, j + 1);
          s.panels.push_back(make_panel(p00, p10, p11, outward));
          s.panels.push_back(make_panel(p00, p11, p01, outward));
        }
    }
  return s;
}

namespace {

void write_cell_vectors(std::FILE* f,
                        const std::vector<std::pair<std::string, std::vector<Eigen::Vector3d>>>&
                            cell_vectors,
                        size_t n_cells) {
  if (cell_vectors.empty()) return;
  std::fprintf(f, "CELL_DATA %zu\n", n_cells);
  for (const auto& [name, data] : cell_vectors) {
    if (data.size() != n_cells) throw std::runtime_error("cell data size mismatch: " + name);
    std::fprintf(f, "VECTORS %s double\n", name.c_str());
    for (const auto& v : data) std::fprintf(f, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
  }
}

}  // namespace

void write_vtk_volume(const std::string& path, const VolumeMesh& mesh,
                      const std::vector<std::pair<std::string, std::vector<Eigen::Vector3d>>>&
                          cell_vectors) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);

  std::map<std::array<int, 3>, int> point_id;
  std::vector<std::array<int, 3>> points;
  auto pid = [&](int i, int j, int k) {
    std::array<int, 3> key = {i, j, k};
    auto it = point_id.find(key);
    if (it != point_id.end()) return it->second;
    int id = int(points.size());
    points.push_back(key);
    point_id[key] = id;
    return id;
  };
  // VTK hexahedron corner order: bottom quad ccw, then top quad ccw.
  const int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                            {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  std::vector<std::array<int, 8>> cells;
  cells.reserve(mesh.cells.size());
  for (const auto& c : mesh.cells) {
    std::array<int, 8> ids;
    for (int m = 0; m < 8; ++m)
      ids[m] = pid(c.idx[0] + corner[m][0], c.idx[1] + corner[m][1], c.idx[2] + corner[m][2]);
    cells.push_back(ids);
  }

  std::fprintf(f, "# vtk DataFile Version 3.0\nvolume cells\nASCII\n");
  std::fprintf(f, "DATASET UNSTRUCTURED_GRID\nPOINTS %zu double\n", points.size());
  for (const auto& p : points) {
    Eigen::Vector3d x = mesh.origin + mesh.h * Eigen::Vector3d(p[0], p[1], p[2]);
    std::fprintf(f, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
  }
  std::fprintf(f, "CELLS %zu %zu\n", cells.size(), cells.size() * 9);
  for (const auto& c : cells) {
    std::fprintf(f, "8");
    for (int id : c) std::fprintf(f, " %d", id);
    std::fprintf(f, "\n");
  }
  std::fprintf(f, "CELL_TYPES %zu\n", cells.size());
  for (size_t i = 0; i < cells.size(); ++i) std::fprintf(f, "12\n");
  write_cell_vectors(f, cell_vectors, cells.size());
  std::fclose(f);
}

void write_vtk_surface(const std::string& path, const SurfaceMesh& mesh,
                       const std::vector<std::pair<std::string, std::vector<Eigen::Vector3d>>>&
                           cell_vectors) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "# vtk DataFile Version 3.0\nsurface panels\nASCII\n");
  std::fprintf(f, "DATASET POLYDATA\nPOINTS %zu double\n", mesh.panels.size() * 3);
  for (const auto& p : mesh.panels)
    for (const auto& v : p.v) std::fprintf(f, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
  std::fprintf(f, "POLYGONS %zu %zu\n", mesh.panels.size(), mesh.panels.size() * 4);
  for (size_t i = 0; i < mesh.panels.size(); ++i)
    std::fprintf(f, "3 %zu %zu %zu\n", 3 * i, 3 * i + 1, 3 * i + 2);
  write_cell_vectors(f, cell_vectors, mesh.panels.size());
  std::fclose(f);
}

}  // namespace lbdie
