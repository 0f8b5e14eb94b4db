#pragma once

// Cell meshes for the volume discretization and flat-triangle meshes for the
// boundary. Cut cells near a curved boundary keep the exact centroid and an
// estimated volume from subsampling; the underlying cube is retained for
// export.

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

namespace lbdie {

enum class DomainKind { Ball, Box, Faceted };

struct DomainShape {
  DomainKind kind = DomainKind::Ball;
  double radius = 1.0;                              // Ball
  Eigen::Vector3d lo{-1, -1, -1}, hi{1, 1, 1};      // Box
  // Faceted: convex polyhedron with the origin inside, planes as (n, n.v0)
  // with unit outward normals; r_in/r_out are the in/circumsphere radii used
  // as fast accept/reject bounds.
  std::shared_ptr<const std::vector<Eigen::Vector4d>> planes;
  double r_in = 0.0, r_out = 0.0;

  bool inside(const Eigen::Vector3d& x) const;
  // Distance along unit direction d from an interior point x to the boundary,
  // capped at `cap`.
  double exit_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& d, double cap) const;
};

struct VolumeCell {
  Eigen::Vector3d centroid;
  double volume = 0.0;
  double fill = 1.0;          // fraction of the cube inside the domain
  Eigen::Vector3i idx;        // grid index of the containing cube
};

struct VolumeMesh {
  DomainShape domain;
  double h = 0.0;             // cube edge
  Eigen::Vector3d origin;     // corner of cube (0,0,0)
  std::vector<VolumeCell> cells;

  double total_volume() const;
};

struct SurfacePanel {
  std::array<Eigen::Vector3d, 3> v;
  Eigen::Vector3d centroid;
  Eigen::Vector3d normal;     // unit, outward
  double area = 0.0;
  double diameter = 0.0;
};

struct SurfaceMesh {
  std::vector<SurfacePanel> panels;

  double total_area() const;
  Eigen::Vector3d vector_area() const;  // sum of n * area; zero for closed surfaces
  double max_diameter() const;
};

// Unit ball volume, n cubes per axis across [-1,1], cut cells subsampled 5^3.
VolumeMesh build_ball_volume(int n);
// Icosphere with `level` subdivision rounds: 20 * 4^level triangles.
SurfaceMesh build_ball_surface(int level);
// Volume grid clipped against the polyhedron the panels of `sm` bound, so the
// cells and the layer potentials discretize the same domain. Clipping against
// the true sphere instead leaves rim cell centroids in the gap between the
// sphere and the inward-sagging facets, on the exterior side of the panel
// surface, where the double layer takes its exterior value.
VolumeMesh build_ball_volume_matched(int n, const SurfaceMesh& sm);

VolumeMesh build_box_volume(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, int n);
SurfaceMesh build_box_surface(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, int n);

void write_vtk_volume(const std::string& path, const VolumeMesh& mesh,
                      const std::vector<std::pair<std::string, std::vector<Eigen::Vector3d>>>&
                          cell_vectors = {});
void write_vtk_surface(const std::string& path, const SurfaceMesh& mesh,
                       const std::vector<std::pair<std::string, std::vector<Eigen::Vector3d>>>&
                           cell_vectors = {});

}  // namespace lbdie
