#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "lbdie/geometry.hpp"

using namespace lbdie;

TEST_CASE("ball volume mesh") {
  auto m = build_ball_volume(12);
  CHECK(m.total_volume() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(0.005));
  for (const auto& c : m.cells) {
    CHECK(c.centroid.norm() <= 1.0 + 1e-12);
    CHECK(c.volume > 0.0);
    CHECK(c.fill <= 1.0);
  }
  auto m2 = build_ball_volume(24);
  CHECK(m2.total_volume() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(0.002));
}

TEST_CASE("volume mesh matched to the panel polyhedron") {
  auto sm = build_ball_surface(2);
  auto vm = build_ball_volume_matched(12, sm);

  // exact polyhedron volume by the divergence theorem (origin inside, flat facets)
  double vpoly = 0.0;
  for (const auto& p : sm.panels) vpoly += p.normal.dot(p.v[0]) * p.area / 3.0;
  CHECK(vpoly < 4.0 * M_PI / 3.0);
  CHECK(vm.total_volume() == doctest::Approx(vpoly).epsilon(0.005));

  // every centroid lies inside the polyhedron, not merely inside the ball
  for (const auto& c : vm.cells) {
    CHECK(vm.domain.inside(c.centroid));
    for (const auto& p : sm.panels) CHECK(p.normal.dot(c.centroid - p.v[0]) <= 1e-12);
  }

  // the clipped mesh loses exactly the sliver between sphere and facets
  auto unmatched = build_ball_volume(12);
  CHECK(vm.total_volume() < unmatched.total_volume());

  // exit distances agree with the support function of the polyhedron
  Eigen::Vector3d d = Eigen::Vector3d(0.3, -0.4, 0.87).normalized();
  double expect = 1e300;
  for (const auto& p : sm.panels) {
    double denom = p.normal.dot(d);
    if (denom > 0.0) expect = std::min(expect, p.normal.dot(p.v[0]) / denom);
  }
  CHECK(vm.domain.exit_distance(Eigen::Vector3d::Zero(), d, 10.0) ==
        doctest::Approx(expect).epsilon(1e-12));

  // a point in the gap between a facet and the sphere is classified outside
  Eigen::Vector3d mid = sm.panels[0].centroid;  // on the facet, |mid| < 1
  CHECK(mid.norm() < 1.0);
  CHECK(vm.domain.inside(0.999 * mid));
  CHECK(!vm.domain.inside((1.0 + 1e-9) * mid));

  CHECK_THROWS_AS(build_ball_volume_matched(8, SurfaceMesh{}), std::invalid_argument);
}

TEST_CASE("box volume mesh is exact") {
  auto m = build_box_volume({-1, -1, -1}, {1, 1, 1}, 4);
  CHECK(m.cells.size() == 64);
  CHECK(m.total_volume() == doctest::Approx(8.0).epsilon(1e-14));
  for (const auto& c : m.cells) CHECK(c.fill == doctest::Approx(1.0));
}

TEST_CASE("icosphere surface") {
  auto s2 = build_ball_surface(2);
  CHECK(s2.panels.size() == 320);
  CHECK(s2.total_area() == doctest::Approx(4.0 * M_PI).epsilon(0.03));

  auto s3 = build_ball_surface(3);
  CHECK(s3.panels.size() == 1280);
  CHECK(s3.total_area() == doctest::Approx(4.0 * M_PI).epsilon(0.008));
  CHECK(std::abs(s3.total_area() - 4 * M_PI) < std::abs(s2.total_area() - 4 * M_PI));

  // closed flat-panel surface: vector area vanishes to roundoff
  CHECK(s3.vector_area().norm() < 1e-13);

  for (const auto& p : s3.panels) {
    CHECK(p.normal.dot(p.centroid) > 0.0);  // outward
    CHECK(p.normal.norm() == doctest::Approx(1.0).epsilon(1e-13));
    for (const auto& v : p.v) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-13));
    // stored orientation matches the normal
    Eigen::Vector3d cr = (p.v[1] - p.v[0]).cross(p.v[2] - p.v[0]);
    CHECK(cr.normalized().isApprox(p.normal, 1e-12));
  }
}

TEST_CASE("box surface") {
  auto s = build_box_surface({0, 0, 0}, {1, 2, 3}, 2);
  CHECK(s.panels.size() == 6 * 2 * 2 * 2);
  CHECK(s.total_area() == doctest::Approx(2 * (1 * 2 + 2 * 3 + 1 * 3)).epsilon(1e-14));
  CHECK(s.vector_area().norm() < 1e-13);
}

TEST_CASE("exit distances") {
  DomainShape ball;
  ball.kind = DomainKind::Ball;
  CHECK(ball.exit_distance({0, 0, 0}, {0, 0, 1}, 10.0) == doctest::Approx(1.0));
  CHECK(ball.exit_distance({0.5, 0, 0}, {1, 0, 0}, 10.0) == doctest::Approx(0.5));
  CHECK(ball.exit_distance({0.5, 0, 0}, {-1, 0, 0}, 10.0) == doctest::Approx(1.5));
  CHECK(ball.exit_distance({0, 0, 0}, {1, 0, 0}, 0.25) == doctest::Approx(0.25));  // capped

  DomainShape box;
  box.kind = DomainKind::Box;
  box.lo = {0, 0, 0};
  box.hi = {1, 1, 1};
  Eigen::Vector3d d(1, 1, 0);
  d.normalize();
  CHECK(box.exit_distance({0.5, 0.25, 0.5}, d, 10.0) == doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("vtk export round trip") {
  auto m = build_box_volume({0, 0, 0}, {1, 1, 1}, 2);
  std::vector<Eigen::Vector3d> data(m.cells.size(), Eigen::Vector3d(1, 2, 3));
  write_vtk_volume("/tmp/vol_test.vtk", m, {{"u", data}});

  std::ifstream f("/tmp/vol_test.vtk");
  std::string line;
  std::getline(f, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(f, line);
  std::getline(f, line);
  CHECK(line == "ASCII");
  std::getline(f, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  std::getline(f, line);
  CHECK(line == "POINTS 27 double");  // 3^3 shared corners

  auto s = build_box_surface({0, 0, 0}, {1, 1, 1}, 1);
  write_vtk_surface("/tmp/surf_test.vtk", s, {{"g", std::vector<Eigen::Vector3d>(
                                                        s.panels.size(), Eigen::Vector3d::Zero())}});
  std::ifstream fs("/tmp/surf_test.vtk");
  std::getline(fs, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  for (int i = 0; i < 3; ++i) std::getline(fs, line);
  CHECK(line == "DATASET POLYDATA");

  std::remove("/tmp/vol_test.vtk");
  std::remove("/tmp/surf_test.vtk");
}
