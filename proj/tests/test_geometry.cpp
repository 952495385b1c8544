#include <doctest.h>

#include "fracpoh/geometry.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace fracpoh;

TEST_CASE("distance: exact near the boundary, capped inside, zero outside") {
  Domain iv = Domain::interval(-1.0, 1.0, 0.5);
  CHECK(iv.distance(Point(0.9, 0)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(iv.distance(Point(1.5, 0)) == 0.0);
  CHECK(iv.distance(Point(0.0, 0)) == doctest::Approx(0.5).epsilon(1e-14));

  Domain ball = Domain::ball(Point(0, 0), 1.0, 0.25);
  CHECK(ball.distance(Point(0, 0)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ball.distance(Point(0.95, 0)) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(ball.distance(Point(2, 0)) == 0.0);
}

TEST_CASE("distance: eikonal property near the boundary") {
  for (const Domain& dom :
       {Domain::ball(Point(0, 0), 1.0), Domain::annulus(0.5, 1.0),
        Domain::ellipse(Point(0, 0), 2.0, 1.0)}) {
    const double cap = dom.distance_cap();
    for (double frac : {0.1, 0.25, 0.45}) {
      // points at depth frac*cap/2 along a few directions
      for (double theta : {0.3, 1.2, 2.8, 4.4}) {
        Point dir(std::cos(theta), std::sin(theta));
        // march inward from the outer boundary
        Point z = dom.shape() == Domain::Shape::annulus ? Point(dir) : Point(dir);
        if (dom.shape() == Domain::Shape::ellipse) z = Point(2.0 * dir[0], dir[1]);
        Point x = z * (1.0 - 1e-9);
        // walk inward along -z until depth
        double target = frac * 0.5 * cap;
        Point inward = -z.normalized();
        Point probe = x + target * inward;
        if (!dom.inside(probe)) continue;
        if (dom.exact_distance(probe) > 0.5 * cap) continue;
        Point g = dom.distance_gradient(probe);
        CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("boundary normals agree with the interior distance gradient") {
  Domain el = Domain::ellipse(Point(0, 0), 2.0, 1.0);
  BoundaryQuadrature bq = boundary_nodes(el, 64);
  for (size_t j = 0; j < bq.size(); j += 7) {
    Point x = bq.nodes[j] - 1e-4 * bq.normals[j];
    Point g = el.distance_gradient(x);  // points inward
    CHECK((g + bq.normals[j]).norm() <= 1e-3);
  }
}

TEST_CASE("star_shape_margin: ball, shifted ball, annulus") {
  Domain ball = Domain::ball(Point(0, 0), 1.0);
  CHECK(star_shape_margin(ball, Point(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));

  Domain shifted = Domain::ball(Point(0.5, 0), 1.0);
  CHECK(star_shape_margin(shifted, Point(0, 0)) == doctest::Approx(0.5).epsilon(1e-9));

  Domain ann = Domain::annulus(0.5, 1.0);
  CHECK(star_shape_margin(ann, Point(0.7, 0)) < 0.0);

  CHECK_THROWS_AS(star_shape_margin(ball, Point(2, 0)), parameter_error);
}

TEST_CASE("star_shape_margin: invariant under rigid rotation") {
  Domain el = Domain::ellipse(Point(0, 0), 2.0, 1.0);
  double m0 = star_shape_margin(el, Point(0.3, 0.1));
  // rotate domain and origin by swapping axes (90-degree rotation)
  Domain el90 = Domain::ellipse(Point(0, 0), 1.0, 2.0);
  double m90 = star_shape_margin(el90, Point(-0.1, 0.3));
  CHECK(m0 == doctest::Approx(m90).epsilon(1e-10));
}

TEST_CASE("boundary_nodes: 1-D endpoints, circle, ellipse arclength") {
  Domain iv = Domain::interval(-1, 1);
  BoundaryQuadrature b1 = boundary_nodes(iv, 16);
  REQUIRE(b1.size() == 2);
  CHECK(b1.nodes[0][0] == -1.0);
  CHECK(b1.normals[0][0] == -1.0);
  CHECK(b1.weights[0] == 1.0);
  CHECK(b1.nodes[1][0] == 1.0);
  CHECK(b1.normals[1][0] == 1.0);

  Domain ball = Domain::ball(Point(0, 0), 1.0);
  BoundaryQuadrature b2 = boundary_nodes(ball, 256);
  double total = 0;
  for (double w : b2.weights) total += w;
  CHECK(total == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-10));

  Domain el = Domain::ellipse(Point(0, 0), 2.0, 1.0);
  BoundaryQuadrature b3 = boundary_nodes(el, 512);
  total = 0;
  for (double w : b3.weights) total += w;
  // adaptive arclength oracle
  auto speed = [](double t) { return std::hypot(2.0 * std::sin(t), std::cos(t)); };
  double arc = oracles::integrate(speed, 0.0, 2.0 * std::numbers::pi, 1e-12);
  CHECK(total == doctest::Approx(arc).epsilon(1e-6));

  for (size_t j = 0; j < b3.size(); ++j)
    CHECK(b3.normals[j].norm() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(boundary_nodes(ball, 1), parameter_error);
}

TEST_CASE("build_grid 1-D: uniform and graded") {
  Domain iv = Domain::interval(-1, 1);
  Grid uniform = build_grid(iv, 16, 1.0);
  REQUIRE(uniform.size() == 16);
  CHECK(uniform.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double spacing = uniform.vertices[1] - uniform.vertices[0];
  for (size_t k = 1; k < uniform.vertices.size(); ++k)
    CHECK(uniform.vertices[k] - uniform.vertices[k - 1] ==
          doctest::Approx(spacing).epsilon(1e-10));

  Grid graded = build_grid(iv, 256, 2.0);
  CHECK(graded.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double first = graded.vertices[1] - graded.vertices[0];
  CHECK(first < spacing / 4.0);  // clustering toward the boundary
  for (const Point& x : graded.nodes) CHECK(iv.inside(x));

  CHECK_THROWS_AS(build_grid(iv, 4, 1.0), parameter_error);
}

TEST_CASE("build_grid 2-D: disk area from cut cells") {
  Domain ball = Domain::ball(Point(0, 0), 1.0);
  Grid g = build_grid(ball, 64, 1.0);
  CHECK(g.weights.sum() ==
        doctest::Approx(std::numbers::pi).epsilon(0.005));
  for (const Point& x : g.nodes) CHECK(ball.inside(x));
  CHECK_THROWS_AS(build_grid(ball, 64, 2.0), parameter_error);
}
