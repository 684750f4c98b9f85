#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "xylab/wasserstein.hpp"

using namespace xylab;
namespace nb = std::numbers;

namespace {

CircleDistribution random_atoms(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> ang(0.0, two_pi), mass(0.1, 1.0);
    CircleDistribution d;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double m = mass(rng);
        d.atoms.push_back({ang(rng), m});
        total += m;
    }
    for (auto& a : d.atoms) a.mass /= total;
    return d;
}

CircleDistribution rotated(const CircleDistribution& d, double delta) {
    CircleDistribution r = d;
    for (auto& a : r.atoms) a.angle = wrap_angle(a.angle + delta);
    for (auto& b : r.boxes) b.lo = wrap_angle(b.lo + delta);
    return r;
}

}  // namespace

TEST_CASE("distance between point masses is the arc distance") {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.3, nb::pi + 0.3}, std::pair{6.0, 0.4}}) {
        double w = w1_circle(CircleDistribution::point(a), CircleDistribution::point(b));
        CHECK(w == doctest::Approx(arc_distance_rad(a, b)).epsilon(1e-12));
    }
    CHECK(w1_circle(CircleDistribution::point(2.0), CircleDistribution::point(2.0)) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("split mass travels to both sides") {
    CircleDistribution p = CircleDistribution::point(0.0);
    CircleDistribution q;
    q.atoms = {{0.25, 0.5}, {two_pi - 0.25, 0.5}};
    CHECK(w1_circle(p, q) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("uniform distribution against a point") {
    auto grid = FiberGrid::uniform(4096);
    std::vector<double> masses(4096, 1.0 / 4096);
    auto u = CircleDistribution::cell_masses(grid, masses);
    // expected arc distance to a fixed angle is pi/2
    CHECK(w1_circle(u, CircleDistribution::point(0.0)) == doctest::Approx(nb::pi / 2).epsilon(1e-4));
    CHECK(w1_circle(u, CircleDistribution::point(2.7)) == doctest::Approx(nb::pi / 2).epsilon(1e-4));
}

TEST_CASE("box against its own atom") {
    CircleDistribution box;
    box.boxes = {{1.0, 0.5, 1.0}};  // uniform on [1.0, 1.5]
    // transport to the left edge averages distance w/2; to the center, w/4
    CHECK(w1_circle(box, CircleDistribution::point(1.0)) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(w1_circle(box, CircleDistribution::point(1.25)) == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("concentrated von Mises mass sits close to its mode") {
    auto grid = FiberGrid::uniform(256);
    std::vector<double> masses(256);
    double z = 0.0;
    for (int i = 0; i < 256; ++i) {
        masses[static_cast<size_t>(i)] = std::exp(100.0 * (std::cos(grid.nodes[static_cast<size_t>(i)]) - 1.0));
        z += masses[static_cast<size_t>(i)];
    }
    for (auto& m : masses) m /= z;
    double w = w1_circle(CircleDistribution::cell_masses(grid, masses), CircleDistribution::point(0.0));
    // frozen quadrature value of the expected deviation: 0.079956
    CHECK(w == doctest::Approx(oracle::quad_vm_w1_to_point(100.0, 1 << 16)).epsilon(2e-2));
    CHECK(w < 0.15);
}

TEST_CASE("metric axioms on random distributions") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        auto p = random_atoms(rng, 5), q = random_atoms(rng, 7), r = random_atoms(rng, 3);
        double pq = w1_circle(p, q), qp = w1_circle(q, p);
        CHECK(pq == doctest::Approx(qp).epsilon(1e-10));
        CHECK(pq >= 0.0);
        CHECK(w1_circle(p, p) <= 1e-12);
        CHECK(pq <= w1_circle(p, r) + w1_circle(r, q) + 1e-10);
        CHECK(pq <= nb::pi + 1e-12);  // diameter bound
    }
}

TEST_CASE("rotation invariance") {
    std::mt19937_64 rng(29);
    auto p = random_atoms(rng, 6), q = random_atoms(rng, 4);
    double base = w1_circle(p, q);
    for (double delta : {0.1, 1.7, 4.4}) {
        CHECK(w1_circle(rotated(p, delta), rotated(q, delta)) ==
              doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("empirical samples constructor") {
    std::vector<double> angles{0.1, 0.2, 0.3, 0.4};
    auto d = CircleDistribution::samples(angles);
    CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w1_circle(d, d) <= 1e-13);
    // all atoms moved by 0.05 on average when compared against shifted copies
    std::vector<double> shifted_angles{0.15, 0.25, 0.35, 0.45};
    CHECK(w1_circle(d, CircleDistribution::samples(shifted_angles)) ==
          doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("inputs are compared as probabilities") {
    CircleDistribution p = CircleDistribution::point(0.0);
    CircleDistribution q;
    q.atoms = {{1.0, 0.5}};  // total mass 1/2, renormalized internally
    CHECK(w1_circle(p, q) == doctest::Approx(1.0).epsilon(1e-12));

    CircleDistribution empty;
    CHECK_THROWS_AS(w1_circle(p, empty), std::invalid_argument);
}
