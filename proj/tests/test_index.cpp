#include "lindex/index.hpp"

#include <doctest.h>

#include <cmath>

using namespace lindex;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModelGeometry square_torus(int res = 48) {
    return build_geometry(GeometrySpec::torus({2 * kPi, 2 * kPi}, {res, res}));
}

} // namespace

TEST_CASE("spectral index on the twisted torus") {
    const auto geom = square_torus();
    struct Case {
        int d, want;
    };
    for (const auto& c : {Case{0, 0}, Case{3, 3}, Case{-2, -2}}) {
        const auto spectral = build_dirac(geom, c.d).spectrum();
        CHECK(spectral_index(spectral) == c.want);
    }
}

TEST_CASE("geometric index equals the twist degree exactly") {
    const auto geom = square_torus(16);
    for (int d = -3; d <= 3; ++d)
        CHECK(geometric_index(geom, d) == doctest::Approx(double(d)).epsilon(1e-12));
    const auto sphere = build_geometry(GeometrySpec::sphere(1.0, 16, 16));
    CHECK(std::abs(geometric_index(sphere, 0)) < 1e-14);
}

TEST_CASE("verify_index_theorem: twisted torus end to end") {
    const auto geom = square_torus();
    const auto rep = verify_index_theorem(geom, 1, {0.1, 0.5, 1.0});
    INFO(rep.notes);
    CHECK(rep.pass);
    CHECK(rep.spectral_index == 1);
    CHECK(rep.geometric_index == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : rep.supertraces) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    for (double v : rep.supertraces_quadrature) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(rep.eta) <= 1e-10);
    CHECK(rep.mckean_singer_drift <= 1e-8);
}

TEST_CASE("verify_index_theorem: all-zero cases pass") {
    const auto torus_rep = verify_index_theorem(square_torus(32), 0, {0.5});
    CHECK(torus_rep.pass);
    CHECK(torus_rep.spectral_index == 0);
    CHECK(std::abs(torus_rep.geometric_index) < 1e-12);

    const auto sphere = build_geometry(GeometrySpec::sphere(1.0, 16, 8));
    DiracOptions opt;
    opt.sphere_theta_points = 64;
    opt.sphere_azimuthal_modes = 2;
    const auto sphere_rep = verify_index_theorem(sphere, 0, {0.5, 1.0}, opt);
    CHECK(sphere_rep.pass);
    CHECK(sphere_rep.spectral_index == 0);
    CHECK(std::abs(sphere_rep.geometric_index) < 1e-12);
    for (double v : sphere_rep.supertraces) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("index is stable under refinement of the spectral discretization") {
    const auto geom = square_torus(32);
    DiracOptions coarse, fine;
    coarse.landau_levels = 24;
    fine.landau_levels = 48;
    for (int d : {1, -3}) {
        const auto a = build_dirac(geom, d, coarse).spectrum();
        const auto b = build_dirac(geom, d, fine).spectrum();
        CHECK(spectral_index(a) == d);
        CHECK(spectral_index(b) == d);
    }
}

TEST_CASE("b-cylinder diagnostic branch") {
    const auto geom = build_geometry(GeometrySpec::b_cylinder(2 * kPi, 60.0, 16, 8));
    const auto rep = verify_index_theorem(geom, 0, {0.3, 1.0});
    CHECK(rep.diagnostic_only);
    CHECK(!rep.spectral_index_valid);
    CHECK(rep.pass);
    for (double v : rep.supertraces) CHECK(std::abs(v) <= 1e-8);
    CHECK(std::abs(rep.geometric_index) < 1e-12);
    CHECK_THROWS_AS(verify_index_theorem(geom, 1, {0.5}), std::invalid_argument);
    // direct b-trace helper agrees
    CHECK(std::abs(b_cylinder_heat_btrace(geom, 0.5)) <= 1e-8);
}

TEST_CASE("psc obstruction check") {
    // round sphere: positive scalar curvature, spectral gap, zero index
    const auto sphere = build_geometry(GeometrySpec::sphere(1.0, 16, 8));
    DiracOptions opt;
    opt.sphere_theta_points = 128;
    opt.sphere_azimuthal_modes = 3;
    const auto rep = psc_obstruction_check(sphere, opt);
    CHECK(rep.applicable);
    CHECK(rep.pass);
    CHECK(rep.kappa_min == doctest::Approx(2.0));
    CHECK(rep.lichnerowicz_bound == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(rep.min_abs_eigenvalue >= rep.lichnerowicz_bound);
    CHECK(rep.kernel_empty);
    CHECK(rep.index == 0);
    CHECK(std::abs(rep.eta) <= 1e-10);
    CHECK(std::abs(rep.geometric_a_roof) < 1e-14); // A-roof has no degree-2 part
    // flat torus: precondition rejects (kappa = 0)
    const auto flat = psc_obstruction_check(square_torus(16));
    CHECK(!flat.applicable);
}

TEST_CASE("gauge invariance of index and geometric side") {
    const auto geom = square_torus(64);
    const auto assembly = build_dirac(geom, 2);
    const auto moved = assembly.gauge_deformed(0.15);
    CHECK(spectral_index(moved.spectrum()) == 2);
    // the geometric side depends only on the flux
    CHECK(geometric_index(geom, 2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("JSON reports are deterministic and carry the schema version") {
    const auto geom = square_torus(32);
    const auto rep1 = verify_index_theorem(geom, 2, {0.5});
    const auto rep2 = verify_index_theorem(geom, 2, {0.5});
    const std::string j1 = index_report_json(rep1);
    const std::string j2 = index_report_json(rep2);
    CHECK(j1 == j2); // bit-identical on identical config
    CHECK(j1.find("\"schema_version\": 1") != std::string::npos);
    CHECK(j1.find("\"spectral_index\": 2") != std::string::npos);

    const auto psc = psc_obstruction_check(build_geometry(GeometrySpec::sphere(1.0, 16, 8)));
    const std::string pj = psc_report_json(psc);
    CHECK(pj.find("\"schema_version\": 1") != std::string::npos);
}
