#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doppler/atom_physics.hpp"
#include "doppler/cooling_dynamics.hpp"
#include "doppler/errors.hpp"
#include "doppler/estimation.hpp"
#include "oracles.hpp"

using namespace doppler;
using doctest::Approx;

namespace {

const AtomSpecies cr = chromium52();

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, int n)
{
    auto v = linspace(std::log(a), std::log(b), n);
    for (auto& x : v)
        x = std::exp(x);
    return v;
}

std::vector<ScanPoint> intensity_points(double ky, double r, const std::vector<double>& is)
{
    std::vector<ScanPoint> p;
    for (double i : is)
        p.push_back({i, *steady_state_with_heating(ky, 0.24, r, i, -0.8, cr), std::nullopt});
    return p;
}

}  // namespace

TEST_CASE("exponential fit recovers a noiseless transient")
{
    const auto t = linspace(0.0, 0.25, 50);
    std::vector<double> y;
    for (double x : t)
        y.push_back(transient(1e-3, 334e-6, 50e-3, x));
    const auto f = fit_exponential(t, y);
    REQUIRE(f.converged);
    CHECK(oracle::rel(f.parameter("T_inf"), 334e-6) < 1e-6);
    CHECK(oracle::rel(f.parameter("T0"), 1e-3) < 1e-6);
    CHECK(oracle::rel(f.parameter("tau"), 50e-3) < 1e-6);
    REQUIRE(f.standard_errors.has_value());
    REQUIRE(f.covariance.has_value());
    CHECK(f.covariance->size() == 9);
    CHECK(f.residual_norm >= 0.0);
}

TEST_CASE("exponential fit round trip")
{
    const auto t = linspace(0.0, 0.25, 40);
    std::vector<double> y;
    for (double x : t)
        y.push_back(transient(900e-6, 210e-6, 31e-3, x));
    const auto a = fit_exponential(t, y);
    std::vector<double> y2;
    for (double x : t)
        y2.push_back(transient(a.parameter("T0"), a.parameter("T_inf"), a.parameter("tau"), x));
    const auto b = fit_exponential(t, y2);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(oracle::rel(b.parameters[k], a.parameters[k]) < 1e-8);
}

TEST_CASE("exponential fit with noise (seeded)")
{
    // 2% multiplicative noise, 50 samples; tolerance from a 1000-seed
    // calibration (99th percentile of |tau error| ~5.5%).
    const auto t = linspace(0.0, 0.25, 50);
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> noise(0.0, 0.02);
    int within = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> y;
        for (double x : t)
            y.push_back(transient(1e-3, 334e-6, 50e-3, x) * (1.0 + noise(rng)));
        const auto f = fit_exponential(t, y);
        CHECK(f.converged);
        if (oracle::rel(f.parameter("tau"), 50e-3) < 0.10)
            ++within;
    }
    CHECK(within == seeds);
}

TEST_CASE("exponential fit: time shift changes only T0")
{
    auto t = linspace(0.0, 0.2, 30);
    std::vector<double> y;
    for (double x : t)
        y.push_back(transient(1e-3, 300e-6, 40e-3, x) * (1.0 + 0.01 * std::sin(37.0 * x)));
    const auto a = fit_exponential(t, y);
    for (auto& x : t)
        x += 0.05;
    const auto b = fit_exponential(t, y);
    CHECK(b.parameter("tau") == Approx(a.parameter("tau")).epsilon(1e-7));
    CHECK(b.parameter("T_inf") == Approx(a.parameter("T_inf")).epsilon(1e-7));
    const double t0_shifted = transient(a.parameter("T0"), a.parameter("T_inf"), a.parameter("tau"), -0.05);
    CHECK(b.parameter("T0") == Approx(t0_shifted).epsilon(1e-6));
    CHECK(b.parameter("T0") > a.parameter("T0"));
}

TEST_CASE("exponential fit preconditions")
{
    const auto t = linspace(0.0, 0.1, 10);
    std::vector<double> flat(t.size(), 5e-4);
    CHECK_THROWS_AS(fit_exponential(t, flat), UnidentifiableError);
    const std::vector<double> few{0.0, 0.1, 0.2};
    const std::vector<double> fy{1.0, 0.5, 0.3};
    CHECK_THROWS_AS(fit_exponential(few, fy), ValidationError);
    std::vector<double> unsorted = t;
    std::swap(unsorted[2], unsorted[3]);
    std::vector<double> y(t.size(), 1.0);
    y[0] = 2.0;
    CHECK_THROWS_AS(fit_exponential(unsorted, y), ValidationError);
}

TEST_CASE("exponential fit on a trace window")
{
    TemperatureTrace trace;
    for (double x : linspace(0.0, 0.3, 301))
        trace.samples.push_back({x, transient(1e-3, 90e-6, 6e-3, x), transient(1e-3, 300e-6, 45e-3, x),
                                 0, 0, 0, {}});
    const auto y = fit_exponential(trace, Axis::y, 0.0, 0.3);
    CHECK(y.parameter("tau") == Approx(45e-3).epsilon(1e-6));
    const auto z = fit_exponential(trace, Axis::z, 0.0, 0.05);
    CHECK(z.parameter("tau") == Approx(6e-3).epsilon(1e-6));
    CHECK_THROWS_AS(fit_exponential(trace, Axis::y, 0.1, 0.102), ValidationError);
}

TEST_CASE("intensity scan fit: noiseless recovery")
{
    const auto pts = intensity_points(0.11, 2.6e-26, logspace(1e-4, 4e-3, 8));
    const auto f = fit_intensity_scan(pts, 0.24, -0.8, cr);
    REQUIRE(f.converged);
    CHECK(oracle::rel(f.parameter("kappa_y"), 0.11) < 1e-8);
    CHECK(oracle::rel(f.parameter("R"), 2.6e-26) < 1e-8);

    // regenerate from the fit and refit
    const auto again = fit_intensity_scan(
        intensity_points(f.parameter("kappa_y"), f.parameter("R"), logspace(1e-4, 4e-3, 8)), 0.24,
        -0.8, cr);
    CHECK(oracle::rel(again.parameter("kappa_y"), f.parameter("kappa_y")) < 1e-8);
    CHECK(oracle::rel(again.parameter("R"), f.parameter("R")) < 1e-8);
}

TEST_CASE("intensity scan fit with 3% noise (seeded)")
{
    // Calibrated over 1000 seeds: ~96% meet both bounds on this grid, so a
    // fixed seed is used and the aggregate rate is checked as well.
    const auto is = logspace(1e-4, 4e-3, 8);
    const auto clean = intensity_points(0.11, 2.6e-26, is);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.03);
    int ok = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        auto p = clean;
        for (auto& q : p)
            q.y *= 1.0 + noise(rng);
        const auto f = fit_intensity_scan(p, 0.24, -0.8, cr);
        if (f.converged && oracle::rel(f.parameter("kappa_y"), 0.11) < 0.05 &&
            oracle::rel(f.parameter("R"), 2.6e-26) < 0.15)
            ++ok;
    }
    CHECK(ok >= 0.9 * seeds);
}

TEST_CASE("weighted fits: doubling the errors doubles the standard errors")
{
    auto pts = intensity_points(0.11, 2.6e-26, logspace(1e-4, 4e-3, 8));
    for (std::size_t k = 0; k < pts.size(); ++k) {
        pts[k].y *= 1.0 + 0.02 * std::cos(3.0 * static_cast<double>(k));
        pts[k].y_err = 0.03 * pts[k].y;
    }
    const auto a = fit_intensity_scan(pts, 0.24, -0.8, cr);
    for (auto& p : pts)
        p.y_err = 2.0 * *p.y_err;
    const auto b = fit_intensity_scan(pts, 0.24, -0.8, cr);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (const char* name : {"kappa_y", "R"}) {
        CHECK(b.parameter(name) == Approx(a.parameter(name)).epsilon(1e-7));
        CHECK(b.standard_error(name) == Approx(2.0 * a.standard_error(name)).epsilon(1e-5));
    }
}

TEST_CASE("intensity scan preconditions")
{
    const auto two = intensity_points(0.11, 2.6e-26, {1e-3, 4e-3});
    CHECK_THROWS_AS(fit_intensity_scan(two, 0.24, -0.8, cr), ValidationError);
    const auto narrow = intensity_points(0.11, 2.6e-26, {1e-3, 1.5e-3, 2e-3, 2.5e-3});
    CHECK_THROWS_AS(fit_intensity_scan(narrow, 0.24, -0.8, cr), ValidationError);
    auto bad = intensity_points(0.11, 2.6e-26, logspace(1e-4, 4e-3, 5));
    bad[1].x = 0.0;
    CHECK_THROWS_AS(fit_intensity_scan(bad, 0.24, -0.8, cr), ValidationError);
    bad = intensity_points(0.11, 2.6e-26, logspace(1e-4, 4e-3, 5));
    bad[2].y_err = 0.0;
    CHECK_THROWS_AS(fit_intensity_scan(bad, 0.24, -0.8, cr), ValidationError);
}

TEST_CASE("optical density model")
{
    const auto m = od_scan_model(0.11, 0.24, 4.5, 2.6e-26, 1.6e-3, -0.8);
    CHECK(m.kappa_y_star == Approx(0.11 / 4.5));
    CHECK(m.kappa_star == Approx(0.24 / 4.5));
    CHECK(*m.evaluate(4.5, cr) ==
          Approx(*steady_state_with_heating(0.11, 0.24, 2.6e-26, 1.6e-3, -0.8, cr)).epsilon(1e-12));
    double prev = 1.0;
    for (double od = 1.0; od <= 10.0; od += 0.5) {
        const double t = *m.evaluate(od, cr);
        CHECK(t < prev);
        prev = t;
    }
    CHECK_THROWS_AS(od_scan_model(0.11, 0.24, 0.0, 2.6e-26, 1.6e-3, -0.8), ValidationError);
}

TEST_CASE("optical density refit")
{
    const auto truth = od_scan_model(0.13, 0.24, 4.5, 2.6e-26, 1.6e-3, -0.8);
    std::vector<ScanPoint> pts;
    for (double od : linspace(1.0, 10.0, 12))
        pts.push_back({od, *truth.evaluate(od, cr), std::nullopt});
    const auto start = od_scan_model(0.11, 0.24, 4.5, 2.6e-26, 1.6e-3, -0.8);
    const auto f = refit_od_scan(pts, start, cr);
    REQUIRE(f.converged);
    CHECK(f.names.size() == 1);
    CHECK(oracle::rel(f.parameter("kappa_y_star"), 0.13 / 4.5) < 1e-8);

    auto regen = start;
    regen.kappa_y_star = f.parameter("kappa_y_star");
    std::vector<ScanPoint> again;
    for (const auto& p : pts)
        again.push_back({p.x, *regen.evaluate(p.x, cr), std::nullopt});
    CHECK(oracle::rel(refit_od_scan(again, start, cr).parameter("kappa_y_star"),
                      f.parameter("kappa_y_star")) < 1e-8);
}

TEST_CASE("levenberg-marquardt reports rank deficiency")
{
    // p0 and p1 only enter as a sum
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{2, 4, 6, 8, 10};
    auto model = [](double xv, std::span<const double> p) { return (p[0] + p[1]) * xv; };
    CHECK_THROWS_AS(levenberg_marquardt(model, x, y, std::nullopt, {"a", "b"}, {1.0, 0.5}),
                    UnidentifiableError);
}

TEST_CASE("levenberg-marquardt without convergence keeps the last iterate")
{
    const auto t = linspace(0.0, 0.25, 50);
    std::vector<double> y;
    for (double x : t)
        y.push_back(transient(1e-3, 334e-6, 50e-3, x));
    LeastSquaresOptions o;
    o.max_iterations = 1;
    const auto f = fit_exponential(t, y, o);
    CHECK_FALSE(f.converged);
    CHECK_FALSE(f.standard_errors.has_value());
    CHECK(f.parameters.size() == 3);
    CHECK(f.iterations == 1);
}

TEST_CASE("scan CSV")
{
    std::vector<ScanPoint> pts{{1e-4, 3.1e-4, std::nullopt}, {2e-3, 2.9e-4, std::nullopt}};
    std::stringstream out;
    write_scan_csv(out, pts);
    const auto back = read_scan_csv(out);
    REQUIRE(back.size() == 2);
    CHECK(back[1].x == Approx(2e-3).epsilon(1e-12));
    CHECK(back[0].y == Approx(3.1e-4).epsilon(1e-12));
    CHECK_FALSE(back[0].y_err.has_value());

    std::stringstream with_err("# measured\nx,y,y_err\n0.001,0.0003,0.00001\n0.002,0.00029,0.00001\n");
    const auto e = read_scan_csv(with_err);
    REQUIRE(e.size() == 2);
    CHECK(*e[0].y_err == Approx(1e-5));

    std::stringstream bad_header("a,b\n1,2\n");
    CHECK_THROWS_AS(read_scan_csv(bad_header), ValidationError);
    std::stringstream bad_value("x,y\n1,abc\n");
    CHECK_THROWS_AS(read_scan_csv(bad_value), ValidationError);
}
