#include <doctest.h>

#include <cmath>

#include "pim/quadrature.hpp"

TEST_SUITE("quadrature") {

TEST_CASE("gauss-hermite moments of the standard normal") {
    for (std::size_t n : {8u, 32u, 64u}) {
        const auto& r = pim::gauss_hermite_cached(n);
        CHECK(r.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.integrate([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(r.integrate([](double x) { return x * x * x * x; }) == doctest::Approx(3.0).epsilon(1e-13));
    }
    const auto& r = pim::gauss_hermite_cached(64);
    CHECK(r.integrate([](double x) { return std::cos(x); }) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
    CHECK(r.integrate([](double x) { return std::exp(0.7 * x); }) == doctest::Approx(std::exp(0.245)).epsilon(1e-13));
}

TEST_CASE("gauss-legendre") {
    const auto r = pim::gauss_legendre(10);
    CHECK(r.integrate([](double x) { return x * x; }) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(pim::integrate_legendre([](double x) { return std::exp(x); }, 0.0, 2.0) ==
          doctest::Approx(std::expm1(2.0)).epsilon(1e-13));
}

TEST_CASE("nested moments") {
    // E exp(p |Z|) = 2 exp(p^2/2) Phi(p)
    const double p = 1.5;
    const double exact = 2.0 * std::exp(0.5 * p * p) * 0.5 * std::erfc(-p / std::sqrt(2.0));
    const auto est = pim::nested_exp_moment([&](double z) { return p * std::abs(z); }, {0.0});
    CHECK(est.status == pim::NestedEstimate::Status::converged);
    CHECK(est.value == doctest::Approx(exact).epsilon(1e-9));

    const auto bad = pim::nested_exp_moment([](double z) { return 0.75 * z * z; });
    CHECK(bad.status == pim::NestedEstimate::Status::divergent);
}

}
