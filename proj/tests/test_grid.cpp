// Copyright 2026 The phasekit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "phasekit/fft.hpp"
#include "phasekit/grid.hpp"
#include "oracles.hpp"

using namespace phasekit;

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS_AS(RealGrid(Shape{2, 2}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RealGrid(Shape{}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(RealGrid(Shape{2, 0}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(RealGrid(Shape{1}, {std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(
        RealGrid(Shape{1}, {std::numeric_limits<double>::infinity()}),
        std::invalid_argument);
    CHECK_NOTHROW(RealGrid(Shape{2, 3}, std::vector<double>(6, 0.5)));
}

TEST_CASE("norm and inner product") {
    const RealGrid u(Shape{2}, {3.0, 4.0});
    CHECK(norm(u) == Catch::Approx(5.0));

    std::mt19937_64 eng(11);
    const RealGrid v = oracles::random_grid(eng, Shape{4, 3});
    CHECK(inner_product(v, v) == Catch::Approx(norm(v) * norm(v)));

    const RealGrid e1(Shape{2}, {1.0, 0.0});
    const RealGrid e2(Shape{2}, {0.0, 1.0});
    CHECK(inner_product(e1, e2) == 0.0);

    CHECK_THROWS_AS(inner_product(e1, RealGrid(Shape{3}, {1, 2, 3})),
                    std::invalid_argument);
}

TEST_CASE("forward transform matches frozen examples") {
    // size-1 unitary DFT is the identity
    const Spectrum s1 = forward_transform(RealGrid(Shape{1}, {2.0}));
    CHECK(s1[0].real() == Catch::Approx(2.0));
    CHECK(s1[0].imag() == 0.0);

    // brute-force sum with 1/sqrt(2) scaling
    const Spectrum s2 = forward_transform(RealGrid(Shape{2}, {1.0, 1.0}));
    CHECK(s2[0].real() == Catch::Approx(std::sqrt(2.0)).margin(1e-14));
    CHECK(std::abs(s2[1]) < 1e-14);

    const Spectrum sz = forward_transform(RealGrid::zeros(Shape{3, 5}));
    CHECK(norm(sz) == 0.0);
}

TEST_CASE("inverse transform matches frozen examples") {
    const ComplexGrid g1 = inverse_transform(Spectrum(Shape{1}, {Complex(3.0, 0.0)}));
    CHECK(g1[0].real() == Catch::Approx(3.0));

    const ComplexGrid g2 =
        inverse_transform(Spectrum(Shape{2}, {Complex(std::sqrt(2.0), 0.0), Complex(0.0, 0.0)}));
    CHECK(g2[0].real() == Catch::Approx(1.0).margin(1e-14));
    CHECK(g2[1].real() == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("transform agrees with the direct-sum reference") {
    std::mt19937_64 eng(17);
    const std::vector<Shape> shapes = {{1},      {2},    {3},    {5},    {7, 3},
                                       {8},      {12},   {16},   {4, 4}, {6, 5},
                                       {2, 3, 4}, {9, 8}, {17}};
    for (const auto& dims : shapes) {
        const RealGrid u = oracles::random_grid(eng, dims);
        const Spectrum fast = forward_transform(u);
        const Spectrum ref = oracles::forward_reference(u);
        double err = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) err += std::norm(fast[i] - ref[i]);
        CHECK(std::sqrt(err) <= 1e-12 * (1.0 + norm(u)));

        const ComplexGrid back_fast = inverse_transform(fast);
        const ComplexGrid back_ref = oracles::inverse_reference(fast);
        CHECK(distance(back_fast, back_ref) <= 1e-12 * (1.0 + norm(u)));
    }
}

TEST_CASE("unitarity, linearity, round trip") {
    std::mt19937_64 eng(23);

    SECTION("Parseval within 1e-12 relative") {
        for (const auto& dims : std::vector<Shape>{{64}, {31}, {16, 16}, {5, 9, 2}}) {
            const RealGrid u = oracles::random_grid(eng, dims);
            CHECK(norm(forward_transform(u)) ==
                  Catch::Approx(norm(u)).epsilon(1e-12));
        }
    }

    SECTION("linearity") {
        const Shape dims{8, 8};
        const ComplexGrid u = oracles::random_complex_grid(eng, dims);
        const ComplexGrid v = oracles::random_complex_grid(eng, dims);
        const Complex a(1.25, -0.5), b(-2.0, 0.75);
        std::vector<Complex> mix(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) mix[i] = a * u[i] + b * v[i];
        const Spectrum lhs = forward_transform(ComplexGrid(dims, std::move(mix)));
        const Spectrum fu = forward_transform(u);
        const Spectrum fv = forward_transform(v);
        double err = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            err += std::norm(lhs[i] - (a * fu[i] + b * fv[i]));
        }
        CHECK(std::sqrt(err) <= 1e-12 * (norm(u) + norm(v) + 1.0));
    }

    SECTION("round trip for sizes 1..256 per axis") {
        for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                              std::size_t{13}, std::size_t{27}, std::size_t{64},
                              std::size_t{100}, std::size_t{128}, std::size_t{255},
                              std::size_t{256}}) {
            const RealGrid u = oracles::random_grid(eng, Shape{n});
            const ComplexGrid back = inverse_transform(forward_transform(u));
            double err = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) err += std::norm(back[i] - u[i]);
            CHECK(std::sqrt(err) <= 1e-12 * (1.0 + norm(u)));
        }
        const RealGrid u = oracles::random_grid(eng, Shape{8, 8});
        const ComplexGrid back = inverse_transform(forward_transform(u));
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err += std::norm(back[i] - u[i]);
        CHECK(std::sqrt(err) <= 1e-12 * norm(u));
    }
}

TEST_CASE("real-residue rule") {
    const ComplexGrid ok(Shape{2}, {Complex(1.0, 1e-12), Complex(-2.0, 0.0)});
    const RealGrid r = to_real(ok);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == -2.0);

    const ComplexGrid bad(Shape{2}, {Complex(1.0, 0.5), Complex(-2.0, 0.0)});
    CHECK_THROWS_AS(to_real(bad), std::invalid_argument);

    CHECK_NOTHROW(to_real(ComplexGrid::zeros(Shape{4})));
}

TEST_CASE("negated index reflects multi-indices mod dims") {
    const Shape dims{4, 3};
    // site (1,2) -> (-1,-2) mod (4,3) = (3,1) -> 3*3+1 = 10
    CHECK(detail::negated_index(1 * 3 + 2, dims) == 10);
    CHECK(detail::negated_index(0, dims) == 0);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(detail::negated_index(detail::negated_index(i, dims), dims) == i);
    }
}
