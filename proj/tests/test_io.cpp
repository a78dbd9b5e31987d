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

#include <sstream>

#include "phasekit/grid_io.hpp"
#include "oracles.hpp"

using namespace phasekit;

TEST_CASE("grid text format round trip") {
    std::mt19937_64 eng(31);
    const RealGrid g = oracles::random_grid(eng, Shape{3, 4}, 7.5);
    std::stringstream ss;
    write_grid_text(ss, g);
    const RealGrid back = read_grid_text(ss);
    REQUIRE(back.dims() == g.dims());
    CHECK(back == g);  // %.17g preserves doubles exactly
}

TEST_CASE("grid text format header") {
    std::istringstream ok("dims: 2 2\n1 2\n3 4\n");
    const RealGrid g = read_grid_text(ok);
    CHECK(g.dims() == Shape{2, 2});
    CHECK(g[3] == 4.0);

    std::istringstream bad_header("shape: 2 2\n1 2 3 4\n");
    CHECK_THROWS_AS(read_grid_text(bad_header), std::invalid_argument);

    std::istringstream truncated("dims: 2 2\n1 2 3\n");
    CHECK_THROWS_AS(read_grid_text(truncated), std::invalid_argument);
}

TEST_CASE("pgm round trip is lossless for 16-bit quantized grids") {
    // values that are exact multiples of max/65535
    std::vector<double> v(6);
    const double maxv = 3.0;
    const long levels[] = {0, 13, 65535, 40000, 1, 9999};
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(levels[i]) * maxv / 65535.0;
    }
    const RealGrid g(Shape{2, 3}, std::move(v));
    std::stringstream ss;
    write_pgm(ss, g);
    const RealGrid back = read_pgm(ss);
    CHECK(back == g);
}

TEST_CASE("pgm rejects invalid input") {
    const RealGrid neg(Shape{1, 1}, {0.0});
    std::stringstream ss;
    CHECK_THROWS_AS(write_pgm(ss, RealGrid(Shape{3}, {1, 2, 3})), std::invalid_argument);

    std::istringstream p5("P5\n2 2\n255\n");
    CHECK_THROWS_AS(read_pgm(p5), std::invalid_argument);

    std::istringstream overrange("P2\n1 1\n10\n99\n");
    CHECK_THROWS_AS(read_pgm(overrange), std::invalid_argument);
}

TEST_CASE("pgm without scale comment decodes raw counts") {
    std::istringstream is("P2\n# some viewer comment\n2 1\n255\n12 255\n");
    const RealGrid g = read_pgm(is);
    CHECK(g.dims() == Shape{1, 2});
    CHECK(g[0] == 12.0);
    CHECK(g[1] == 255.0);
}

TEST_CASE("magnitude file validates nonnegativity") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "phasekit_io_test";
    fs::create_directories(dir);

    write_grid_file(dir / "neg.grid", RealGrid(Shape{2}, {1.0, -1.0}));
    CHECK_THROWS_AS(read_magnitude_file(dir / "neg.grid"), std::invalid_argument);

    write_grid_file(dir / "ok.grid", RealGrid(Shape{2}, {1.0, 2.0}));
    const MagnitudeData m = read_magnitude_file(dir / "ok.grid");
    CHECK(m[1] == 2.0);

    CHECK_THROWS_AS(read_grid_file(dir / "missing.grid"), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("grid file sniffing dispatches on magic") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "phasekit_io_sniff";
    fs::create_directories(dir);

    const RealGrid g(Shape{2, 2}, {0.0, 0.25, 0.5, 1.0});
    write_pgm_file(dir / "g.pgm", g);
    write_grid_file(dir / "g.grid", g);
    CHECK(read_grid_file(dir / "g.pgm").dims() == g.dims());
    CHECK(read_grid_file(dir / "g.grid") == g);
    fs::remove_all(dir);
}
