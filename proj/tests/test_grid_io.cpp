#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "tomotv/grid.hpp"
#include "tomotv/io.hpp"

using namespace tomotv;

TEST_CASE("Grid2D basics and column-major layout") {
    Grid2D g(3, 2);
    CHECK_THROWS_AS(Grid2D(0, 5), std::invalid_argument);
    g(1, 0) = 4.0;
    g(0, 1) = 7.0;
    CHECK(g[1] == 4.0);       // (1,0) is the second element of the first column
    CHECK(g[3] == 7.0);       // (0,1) starts the second column
    CHECK(g.size() == 6);
    CHECK(sum(g) == 11.0);
    CHECK(max_value(g) == 7.0);
    CHECK(min_value(g) == 0.0);
}

TEST_CASE("grid file round trip is lossless") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> U(-10, 10);
    GridFile gf;
    gf.kind = "sinogram";
    gf.spacing1 = 0.5;
    gf.spacing2 = 1.5;
    gf.grid = Grid2D(17, 9);
    for (std::size_t q = 0; q < gf.grid.size(); ++q) gf.grid[q] = U(rng);
    gf.grid[3] = 1.0 / 3.0;  // not exactly representable in decimal

    const std::string path = "test_grid_roundtrip.pfg";
    save_grid(path, gf);
    GridFile back = load_grid(path);
    CHECK(back.kind == gf.kind);
    CHECK(back.spacing1 == gf.spacing1);
    CHECK(back.spacing2 == gf.spacing2);
    CHECK(back.grid == gf.grid);
    std::filesystem::remove(path);
}

TEST_CASE("grid file loader rejects garbage") {
    const std::string path = "test_grid_bad.pfg";
    {
        std::ofstream f(path);
        f << "NOTPFG\n";
    }
    CHECK_THROWS_AS(load_grid(path), std::runtime_error);
    CHECK_THROWS_AS(load_grid("does_not_exist.pfg"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("pgm export writes a valid header") {
    Grid2D g(4, 5);
    for (std::size_t q = 0; q < g.size(); ++q) g[q] = static_cast<double>(q);
    const std::string path = "test_grid.pgm";
    save_pgm16(path, g);
    std::ifstream f(path, std::ios::binary);
    std::string magic;
    int w, h, maxval;
    f >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 5);
    CHECK(h == 4);
    CHECK(maxval == 65535);
    f.close();
    CHECK(std::filesystem::file_size(path) >= 2u * 4 * 5);
    std::filesystem::remove(path);
}

TEST_CASE("key value files: comments, trimming, overrides") {
    const std::string path = "test_kv.cfg";
    {
        std::ofstream f(path);
        f << "# header comment\n";
        f << "alpha = 6\n";
        f << "  beta=0.001  # trailing comment\n";
        f << "name = two_discs\n";
        f << "alpha = 7\n";  // later key wins
    }
    KeyValueMap kv = read_key_value_file(path);
    CHECK(kv.at("alpha") == "7");
    CHECK(kv.at("beta") == "0.001");
    CHECK(kv.at("name") == "two_discs");
    std::filesystem::remove(path);

    write_key_value_file(path, kv, "round trip");
    KeyValueMap back = read_key_value_file(path);
    CHECK(back == kv);
    std::filesystem::remove(path);
}

TEST_CASE("format_double round trips") {
    for (double v : {1.0 / 3.0, 1e-300, 6.0221408e23, -0.0, 125.0}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}
