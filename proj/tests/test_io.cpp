#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdag/io.hpp"
#include "netdag/rng.hpp"

#include <cstdio>
#include <fstream>

using namespace netdag;

TEST_CASE("csv round trip is bit exact") {
  Rng rng(61);
  for (int rep = 0; rep < 5; ++rep) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    const Index p = 1 + static_cast<Index>(rng.below(8));
    Matrix m(n, p);
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < n; ++i)
        m(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-12.0, 12.0));
    std::vector<std::string> headers;
    for (Index j = 0; j < p; ++j) headers.push_back("c" + std::to_string(j));
    const std::string path = "io_roundtrip_tmp.csv";
    write_csv(path, m, headers);
    NamedMatrix back = read_csv(path);
    std::remove(path.c_str());
    CHECK(back.headers == headers);
    REQUIRE(back.values.rows() == n);
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < n; ++i) CHECK(back.values(i, j) == m(i, j));
  }
}

TEST_CASE("mask csv round trip") {
  Rng rng(62);
  BoolMatrix mask(6, 6);
  for (Index j = 0; j < 6; ++j)
    for (Index i = 0; i < 6; ++i) mask(i, j) = rng.coin();
  const std::string path = "io_mask_tmp.csv";
  write_mask_csv(path, mask);
  BoolMatrix back = read_mask_csv(path);
  std::remove(path.c_str());
  CHECK((back.array() == mask.array()).all());
}

TEST_CASE("malformed csv is rejected") {
  const std::string path = "io_bad_tmp.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_AS(read_csv(path), std::invalid_argument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_csv("does_not_exist_anywhere.csv"), std::invalid_argument);
}
