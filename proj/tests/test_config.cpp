#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "agdmm/config.hpp"
#include "agdmm/error.hpp"

using namespace agdmm;

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "# experiment\n"
      "scheme = kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7\n"
      "\n"
      "model = race:shift=1,rate=2,seed=3   # trailing comment\n"
      "seed = 9\n"
      "trials = 50\n"
      "format = csv\n");
  CHECK(cfg.scheme == "kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7");
  CHECK(cfg.model == "race:shift=1,rate=2,seed=3");
  CHECK(cfg.seed == 9);
  CHECK(cfg.trials == 50);
  CHECK(cfg.format == "csv");
  CHECK(cfg.matrix_seed == 1);

  const ExperimentConfig again = ExperimentConfig::parse(cfg.to_text());
  CHECK(again.to_text() == cfg.to_text());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("colour = red\n"), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::parse("seed = x\n"), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::parse("just text\n"), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::parse("format = xml\n"), ParseError);
}

TEST_CASE("matrices from seed and from files") {
  ExperimentConfig cfg;
  cfg.scheme = "kind=ag-c3;curve=hermitian:u=2;t=2;r=4;s=2;m=1;n=1;p=2;N=6;seed=7";
  const SchemeInstance inst = build(SchemeSpec::parse(cfg.scheme));
  const auto [A, B] = load_matrices(cfg, inst);
  CHECK(A.rows() == 2);
  CHECK(A.cols() == 4);
  CHECK(B.rows() == 4);
  const auto [A2, B2] = load_matrices(cfg, inst);
  CHECK(A == A2);
  CHECK(B == B2);

  const std::string path = "test_config_a.txt";
  {
    std::ofstream f(path);
    write_matrix(f, A);
  }
  cfg.a_file = path;
  cfg.matrix_seed = 5;
  CHECK(load_matrices(cfg, inst).first == A);
  std::remove(path.c_str());
  cfg.a_file = "missing-file.txt";
  CHECK_THROWS(load_matrices(cfg, inst));
}
