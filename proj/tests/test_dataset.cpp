#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edmeta/dataset.hpp"
#include "edmeta/error.hpp"
#include "test_util.hpp"

using namespace edmeta;

TEST_CASE("bundled eight schools") {
  auto d = eight_schools();
  CHECK(d.kind == DataKind::NormalEffects);
  CHECK(d.k() == 8);
  CHECK(d.y == std::vector<double>{28, 8, -3, 7, -1, 1, 18, 12});
  CHECK(d.sigma == std::vector<double>{15, 10, 16, 11, 9, 11, 10, 18});
  CHECK(d.study.front() == "A");
  auto same = load_dataset("builtin:eight-schools");
  CHECK(same.y == d.y);
  CHECK_THROWS_AS(load_dataset("builtin:nine-schools"), IoError);
}

TEST_CASE("effects CSV round trip") {
  std::ostringstream out;
  write_dataset_csv(out, eight_schools());
  std::istringstream in(out.str());
  auto d = read_dataset_csv(in, "mem.csv");
  CHECK(d.y == eight_schools().y);
  CHECK(d.sigma == eight_schools().sigma);
  CHECK(d.study == eight_schools().study);
  std::ostringstream again;
  write_dataset_csv(again, d);
  CHECK(again.str() == out.str());
}

TEST_CASE("arm CSV and whitespace, CRLF, comments free input") {
  std::istringstream in("study,ft,nt,fc,nc\r\ns1, 3, 20, 5, 21\r\ns2,0,15,4,16\n\n");
  auto d = read_dataset_csv(in, "arms.csv");
  CHECK(d.kind == DataKind::BinomialArms);
  REQUIRE(d.k() == 2);
  CHECK(d.events_treat[0] == 3);
  CHECK(d.total_control[1] == 16);
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream back(out.str());
  auto d2 = read_dataset_csv(back, "arms2.csv");
  CHECK(d2.events_control == d.events_control);
}

TEST_CASE("CSV errors name file and line") {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_dataset_csv(in, "bad.csv");
    } catch (const IoError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("").find("bad.csv") != std::string::npos);
  CHECK(message("a,b,c\n1,2,3\n").find("bad.csv:1") != std::string::npos);
  CHECK(message("study,y,sigma\nA,1,2\nB,x,2\n").find("bad.csv:3") != std::string::npos);
  CHECK(message("study,y,sigma\nA,1,2,4\n").find("bad.csv:2") != std::string::npos);
  CHECK(message("study,y,sigma\nA,1,-2\n").find("bad.csv") != std::string::npos);
  CHECK(message("study,ft,nt,fc,nc\nA,5,4,1,2\n").find("bad.csv") != std::string::npos);
  CHECK(message("study,ft,nt,fc,nc\nA,1.5,4,1,2\n").find("bad.csv:2") != std::string::npos);
  CHECK_THROWS_AS(read_dataset_csv(std::filesystem::path("/definitely/missing.csv")), IoError);
}

TEST_CASE("file loading") {
  auto dir = testing::temp_dir("dataset");
  auto path = dir / "d.csv";
  {
    std::ofstream f(path);
    f << "study,y,sigma\nx,1.5,0.5\ny,-2,1\n";
  }
  auto d = load_dataset(path.string());
  CHECK(d.k() == 2);
  CHECK(d.y[1] == -2.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("validation") {
  auto d = eight_schools();
  d.sigma[2] = 0;
  CHECK_THROWS_AS(validate(d), DataError);
  auto e = eight_schools();
  e.y.pop_back();
  CHECK_THROWS_AS(validate(e), DataError);
  MetaDataset empty;
  CHECK_THROWS_AS(validate(empty), DataError);
}

TEST_CASE("log odds ratios") {
  auto d = MetaDataset::binomial_arms({10, 0}, {50, 20}, {5, 3}, {40, 25}, {"a", "b"});
  auto lor = log_odds_ratios(d);
  CHECK(lor.kind == DataKind::NormalEffects);
  // No zero cell: no correction.
  CHECK(lor.y[0] == doctest::Approx(std::log(10.0 * 35.0 / (40.0 * 5.0))).epsilon(1e-14));
  CHECK(lor.sigma[0] == doctest::Approx(std::sqrt(1 / 10.0 + 1 / 40.0 + 1 / 5.0 + 1 / 35.0)).epsilon(1e-14));
  // A zero cell: 0.5 added to all four cells of that study.
  CHECK(lor.y[1] == doctest::Approx(std::log(0.5 * 22.5 / (20.5 * 3.5))).epsilon(1e-14));
  CHECK(lor.sigma[1] == doctest::Approx(std::sqrt(1 / 0.5 + 1 / 20.5 + 1 / 3.5 + 1 / 22.5)).epsilon(1e-14));
  CHECK_THROWS_AS(log_odds_ratios(eight_schools()), DataError);
}
