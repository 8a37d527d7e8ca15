#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lexc/report.hpp"

using namespace lexc;

TEST_CASE("criterion bands") {
  const auto c = Criterion::band("C0", "demo", "oracle", "anchor", 1.0, 0.5, 1.5);
  CHECK(c.pass);
  CHECK(c.gated);
  CHECK_FALSE(Criterion::band("C0", "", "", "", 2.0, 0.5, 1.5).pass);
  CHECK_FALSE(Criterion::band("C0", "", "", "", std::nan(""), 0.5, 1.5).pass);
  CHECK(Criterion::band("C0", "", "", "", 0.5, 0.5, 1.5).pass);  // closed band
}

TEST_CASE("all_pass ignores informational lines") {
  Report r;
  r.experiment = "demo";
  r.criteria.push_back(Criterion::band("a", "", "", "", 1.0, 0.0, 2.0));
  auto info = Criterion::band("b", "", "", "", 9.0, 0.0, 2.0);
  info.gated = false;
  r.criteria.push_back(info);
  CHECK(r.all_pass());
  const std::string lines = format_criteria(r);
  CHECK(lines.find("PASS") != std::string::npos);
  CHECK(lines.find("INFO") != std::string::npos);
  CHECK(lines.find("FAIL") == std::string::npos);
  r.criteria.push_back(Criterion::band("c", "", "", "", 9.0, 0.0, 2.0));
  CHECK_FALSE(r.all_pass());
  CHECK(r.summary()["all_pass"] == false);
}

TEST_CASE("JSON keys are sorted and output is UTF-8 text") {
  Json j = Json::object();
  j["zeta"] = 1;
  j["alpha"] = 2;
  j["mid"] = {{"y", 1}, {"b", "\xc3\xa9"}};
  const std::string s = dump_json(j);
  CHECK(s.find("\"alpha\"") < s.find("\"mid\""));
  CHECK(s.find("\"mid\"") < s.find("\"zeta\""));
  CHECK(s.find("\"b\"") < s.find("\"y\""));
  CHECK(s.back() == '\n');
  CHECK(s.find("\xc3\xa9") != std::string::npos);
}

TEST_CASE("CSV text uses a header, '.' decimals and LF") {
  CsvTable t;
  t.header = {"x", "y"};
  t.add({0.5, 1e-20});
  t.add({-2.0, 3.0});
  const std::string s = csv_text(t);
  CHECK(s.rfind("x,y\n", 0) == 0);
  CHECK(s.find('\r') == std::string::npos);
  CHECK(s.find("0.5,") != std::string::npos);
  std::istringstream is(s);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) ++n;
  CHECK(n == 3);
}

TEST_CASE("write_report lays out the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "lexc_report_test";
  std::filesystem::remove_all(dir);
  Report r;
  r.experiment = "demo";
  r.estimates["v"] = 1.5;
  r.criteria.push_back(Criterion::band("a", "", "", "", 1.0, 0.0, 2.0));
  r.tables["curve"].header = {"x"};
  r.tables["curve"].add({1.0});
  Manifest m;
  m.seed = 3;
  m.experiment = "demo";
  m.config_text = "[experiment]\nkind = closed_forms\n";
  write_report(r, m, dir.string());
  for (const char* f : {"summary.json", "manifest.json", "config.ini", "curve.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "summary.json");
  const auto back = Json::parse(in);
  CHECK(back["all_pass"] == true);
  CHECK(back["estimates"]["v"] == 1.5);
  std::filesystem::remove_all(dir);
}
