#include <sstream>

#include "doctest.h"
#include "spotter/profile_table.hpp"
#include "support/fixtures.hpp"

using namespace spotter;

TEST_CASE("duration formatting") {
  CHECK(format_duration(0) == "0.000");
  CHECK(format_duration(43) == "0.043");
  CHECK(format_duration(59999) == "59.999");
  CHECK(format_duration(60000) == "1:00.000");
  CHECK(format_duration(68564) == "1:08.564");
  CHECK(format_duration(1130691) == "18:50.691");
  CHECK(format_duration(3600000) == "60:00.000");
}

TEST_CASE("percent formatting") {
  CHECK(format_percent(1090) == "10.90");
  CHECK(format_percent(1) == "0.01");
  CHECK(format_percent(10000) == "100.00");
  CHECK(format_percent(0) == "0.00");
}

TEST_CASE("empty profile renders the header and no rows") {
  const auto text = render_flat_profile(flat_profile(testing::empty_snapshot()));
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "Total Session Time   0.000");
  CHECK(lines[4] == "Time Slice Duration  1000 ms");
  CHECK(lines[5].empty());
  CHECK(lines[6].rfind("Agent", 0) == 0);
}

TEST_CASE("rows are aligned columns") {
  const auto text = render_flat_profile(flat_profile(testing::reference_snapshot()));
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 8 + testing::kReferenceProfile.size());
  const auto width = lines[6].size();
  for (std::size_t i = 6; i < lines.size(); ++i) CHECK(lines[i].size() == width);
  CHECK(lines[8] ==
        "agent001            338        22  1:08.564      10.90   3.740       0.202     6    57");
}

TEST_CASE("long names stay separated from the first column") {
  FlatProfile p;
  p.rows.push_back(FlatProfileRow{"x", "a-very-long-agent-name", 12345678901, 0, 0, 0, 0, 0, 0, 0,
                                  std::nullopt});
  const auto text = render_flat_profile(p);
  CHECK(text.find("a-very-long-agent-name 12345678901") != std::string::npos);
}
