#include "featdyn/csv.hpp"
#include "featdyn/svg.hpp"
#include "featdyn/types.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace featdyn;

TEST_CASE("csv read") {
  std::istringstream in("iter,a,b\n0,1.5,2\n1, 2.5 ,nan\n");
  const CsvTable t = read_csv(in);
  CHECK(t.columns == std::vector<std::string>{"iter", "a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.column("a") == std::vector<double>{1.5, 2.5});
  CHECK(std::isnan(t.column("b")[1]));
  CHECK(t.index_of("b") == 2u);
  CHECK_FALSE(t.index_of("c"));
  CHECK_THROWS_AS(t.column("c"), FormatError);
}

TEST_CASE("csv errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), FormatError);
  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(ragged), FormatError);
}

TEST_CASE("text cells read as NaN") {
  std::istringstream text("a,b\nhello,1\n");
  const CsvTable t = read_csv(text);
  CHECK(std::isnan(t.column("a")[0]));
  CHECK(t.column("b")[0] == 1.0);
}

TEST_CASE("split and trim") {
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(trim("  x y \t") == "x y");
}

TEST_CASE("line chart is self-contained svg") {
  Series s{"max_noise", {0, 1, 2, 4}, {0.1, 0.2, 0.4, 0.8}};
  ChartOptions opt;
  opt.title = "t & <u>";
  std::ostringstream out;
  write_line_chart(out, {s}, opt);
  const std::string svg = out.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("max_noise") != std::string::npos);
  CHECK(svg.find("t &amp; &lt;u&gt;") != std::string::npos);  // escaped
}

TEST_CASE("log axis drops nonpositive points") {
  Series s{"y", {0, 1, 10, 100}, {1, 2, 3, 4}};
  ChartOptions opt;
  opt.log_x = true;
  std::ostringstream out;
  CHECK_NOTHROW(write_line_chart(out, {s}, opt));
  CHECK(out.str().find("nan") == std::string::npos);
}

TEST_CASE("image grid") {
  ImageTile a{"a", 2, 2, {0, 1, 2, 3}};
  ImageTile b{"b", 2, 2, {5, 5, 5, 5}};  // flat tile must not divide by zero
  std::ostringstream out;
  write_image_grid(out, {a, b}, 2);
  CHECK(out.str().find("<rect") != std::string::npos);
  CHECK(out.str().find("nan") == std::string::npos);
}
