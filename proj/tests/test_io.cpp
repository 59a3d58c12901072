#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "tsi/config.hpp"
#include "tsi/io.hpp"

using namespace tsi;
using doctest::Approx;

namespace {

GridFieldd random_field(unsigned seed, const Domaind& domain, Cells cells) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return sample([&](const Pointd&) { return u(rng); }, domain, cells);
}

}  // namespace

TEST_CASE("field csv") {
  for (const auto& f : {random_field(1, Domaind::interval(-1.0, 2.5), Cells{17, 0}),
                        random_field(2, Domaind::rectangle(0.0, 1.0, -2.0, 0.5), Cells{6, 9})}) {
    std::stringstream s;
    write_field_csv(s, f);
    const auto back = read_field_csv(s);
    REQUIRE(back.same_shape(f));
    CHECK(back.domain() == f.domain());
    CHECK(((back.values() - f.values()).abs() <= 1e-11 * f.values().abs().maxCoeff()).all());
  }
  std::stringstream bad("domain: 0 1; cells: 2\n0,1\n");
  CHECK_THROWS_AS(read_field_csv(bad), FormatError);
  std::stringstream junk("cells everywhere\n");
  CHECK_THROWS_AS(read_field_csv(junk), FormatError);
  CHECK_THROWS_AS(load_field_csv("/nonexistent/field.csv"), FormatError);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("pgm") {
  std::stringstream ascii("P2\n# comment\n3 2\n255\n0 255 0\n255 0 255\n");
  const auto f = read_pgm(ascii);
  CHECK(f.cells()[0] == 2);
  CHECK(f.cells()[1] == 1);
  CHECK(f.value(1, 1) == 1.0);  // first image row is y = 1
  CHECK(f.value(0, 1) == 0.0);
  CHECK(f.value(0, 0) == 1.0);

  for (bool binary : {true, false}) {
    std::stringstream s;
    write_pgm(s, f, binary);
    const auto back = read_pgm(s);
    CHECK((back.values() == f.values()).all());
  }
  std::stringstream wide("P2\n2 2\n65535\n0 65535\n32768 0\n");
  CHECK(read_pgm(wide).value(1, 1) == 1.0);

  std::stringstream truncated("P5\n4 4\n255\nab");
  CHECK_THROWS_AS(read_pgm(truncated), FormatError);
  std::stringstream magic("P6\n1 1\n255\n000");
  CHECK_THROWS_AS(read_pgm(magic), FormatError);
}

TEST_CASE("checkpoint") {
  const auto sys = uniform_nodes(3, 0.0, 1.0);
  const Domaind square = Domaind::rectangle(0, 1, 0, 1);
  const auto shape = TransformTabled::identity(sys, sys, PolyTransform2Dd(square));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Coefficients<double> c(shape.free_dof());
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = u(rng);
  const auto table = shape.with_free_coefficients(c);
  std::stringstream s;
  write_checkpoint(s, table);
  const auto back = read_checkpoint(s, shape);
  CHECK((back.free_coefficients() - c).norm() == 0.0);

  std::stringstream wrong("0,1,shift,0.5\n");
  CHECK_THROWS(read_checkpoint(wrong, shape));
}

TEST_CASE("checksums and files") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  const auto dir = std::filesystem::temp_directory_path() / "tsi_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text(dir / "x.txt", "hello");
  CHECK(read_text(dir / "x.txt") == "hello");
  CHECK(fnv1a_file(dir / "x.txt") == fnv1a("hello"));
  std::filesystem::remove_all(dir.parent_path());
  CHECK_THROWS_AS(read_text(dir / "missing.txt"), FormatError);
}

TEST_CASE("config") {
  for (const auto& id : experiment_ids()) {
    const auto c = default_config(id);
    CHECK_NOTHROW(c.validate());
    CHECK(parse_config(serialize_config(c)) == c);
  }
  const auto c = parse_config("# two-boxes variant\nexperiment = two-boxes\nschedule.steps = 7  # short\n");
  CHECK(c.experiment == "two-boxes");
  CHECK(c.steps == 7);
  CHECK(c.knots == 111);
  CHECK(parse_config("schedule.alpha = 0.5\n", "burgers2d").alpha == 0.5);

  CHECK_THROWS_AS(parse_config("experiment = widths\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = widths\nseed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = widths\nschedule.alpha = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = widths\nschedule.steps = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = widths\njust a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = heat\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = widths\nschedule.alpha = nan\n"), ConfigError);

  auto bad = default_config("burgers2d");
  bad.beta = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = default_config("gaussian1d");
  bad.node_policy = "random";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
