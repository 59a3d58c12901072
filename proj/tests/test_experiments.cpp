#include <doctest.h>

#include <filesystem>

#include "tsi/experiments.hpp"
#include "tsi/io.hpp"

using namespace tsi;

namespace {

ExperimentConfig small(const std::string& id) {
  auto c = default_config(id);
  if (id == "gaussian1d") {
    c.node_counts = {2, 3};
    c.resolutions = {0.01, 0.0};
    c.target_count = 5;
  } else if (id == "burgers2d") {
    c.resolutions = {0.05};
    c.steps = 3;
  } else if (id == "image-align") {
    c.image_size = 24;
    c.disk_radius = 4;
    c.disk_shift = 4;
    c.steps = 3;
  } else if (id == "two-boxes") {
    c.chain = {0.0, 0.4, 0.8};
    c.steps = 20;
    c.refine = 2;
  } else if (id == "widths") {
    c.width_params = 33;
    c.width_space_cells = 64;
    c.width_time_cells = 64;
    c.width_n_max = 16;
    c.width_fit_lo = 2;
    c.width_fit_hi = 16;
  }
  return c;
}

}  // namespace

TEST_CASE("every experiment runs on a small configuration") {
  for (const auto& id : experiment_ids()) {
    CAPTURE(id);
    const auto a = run_experiment(small(id));
    CHECK(!a.files.empty());
    CHECK(!a.summary.empty());
    for (const auto& [key, value] : a.summary) CHECK(std::isfinite(value));
  }
  CHECK_THROWS_AS(run_experiment(small("widths")).value("missing"), std::out_of_range);
}

TEST_CASE("gaussian table layout") {
  const auto r = run_gaussian1d(small("gaussian1d"));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].n == 2);
  CHECK(r.rows[0].tsi.size() == 2);
  CHECK(r.snapshot_errors[1] == 0.0);
  CHECK(r.rows[1].tsi[1] < r.rows[1].id);
  const auto a = gaussian1d_artifacts(r);
  CHECK(a.files.front().first == "errors.csv");
  CHECK(a.files.front().second.rfind("n,h_0.01,exact,id\n", 0) == 0);
}

TEST_CASE("reproducible runs are byte-identical") {
  const auto root = std::filesystem::temp_directory_path() / "tsi_repro_test";
  std::filesystem::remove_all(root);
  for (const std::string id : {"gaussian1d", "two-boxes", "widths"}) {
    CAPTURE(id);
    auto c = small(id);
    c.reproducible = true;
    write_run(root / (id + "_a"), c, run_experiment(c), 1.0);
    write_run(root / (id + "_b"), c, run_experiment(c), 2.0);
    for (const auto& entry : std::filesystem::directory_iterator(root / (id + "_a"))) {
      const auto name = entry.path().filename();
      CHECK(read_text(entry.path()) == read_text(root / (id + "_b") / name));
    }
    CHECK(read_text(root / (id + "_a") / "manifest.txt").find("elapsed") == std::string::npos);
  }
  auto c = small("widths");
  write_run(root / "timed", c, run_experiment(c), 1.5);
  CHECK(read_text(root / "timed" / "manifest.txt").find("elapsed") != std::string::npos);
  std::filesystem::remove_all(root);
}
