#include <doctest.h>

#include <cmath>

#include "semdot/runner.hpp"
#include "support/oracles.hpp"

using namespace semdot;

namespace {

RunParams quick_params(int max_iter = 25) {
  RunParams p;
  p.rmin = 1.5;
  p.max_iter = max_iter;
  return p;
}

}  // namespace

TEST_CASE("small run keeps the projected volume on target every iteration") {
  ProblemDefinition problem = preset_problem("deep-beam", 24, 12);
  const RunResult res = run_semdot(problem, quick_params());
  REQUIRE(res.history.iterations() > 5);
  for (const auto& r : res.history.records) CHECK(std::abs(r.volume - 0.3) <= 1e-4);
}

TEST_CASE("fields stay within bounds at every stage") {
  ProblemDefinition problem = preset_problem("mbb", 18, 6);
  const RunResult res = run_semdot(problem, quick_params(15));
  auto in_bounds = [](const Field& f) {
    for (double v : f) {
      CHECK(v >= 1e-3 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  };
  in_bounds(res.x_raw);
  in_bounds(res.x_tilde);
  in_bounds(res.x_new);
}

TEST_CASE("identical inputs give bit-identical histories") {
  ProblemDefinition problem = preset_problem("cantilever", 12, 8);
  const RunParams params = quick_params(12);
  const RunResult a = run_semdot(problem, params);
  const RunResult b = run_semdot(problem, params);
  REQUIRE(a.history.iterations() == b.history.iterations());
  for (int i = 0; i < a.history.iterations(); ++i) {
    CHECK(a.history.records[i].objective == b.history.records[i].objective);
    CHECK(a.history.records[i].volume == b.history.records[i].volume);
    CHECK(a.history.records[i].psi == b.history.records[i].psi);
  }
  for (size_t e = 0; e < a.x_new.size(); ++e) CHECK(a.x_new[e] == b.x_new[e]);
}

TEST_CASE("symmetry enforcement produces mirror-identical fields") {
  ProblemDefinition problem = preset_problem("deep-beam-hole", 20, 20);
  RunParams params = quick_params(20);
  params.symmetry = true;
  const RunResult res = run_semdot(problem, params);
  const Mesh mesh = problem.mesh();
  for (int ey = 0; ey < mesh.ny; ++ey)
    for (int ex = 0; ex < mesh.nx / 2; ++ex) {
      const int e = mesh.element_id(ex, ey);
      const int m = mesh.element_id(mesh.nx - 1 - ex, ey);
      CHECK(std::abs(res.x_new[e] - res.x_new[m]) < 1e-12);
      CHECK(std::abs(res.x_raw[e] - res.x_raw[m]) < 1e-12);
    }
}

TEST_CASE("objective recovers well below the projection-shock peak") {
  ProblemDefinition problem = preset_problem("cantilever", 20, 10);
  RunParams params = quick_params(60);
  const RunResult res = run_semdot(problem, params);
  double peak = 0.0;
  for (const auto& r : res.history.records) peak = std::max(peak, r.objective);
  CHECK(res.history.records.back().objective < 0.95 * peak);
}

TEST_CASE("oc optimizer runs the same loop") {
  ProblemDefinition problem = preset_problem("deep-beam", 16, 8);
  RunParams params = quick_params(15);
  params.optimizer = OptimizerChoice::oc;
  const RunResult res = run_semdot(problem, params);
  CHECK(res.history.iterations() > 5);
  for (const auto& r : res.history.records) CHECK(std::abs(r.volume - 0.3) <= 1e-4);
}

TEST_CASE("excluded cut-out stays void and is not counted") {
  ProblemDefinition problem = preset_problem("l-bracket", 20, 20);
  const RunResult res = run_semdot(problem, quick_params(12));
  const Mesh mesh = problem.mesh();
  double active_sum = 0.0;
  int active = 0;
  for (int ey = 0; ey < 20; ++ey)
    for (int ex = 0; ex < 20; ++ex) {
      const int e = mesh.element_id(ex, ey);
      if (ex >= 10 && ey >= 10) {
        CHECK(res.x_new[e] == doctest::Approx(1e-3).epsilon(1e-10));
      } else {
        active_sum += res.x_new[e];
        ++active;
      }
    }
  CHECK(active == 300);
  CHECK(active_sum / active == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("mechanism run inverts the output displacement") {
  ProblemDefinition problem = preset_problem("force-inverter", 24, 12);
  RunParams params = quick_params(40);
  params.rmin = 1.5;
  const RunResult res = run_semdot(problem, params);
  // C = -u_out; a working inverter drives it negative.
  CHECK(res.history.records.back().objective < 0.0);
}

TEST_CASE("step mode runs without the boundary-error criterion") {
  ProblemDefinition problem = preset_problem("deep-beam", 16, 8);
  RunParams params = quick_params(60);
  params.mode = ProjectionMode::step;
  const RunResult res = run_semdot(problem, params);
  CHECK(res.history.iterations() > 2);
}

TEST_CASE("simp baseline emits gray densities and respects its volume target") {
  ProblemDefinition problem = preset_problem("cantilever", 20, 10);
  RunParams params = quick_params(30);
  params.penalty = 3.0;
  params.optimizer = OptimizerChoice::simp_d;
  const RunResult res = run_simp_baseline(problem, params);
  REQUIRE(res.history.iterations() > 5);
  CHECK(res.history.records.back().volume == doctest::Approx(0.3).epsilon(1e-3));
  // Gray-scale output: intermediate densities exist away from convergence.
  int gray = 0;
  for (double v : res.x_new)
    if (v > 0.05 && v < 0.95) ++gray;
  CHECK(gray > 0);
  // Symmetric problem: the baseline on a symmetric domain keeps y-symmetry.
  const Mesh mesh = problem.mesh();
  for (int ey = 0; ey < 5; ++ey)
    for (int ex = 0; ex < 20; ++ex)
      CHECK(res.x_new[mesh.element_id(ex, ey)] ==
            doctest::Approx(res.x_new[mesh.element_id(ex, 9 - ey)]).epsilon(1e-4));
  CHECK_THROWS_AS(run_simp_baseline(preset_problem("force-inverter"), params), ConfigError);
}

TEST_CASE("history wall time is recorded") {
  ProblemDefinition problem = preset_problem("deep-beam", 12, 6);
  const RunResult res = run_semdot(problem, quick_params(5));
  for (const auto& r : res.history.records) CHECK(r.wall_ms >= 0.0);
}
