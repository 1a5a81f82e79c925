#include "doctest.h"

#include "hpdg/adaptivity.hpp"

using namespace hpdg;

namespace {

EstimatorReport report_of(const std::vector<double>& eta_sq, int degree = 3) {
  std::vector<ElementIndicator> elements;
  for (int i = 0; i < static_cast<int>(eta_sq.size()); ++i)
    elements.push_back({i, 0, degree, {eta_sq[i], 0, 0, 0, 0, 0}});
  return EstimatorReport(std::move(elements));
}

EstimatorReport report_on(const Mesh& mesh, const std::vector<double>& eta_sq) {
  std::vector<ElementIndicator> elements;
  const auto& active = mesh.active_elements();
  for (std::size_t i = 0; i < active.size(); ++i)
    elements.push_back({active[i], mesh.element(active[i]).level, mesh.degree(active[i]), {eta_sq[i], 0, 0, 0, 0, 0}});
  return EstimatorReport(std::move(elements));
}

void check_predictions_cover(const Mesh& mesh, const PredictedIndicators& pred) {
  CHECK(pred.size() == mesh.active_elements().size());
  for (int id : mesh.active_elements()) CHECK(pred.count(id) == 1);
}

}  // namespace

TEST_CASE("maximum strategy") {
  CHECK(mark_h(report_of({16, 9, 1}), 0.5) == std::set<int>{0, 1});
  CHECK(mark_h(report_of({2, 2, 2}), 0.5) == std::set<int>{0, 1, 2});
  CHECK(mark_h(report_of({5, 3, 5}), 1.0) == std::set<int>{0, 2});
}

TEST_CASE("hp marking") {
  const MarkingParams params;
  SUBCASE("infinite predictions choose p") {
    const auto report = report_of({16, 9, 1});
    const auto d = mark_hp(report, {{0, kInfinitePrediction}, {1, kInfinitePrediction}, {2, kInfinitePrediction}},
                           params, 10);
    CHECK(d.p_refine == std::set<int>{0});
    CHECK(d.h_coarsen == std::set<int>{0});
    CHECK(d.h_refine.empty());
    CHECK(d.new_predictions.at(0) == doctest::Approx(0.9 * 16));
    CHECK(d.new_predictions.at(2) == kInfinitePrediction);
  }
  SUBCASE("prediction exceeded chooses h") {
    const auto d = mark_hp(report_of({1.0}), {{0, 0.9}}, params, 10);
    CHECK(d.h_refine == std::set<int>{0});
    CHECK(d.h_fallback.empty());
    CHECK(d.child_predictions.at(0) == doctest::Approx(0.046875).epsilon(1e-14));
  }
  SUBCASE("unselected elements keep their prediction") {
    const auto d = mark_hp(report_of({1.0, 0.5}), {{0, 2.0}, {1, 0.9}}, params, 10);
    CHECK(d.new_predictions.at(1) == 0.9);
    CHECK(!d.h_refine.count(1));
    CHECK(!d.p_refine.count(1));
  }
  SUBCASE("p_max forces h") {
    const auto d = mark_hp(report_of({1.0}, 10), {{0, kInfinitePrediction}}, params, 10);
    CHECK(d.h_refine == std::set<int>{0});
    CHECK(d.h_fallback == std::set<int>{0});
    CHECK(d.p_refine.empty());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(mark_hp(report_of({1.0}), {}, params, 10), Error);
    CHECK_THROWS_AS(mark_hp(report_of({1.0}), {{0, 1.0}}, params, 1), Error);
  }
  SUBCASE("raising sigma_mark never enlarges the selection") {
    const auto report = report_of({5, 4, 3, 2, 1, 0.5});
    PredictedIndicators pred;
    for (int i = 0; i < 6; ++i) pred[i] = i % 2 ? 1.0 : kInfinitePrediction;
    std::size_t previous = 7;
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      MarkingParams p;
      p.sigma_mark = s;
      const auto d = mark_hp(report, pred, p, 10);
      const std::size_t n = d.h_refine.size() + d.p_refine.size();
      CHECK(n <= previous);
      previous = n;
    }
  }
}

TEST_CASE("parameter validation") {
  MarkingParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma_p = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.theta = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("apply") {
  auto mesh = Mesh::build_initial(Domain::UnitSquare, ElementKind::Quad, 3, 2);
  SUBCASE("empty decision") {
    const std::string before = mesh.dump();
    const auto r = apply(mesh, AdaptDecision{}, Closure::OneIrregular, 10);
    CHECK(mesh.dump() == before);
    check_predictions_cover(mesh, r.predictions);
  }
  SUBCASE("single p-refinement") {
    AdaptDecision d;
    d.p_refine = {4};
    d.h_coarsen = {4};
    d.new_predictions[4] = 1.0;
    const auto r = apply(mesh, d, Closure::OneIrregular, 10);
    CHECK(mesh.degree(4) == 3);
    CHECK(mesh.num_active() == 9);
    for (int id : mesh.active_elements())
      if (id != 4) CHECK(mesh.degree(id) == 2);
    CHECK(r.predictions.at(4) == 1.0);
    check_predictions_cover(mesh, r.predictions);
  }
  SUBCASE("second p-refinement smooths neighbours") {
    AdaptDecision d;
    d.p_refine = {4};
    apply(mesh, d, Closure::OneIrregular, 10);
    apply(mesh, d, Closure::OneIrregular, 10);
    CHECK(mesh.degree(4) == 4);
    for (const auto& f : mesh.faces())
      if (f.minus_elem) CHECK(std::abs(mesh.degree(f.plus_elem) - mesh.degree(*f.minus_elem)) <= 1);
    CHECK(mesh.degree(1) == 3);
    CHECK(mesh.degree(0) == 2);
  }
  SUBCASE("h-refinement lowers the degree and seeds child predictions") {
    mesh.set_degree(4, 3);
    mesh.smooth_degrees();
    AdaptDecision d;
    d.h_refine = {4};
    d.child_predictions[4] = 0.046875;
    const auto r = apply(mesh, d, Closure::OneIrregular, 10);
    CHECK(mesh.num_active() == 12);
    for (int c : mesh.element(4).children) {
      CHECK(mesh.degree(c) == 2);
      CHECK(r.predictions.at(c) == 0.046875);
    }
    check_predictions_cover(mesh, r.predictions);
  }
  SUBCASE("coarsening a p-refined family") {
    const auto children = mesh.refine({4}, Closure::OneIrregular).refined.at(4);
    AdaptDecision d;
    for (int c : children) {
      d.p_refine.insert(c);
      d.h_coarsen.insert(c);
      d.new_predictions[c] = 0.1 * (c + 1);
    }
    const auto r = apply(mesh, d, Closure::OneIrregular, 10);
    CHECK(mesh.element(4).active);
    CHECK(mesh.degree(4) == 3);
    CHECK(r.predictions.at(4) == doctest::Approx(0.1 * (children.back() + 1)));
    check_predictions_cover(mesh, r.predictions);
  }
}

TEST_CASE("hp marking and apply are deterministic") {
  auto run = [] {
    auto mesh = Mesh::build_initial(Domain::LShape, ElementKind::Quad, 2, 2);
    auto pred = initial_predictions(mesh);
    std::string log;
    for (int step = 0; step < 5; ++step) {
      std::vector<double> eta;
      for (int id : mesh.active_elements()) {
        const Vec2 c = mesh.centroid(id);
        eta.push_back(1.0 / (0.05 + c.norm()) / (1 + mesh.degree(id)));
      }
      const auto d = mark_hp(report_on(mesh, eta), pred, {}, 5);
      log += decision_log_line(step, d, 0) + "\n";
      pred = apply(mesh, d, Closure::OneIrregular, 5).predictions;
      check_predictions_cover(mesh, pred);
      CHECK(mesh.check_invariants().empty());
    }
    return log + mesh.dump();
  };
  CHECK(run() == run());
}

TEST_CASE("decision log line") {
  AdaptDecision d;
  d.h_refine = {1, 2};
  d.h_fallback = {2};
  d.p_refine = {3};
  d.h_coarsen = {3};
  CHECK(decision_log_line(4, d, 120) == "step 4: h_refine=2 (p_max fallback 1) p_refine=1 coarsen=1 dofs=120");
}
