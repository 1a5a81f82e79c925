#include "hpdg/benchmarks.hpp"

#include "hpdg/linsolve.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hpdg {

namespace {

using Complex = std::complex<double>;

constexpr double kLambda = 4.0 / 3.0;

// z^mu with arg z in [0, 2 pi), the branch that covers the L-shape.
Complex power(const Vec2& x, double mu) {
  const double r = x.norm();
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return std::polar(std::pow(r, mu), mu * theta);
}

bool at_corner(const Vec2& x) { return x.norm() == 0.0; }

}  // namespace

BenchmarkProblem lshape_singular() {
  BenchmarkProblem p;
  p.name = "lshape";
  p.domain = Domain::LShape;
  p.f = [](const Vec2&) { return 0.0; };
  // u = Im(z^lambda) is harmonic, so derivatives follow from z^lambda.
  p.exact.u = [](const Vec2& x) { return at_corner(x) ? 0.0 : power(x, kLambda).imag(); };
  p.exact.grad = [](const Vec2& x) -> Vec2 {
    if (at_corner(x)) return Vec2::Zero();
    const Complex d = kLambda * power(x, kLambda - 1.0);
    return Vec2(d.imag(), d.real());
  };
  p.exact.hess = [](const Vec2& x) -> Mat2 {
    if (at_corner(x)) return Mat2::Zero();
    const Complex d = kLambda * (kLambda - 1.0) * power(x, kLambda - 2.0);
    Mat2 h;
    h << d.imag(), d.real(), d.real(), -d.imag();
    return h;
  };
  p.exact.singular_point = Vec2::Zero();
  p.boundary = BoundaryData::from_exact(p.exact);
  return p;
}

BenchmarkProblem square_smooth() {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  // u = S(x) S(y) with S(t) = sin^2(pi t).
  struct Profile {
    double s0, s1, s2, s3, s4;
  };
  auto profile = [](double t) {
    return Profile{sin(pi * t) * sin(pi * t), pi * sin(2 * pi * t), 2 * pi * pi * cos(2 * pi * t),
                   -4 * pi * pi * pi * sin(2 * pi * t), -8 * pi * pi * pi * pi * cos(2 * pi * t)};
  };
  BenchmarkProblem p;
  p.name = "square";
  p.domain = Domain::UnitSquare;
  p.f = [profile](const Vec2& x) {
    const auto a = profile(x[0]), b = profile(x[1]);
    return a.s4 * b.s0 + 2 * a.s2 * b.s2 + a.s0 * b.s4;
  };
  p.exact.u = [profile](const Vec2& x) { return profile(x[0]).s0 * profile(x[1]).s0; };
  p.exact.grad = [profile](const Vec2& x) -> Vec2 {
    const auto a = profile(x[0]), b = profile(x[1]);
    return Vec2(a.s1 * b.s0, a.s0 * b.s1);
  };
  p.exact.hess = [profile](const Vec2& x) -> Mat2 {
    const auto a = profile(x[0]), b = profile(x[1]);
    Mat2 h;
    h << a.s2 * b.s0, a.s1 * b.s1, a.s1 * b.s1, a.s0 * b.s2;
    return h;
  };
  p.boundary = BoundaryData::homogeneous();
  return p;
}

BenchmarkProblem benchmark_by_name(const std::string& name) {
  if (name == "lshape") return lshape_singular();
  if (name == "square") return square_smooth();
  throw Error("unknown benchmark '" + name + "' (expected lshape or square)");
}

std::string to_string(Strategy strategy) { return strategy == Strategy::H ? "h" : "hp"; }

Strategy strategy_from_string(const std::string& name) {
  if (name == "h") return Strategy::H;
  if (name == "hp") return Strategy::HP;
  throw Error("unknown strategy '" + name + "' (expected h or hp)");
}

SolveOutcome solve_and_estimate(const Mesh& mesh, const BenchmarkProblem& problem, const PenaltyParams& penalty) {
  DofMap dofs(mesh);
  const SparseMatrix a = assemble_operator(mesh, dofs, penalty);
  const Vector b = assemble_load(mesh, dofs, problem.f, problem.boundary, penalty);
  const SolveReport solved = solve_spd(a, b);
  SolveOutcome out{DGSolution{std::move(dofs), solved.coefficients}, {}, 0.0};
  out.report = estimate(mesh, out.solution, problem.f, problem.boundary, penalty);
  out.error = dg_norm_error(mesh, out.solution, problem.exact, problem.boundary, penalty);
  return out;
}

RunRecord adaptive_driver(const BenchmarkProblem& problem, const DriverOptions& options, const StepObserver& observer) {
  if (options.budget.max_steps < 0 || options.budget.max_dofs <= 0) throw Error("budget must be positive");
  if (options.p_initial < 2 || options.p_max < options.p_initial) throw Error("need 2 <= p_initial <= p_max");
  options.marking.validate();

  RunRecord record;
  record.problem = problem.name;
  record.options = options;
  Mesh mesh = Mesh::build_initial(problem.domain, options.kind, options.n_per_side, options.p_initial);
  PredictedIndicators predicted = initial_predictions(mesh);

  for (int step = 0;; ++step) {
    const auto start = std::chrono::steady_clock::now();
    SolveOutcome outcome;
    try {
      outcome = solve_and_estimate(mesh, problem, options.penalty);
    } catch (const SolverError& e) {
      record.partial = true;
      record.failure = e.what();
      break;
    }
    StepRecord s;
    s.step = step;
    s.dofs = outcome.solution.dofs.total();
    s.error = outcome.error;
    s.eta = outcome.report.eta();
    s.effectivity = s.error > 0.0 ? s.eta / s.error : 0.0;
    const auto sums = outcome.report.term_sums();
    for (int j = 0; j < kEstimatorTerms; ++j) s.eta_terms[j] = std::sqrt(sums[j]);
    s.n_elements = mesh.num_active();
    s.p_min = mesh.min_degree();
    s.p_max = mesh.max_degree();

    const bool last = step >= options.budget.max_steps || s.dofs > options.budget.max_dofs || s.eta < 1e-12;
    AdaptDecision decision;
    if (!last) {
      if (options.strategy == Strategy::H) {
        decision.h_refine = mark_h(outcome.report, options.marking.theta);
      } else {
        decision = mark_hp(outcome.report, predicted, options.marking, options.p_max);
      }
    }
    s.n_h_refine = static_cast<int>(decision.h_refine.size());
    s.n_h_fallback = static_cast<int>(decision.h_fallback.size());
    s.n_p_refine = static_cast<int>(decision.p_refine.size());
    s.n_coarsen = static_cast<int>(decision.h_coarsen.size());
    if (observer) observer(StepView{step, mesh, outcome.solution, outcome.report, decision});

    if (!last) {
      if (options.strategy == Strategy::H) {
        mesh.refine(decision.h_refine, options.closure);
      } else {
        predicted = apply(mesh, decision, options.closure, options.p_max).predictions;
      }
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.steps.push_back(s);
    if (last) break;
  }
  return record;
}

std::string RunRecord::to_csv(bool with_timing) const {
  std::ostringstream out;
  out << "step,dofs,error,eta,effectivity,eta1,eta2,eta3,eta4,eta5,eta6,n_elements,p_min,p_max,n_h_refine,"
         "n_h_fallback,n_p_refine,n_coarsen";
  if (with_timing) out << ",seconds";
  out << '\n';
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.12e", v);
    out << buf;
  };
  for (const auto& s : steps) {
    out << s.step << ',' << s.dofs;
    real(s.error);
    real(s.eta);
    real(s.effectivity);
    for (double t : s.eta_terms) real(t);
    out << ',' << s.n_elements << ',' << s.p_min << ',' << s.p_max << ',' << s.n_h_refine << ',' << s.n_h_fallback << ',' << s.n_p_refine
        << ',' << s.n_coarsen;
    if (with_timing) {
      std::snprintf(buf, sizeof buf, ",%.3f", s.seconds);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string RunRecord::to_json() const {
  nlohmann::ordered_json j;
  j["problem"] = problem;
  j["strategy"] = to_string(options.strategy);
  j["p_initial"] = options.p_initial;
  j["p_max"] = options.p_max;
  j["mesh_kind"] = to_string(options.kind);
  j["closure"] = to_string(options.closure);
  j["n_per_side"] = options.n_per_side;
  j["c_sigma"] = options.penalty.c_sigma;
  j["c_tau"] = options.penalty.c_tau;
  j["theta"] = options.marking.theta;
  j["sigma_mark"] = options.marking.sigma_mark;
  j["gamma_h"] = options.marking.gamma_h;
  j["gamma_p"] = options.marking.gamma_p;
  j["max_steps"] = options.budget.max_steps;
  j["max_dofs"] = options.budget.max_dofs;
  j["partial"] = partial;
  if (partial) j["failure"] = failure;
  auto& arr = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : steps) {
    nlohmann::ordered_json row;
    row["step"] = s.step;
    row["dofs"] = s.dofs;
    row["error"] = s.error;
    row["eta"] = s.eta;
    row["effectivity"] = s.effectivity;
    row["eta_terms"] = s.eta_terms;
    row["n_elements"] = s.n_elements;
    row["p_min"] = s.p_min;
    row["p_max"] = s.p_max;
    row["n_h_refine"] = s.n_h_refine;
    row["n_h_fallback"] = s.n_h_fallback;
    row["n_p_refine"] = s.n_p_refine;
    row["n_coarsen"] = s.n_coarsen;
    row["seconds"] = s.seconds;
    arr.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace hpdg
