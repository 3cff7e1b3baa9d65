// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Usage: fluidnav_acceptance <scenario-dir> <cli-binary>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "fluidnav/fluidnav.hpp"
#include "support.hpp"

using namespace fluidnav;
using fluidnav::testing::Gen;

namespace {

// Pinned tolerances and limits.
constexpr double kCrTolerance = 1e-5;
constexpr double kRoundTripTolerance = 1e-9;
constexpr double kPsiDriftTolerance = 1e-7;
constexpr double kRk4AgreementTolerance = 1e-3;
constexpr double kSncfRadius = 0.4;
constexpr double kClearanceSlack = 1e-3;
constexpr double kMinSeparation = 0.1;
constexpr double kHeadingTolerance = 1e-12;
constexpr double kFastBudgetSeconds = 1.0;
constexpr double kScenarioBudgetSeconds = 5.0;

std::string g_scenarios;
std::string g_cli;

ScenarioSpec load(const std::string& name) { return parse_scenario(g_scenarios + "/" + name); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome cauchy_riemann() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Gen gen(1001);
  double worst = 0.0;
  int points = 0;
  for (int f = 0; f < 20; ++f) {
    const FlowField field = gen.field(4);
    for (int i = 0; i < 50; ++i, ++points) {
      worst = std::max(worst, fluidnav::testing::cauchy_riemann_residual(gen.exterior(field), field));
    }
  }
  const double elapsed = seconds_since(start);
  o.detail << points << " points, worst relative residual " << worst << ", " << elapsed << " s";
  o.require(points == 1000, "point count");
  o.require(worst <= kCrTolerance, "residual <= 1e-5");
  o.require(elapsed < kFastBudgetSeconds, "runtime < 1 s");
  return o;
}

Outcome inversion_round_trip() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Gen gen(1002);
  double worst = 0.0;
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const FlowField field = gen.field(4);
    const Complex z = gen.exterior(field);
    Complex guess = z + Complex{0.01, 0.0};
    if (inside_any_disk(guess, field)) guess = z;
    const Complex back = invert(eval(z, field), field, guess);
    worst = std::max(worst, std::abs(back - z));
    inside += inside_any_disk(back, field);
  }
  const double elapsed = seconds_since(start);
  o.detail << "max error " << worst << " m, roots inside disks " << inside << ", " << elapsed << " s";
  o.require(worst <= kRoundTripTolerance, "error <= 1e-9 m");
  o.require(inside == 0, "no interior roots");
  o.require(elapsed < kFastBudgetSeconds, "runtime < 1 s");
  return o;
}

Outcome stream_conservation() {
  Outcome o;
  const FlowField field(0.0, 1, {{{0.0, 0.0}, 0.4}});
  const StepParams params{0.01, 0.3};
  Complex a{-1.5, 0.2};
  Complex b = a;
  const double psi0 = eval(a, field).psi;
  double drift = 0.0;
  int fallbacks = 0;
  for (int k = 0; k < 1000; ++k) {
    const StepResult r = streamline_step(a, field, params);
    fallbacks += r.method == StepMethod::Rk4Fallback;
    a = r.position;
    b = rk4_step(b, field, params);
    drift = std::max(drift, std::abs(eval(a, field).psi - psi0));
  }
  const double gap = std::abs(a - b);
  o.detail << "max psi drift " << drift << " m, streamline vs rk4 " << gap << " m, end x " << a.real()
           << ", fallbacks " << fallbacks;
  o.require(drift <= kPsiDriftTolerance, "psi drift <= 1e-7 m");
  o.require(gap <= kRk4AgreementTolerance, "terminal gap <= 1e-3 m");
  o.require(a.real() > 0.4, "trajectory passes the cylinder");
  return o;
}

Outcome sncf_reproduction() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const ScenarioSpec spec = load("sncf_paper.json");
  const TrajectoryLog log = run(spec);
  const SafetyReport report = audit(log, spec);
  const double elapsed = seconds_since(start);

  double min_distance = INFINITY;
  bool non_finite = false;
  bool frozen = true;
  std::map<int, Complex> faulty_at;
  for (const auto& tick : log.ticks) {
    for (const auto& row : tick.agents) {
      non_finite = non_finite || !std::isfinite(row.position.real()) || !std::isfinite(row.position.imag());
      if (row.role != Role::Faulty) continue;
      auto [it, fresh] = faulty_at.emplace(row.id, row.position);
      if (!fresh && std::memcmp(&it->second, &row.position, sizeof(Complex)) != 0) frozen = false;
    }
    for (const auto& row : tick.agents) {
      if (row.role != Role::Cooperative) continue;
      for (const auto& other : tick.agents) {
        if (other.role == Role::Faulty) min_distance = std::min(min_distance, std::abs(row.position - other.position));
      }
    }
  }
  o.detail << "min distance to faulty " << min_distance << " m, audit clearance " << report.min_clearance
           << " m, rebuilds " << report.field_rebuilds << ", faulty " << faulty_at.size() << ", " << elapsed << " s";
  o.require(min_distance >= kSncfRadius - kClearanceSlack, "distance >= 0.4 - 1e-3 m");
  o.require(report.min_clearance >= -kClearanceSlack, "audit clearance");
  o.require(!non_finite && !report.non_finite, "no NaN");
  o.require(frozen && faulty_at.size() == 2, "faulty agents bit-frozen");
  o.require(report.field_rebuilds == 2, "exactly two rebuilds");
  o.require(elapsed < kScenarioBudgetSeconds, "runtime < 5 s");
  return o;
}

Outcome tvnc_reproduction() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const ScenarioSpec spec = load("tvnc_paper.json");
  const TrajectoryLog log = run(spec);
  const double elapsed = seconds_since(start);

  double min_distance = INFINITY;
  for (const auto& tick : log.ticks) {
    for (const auto& a : tick.agents) {
      if (a.role != Role::Cooperative) continue;
      for (const auto& b : tick.agents) {
        if (b.role == Role::NonCooperative) min_distance = std::min(min_distance, std::abs(a.position - b.position));
      }
    }
  }
  double residual = 0.0;
  int cooperative = 0;
  for (const auto& row : log.ticks.back().agents) {
    if (row.role != Role::Cooperative) continue;
    residual += std::abs(*spec.find_agent(row.id)->goal - row.position);
    ++cooperative;
  }
  const double bound = cooperative * spec.find_cluster(1)->goal_tolerance;
  o.detail << cooperative << " cooperative, aggregate residual " << residual << " m (bound " << bound
           << "), min distance to non-cooperative " << min_distance << " m, " << log.ticks.size() << " ticks, "
           << elapsed << " s";
  o.require(cooperative == 3, "three cooperative agents");
  o.require(!log.budget_exhausted(), "not budget-exhausted");
  o.require(residual <= bound, "aggregate residual <= |V1| eps");
  o.require(min_distance >= kMinSeparation, "distance >= 0.1 m");
  o.require(elapsed < kScenarioBudgetSeconds, "runtime < 5 s");
  return o;
}

Outcome tvc_reproduction() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const ScenarioSpec spec = load("tvc_paper.json");
  const TrajectoryLog log = run(spec);
  const double elapsed = seconds_since(start);

  std::string trace;
  bool consistent = true;
  bool uniform = true;
  double min_inter = INFINITY;
  for (const auto& tick : log.ticks) {
    std::vector<AgentState> agents;
    std::map<int, double> heading;
    std::set<int> betas;
    for (const auto& row : tick.agents) {
      agents.push_back({row.id, row.cluster, row.position});
      heading[row.cluster] = *row.theta;
      betas.insert(*row.beta);
    }
    std::vector<ClusterSpec> clusters;
    for (const auto& [id, theta] : heading) clusters.push_back({id, {}, spec.find_cluster(id)->speed, 0, theta, 0.05});
    const bool zeta = zeta_check(clusters, agents, spec.delta, spec.n_tau, spec.dt);
    uniform = uniform && betas.size() == 1;
    const int beta = *betas.begin();
    consistent = consistent && beta == (zeta ? 1 : 0);
    trace += static_cast<char>('0' + beta);
    for (const auto& a : tick.agents) {
      for (const auto& b : tick.agents) {
        if (a.cluster != b.cluster) min_inter = std::min(min_inter, std::abs(a.position - b.position));
      }
    }
  }
  const auto first_on = trace.find('1');
  const auto last_on = trace.rfind('1');
  o.detail << "beta on for " << std::count(trace.begin(), trace.end(), '1') << " of " << trace.size()
           << " ticks (first " << first_on << ", last " << last_on << "), min inter-cluster distance " << min_inter
           << " m, " << elapsed << " s";
  o.require(first_on != std::string::npos, "beta switches on");
  o.require(first_on != std::string::npos && first_on > 0, "all zeros before first zeta tick");
  o.require(consistent && uniform, "beta matches zeta at every tick for every cluster");
  o.require(!trace.empty() && trace.back() == '0', "beta returns to zero");
  o.require(min_inter >= kMinSeparation, "inter-cluster distance >= 0.1 m");
  o.require(elapsed < kScenarioBudgetSeconds, "runtime < 5 s");
  return o;
}

Outcome determinism() {
  Outcome o;
  int scenarios = 0;
  for (const char* name : {"sncf_paper.json", "tvnc_paper.json", "tvc_paper.json", "negative_control.json"}) {
    const ScenarioSpec spec = load(name);
    const TrajectoryLog first = run(spec);
    const TrajectoryLog second = run(spec);
    const bool tables = format_trajectory(first) == format_trajectory(second);
    const bool plots = render_svg(first, spec) == render_svg(second, spec);
    o.require(tables, std::string(name) + " table");
    o.require(plots, std::string(name) + " plot");
    ++scenarios;
  }
  o.detail << scenarios << " scenarios run twice, tables and plots compared byte for byte";
  return o;
}

int run_cli(const std::string& args) {
  const std::string command = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome negative_control() {
  Outcome o;
  const std::string spec_path = g_scenarios + "/negative_control.json";
  const auto dir = std::filesystem::temp_directory_path() / "fluidnav_acceptance";
  std::filesystem::create_directories(dir);
  const std::string table = (dir / "negative_control.csv").string();
  const int run_status = run_cli("run \"" + spec_path + "\" --out \"" + table + "\"");
  const int audit_status = run_cli("audit \"" + table + "\" --spec \"" + spec_path + "\"");
  const ScenarioSpec spec = load("negative_control.json");
  const SafetyReport report = audit(parse_trajectory(table), spec);
  o.detail << "run exit " << run_status << ", audit exit " << audit_status << ", violations "
           << report.violations.size();
  if (!report.violations.empty()) o.detail << " (" << report.violations.front() << ")";
  o.require(run_status == 0, "run succeeds");
  o.require(audit_status == 2, "audit exit code 2");
  o.require(!report.violations.empty(), "violation reported");
  return o;
}

Outcome heading_law() {
  Outcome o;
  Gen gen(1009);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AgentState> agents, rotated;
    const int n = gen.integer(1, 8);
    const double alpha = gen.angle();
    for (int i = 0; i < n; ++i) {
      const Complex z = gen.point(10.0);
      const Complex offset = gen.point(5.0);
      AgentState a{i + 1, 1, z};
      a.goal = z + offset;
      AgentState b = a;
      b.goal = z + offset * std::polar(1.0, alpha);
      agents.push_back(a);
      rotated.push_back(b);
    }
    const double diff = heading_from_goals(rotated) - heading_from_goals(agents) - alpha;
    worst = std::max(worst, std::abs(std::remainder(diff, 2 * std::numbers::pi)));
  }
  int raised = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AgentState> agents;
    const Complex offset{gen.uniform(-4, 4), gen.uniform(-4, 4)};
    for (int sign : {1, -1}) {
      AgentState a{static_cast<int>(agents.size()) + 1, 1, gen.point(3.0)};
      a.goal = a.position + static_cast<double>(sign) * offset;
      agents.push_back(a);
    }
    try {
      heading_from_goals(agents);
    } catch (const AllAtGoal&) {
      ++raised;
    }
  }
  o.detail << "500 rotations, worst angular error " << worst << " rad; degenerate cases raising AllAtGoal "
           << raised << "/50";
  o.require(worst <= kHeadingTolerance, "rotation covariance to 1e-12");
  o.require(raised == 50, "AllAtGoal on zero resultant");
  return o;
}

// Independent point-in-box oracle: intersection of the four inward half-planes.
bool half_plane_oracle(const VirtualBox& box, Complex q) {
  const double c = std::cos(box.heading);
  const double s = std::sin(box.heading);
  const double ax = box.anchor.real(), ay = box.anchor.imag();
  const double qx = q.real(), qy = q.imag();
  // Half-plane i: n_i . (q - p_i) >= 0.
  const double planes[4][4] = {
      {c, s, ax, ay},                                                      // rear edge
      {-c, -s, ax + box.length * c, ay + box.length * s},                  // front edge
      {-s, c, ax + box.half_width * s, ay - box.half_width * c},           // right edge
      {s, -c, ax - box.half_width * s, ay + box.half_width * c},           // left edge
  };
  for (const auto& p : planes) {
    if (p[0] * (qx - p[2]) + p[1] * (qy - p[3]) < 0.0) return false;
  }
  return true;
}

Outcome zeta_geometry() {
  Outcome o;
  const VirtualBox boxes[] = {
      make_box({0.0123, -0.0071}, 0.61, 0.3, 0.15, 3, 0.1),
      make_box({-0.0317, 0.0213}, 2.47, 0.3, 0.15, 3, 0.1),
      make_box({0.0041, 0.0093}, -1.93, 0.5, 0.1, 5, 0.1),
  };
  int disagreements = 0;
  int inside = 0;
  long checked = 0;
  for (const auto& box : boxes) {
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        const Complex q{-0.3 + 0.003 * i, -0.3 + 0.003 * j};
        const bool got = box.contains(q);
        disagreements += got != half_plane_oracle(box, q);
        inside += got;
        ++checked;
      }
    }
  }
  Gen gen(1010);
  int monotone_checked = 0;
  int monotone_failures = 0;
  while (monotone_checked < 100) {
    std::vector<ClusterSpec> clusters = {{1, {}, 0.3, 0, gen.angle(), 0.05}, {2, {}, 0.3, 0, gen.angle(), 0.05}};
    std::vector<AgentState> agents;
    for (int i = 0; i < 6; ++i) agents.push_back({i + 1, i < 3 ? 1 : 2, gen.point(0.35)});
    const double delta = gen.uniform(0.05, 0.2);
    const int n_tau = gen.integer(1, 5);
    if (!zeta_check(clusters, agents, delta, n_tau, 0.1)) continue;
    ++monotone_checked;
    monotone_failures += !zeta_check(clusters, agents, delta * gen.uniform(1.0, 3.0), n_tau, 0.1);
    monotone_failures += !zeta_check(clusters, agents, delta, n_tau + gen.integer(1, 4), 0.1);
  }
  o.detail << checked << " lattice points over 3 boxes (" << inside << " inside), disagreements " << disagreements
           << "; monotonicity failures " << monotone_failures << " over " << monotone_checked << " configurations";
  o.require(disagreements == 0, "zero lattice disagreements");
  o.require(inside > 0, "lattice reaches the boxes");
  o.require(monotone_failures == 0, "zeta monotone in delta and n_tau");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " <scenario-dir> <cli-binary>\n";
    return 2;
  }
  g_scenarios = argv[1];
  g_cli = argv[2];

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"Cauchy-Riemann suite", cauchy_riemann},
      {"inversion round trip", inversion_round_trip},
      {"stream conservation", stream_conservation},
      {"SNCF reproduction", sncf_reproduction},
      {"TVNC reproduction", tvnc_reproduction},
      {"TVC reproduction", tvc_reproduction},
      {"determinism", determinism},
      {"negative control", negative_control},
      {"heading law", heading_law},
      {"zeta geometry", zeta_geometry},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << " [exception: " << e.what() << "]";
    }
    failures += !outcome.pass;
    std::cout << "criterion " << index << " " << (outcome.pass ? "PASS" : "FAIL") << "  " << name << ": "
              << outcome.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
