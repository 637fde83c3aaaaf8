#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <unistd.h>

#include "ueba/rng.hpp"
#include "ueba/synth.hpp"

using namespace ueba;
using namespace ueba::synth;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ueba_synth_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Matrix unit_normals(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Matrix m(rows, feat::kInputDim);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

}  // namespace

TEST_CASE("default_profile: sane structure for both roles") {
  for (auto role : {feat::Role::CM, feat::Role::EP}) {
    auto p = default_profile(role);
    p.validate();
    CHECK(p.role == role);
    CHECK(p.rates.size() == 10);
    CHECK(p.process_vocab.size() >= 15);
    // office hours are busier than night
    CHECK(p.hourly_activity[10] > p.hourly_activity[3]);
    CHECK(p.hourly_activity[3] > 0.0);
  }
  // role-specific processes differ
  auto cm = default_profile(feat::Role::CM);
  auto ep = default_profile(feat::Role::EP);
  CHECK_FALSE(cm.process_vocab == ep.process_vocab);
}

TEST_CASE("profile validation rejects bad entries") {
  auto p = default_profile(feat::Role::CM);
  p.rates[feat::EventKind::LoginOk] = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = default_profile(feat::Role::CM);
  p.process_vocab.clear();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = default_profile(feat::Role::CM);
  p.workstations_per_user = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("profile json round-trip") {
  TempDir tmp;
  auto p = default_profile(feat::Role::EP);
  auto file = tmp.path / "profile.json";
  write_profile_json(file, p);
  auto q = read_profile_json(file);
  CHECK(q.role == p.role);
  CHECK(q.rates == p.rates);
  CHECK(q.hourly_activity == p.hourly_activity);
  CHECK(q.process_vocab == p.process_vocab);
  CHECK(q.email_size_log_mean == p.email_size_log_mean);
  CHECK(q.workstations_per_user == p.workstations_per_user);
}

TEST_CASE("generate_logs: determinism and user independence") {
  auto p = default_profile(feat::Role::CM);
  auto a = generate_logs(p, 3, 2, 42);
  auto b = generate_logs(p, 3, 2, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].user == b[i].user);
    CHECK(a[i].kind == b[i].kind);
  }
  // adding a user does not disturb existing users' streams
  auto c = generate_logs(p, 4, 2, 42);
  auto events_of = [](const std::vector<feat::RawEvent>& evs, const std::string& user) {
    std::vector<std::int64_t> times;
    for (const auto& e : evs)
      if (e.user == user) times.push_back(e.time);
    return times;
  };
  CHECK(events_of(a, "cm_user1") == events_of(c, "cm_user1"));

  auto d = generate_logs(p, 3, 2, 43);
  CHECK_FALSE(a.size() == d.size());
}

TEST_CASE("generate_logs: structure of the event stream") {
  auto p = default_profile(feat::Role::CM);
  auto events = generate_logs(p, 5, 3, 7);
  REQUIRE_FALSE(events.empty());
  CHECK(std::is_sorted(events.begin(), events.end(),
                       [](const auto& a, const auto& b) { return a.time < b.time; }));
  std::set<std::string> users, workstations;
  std::size_t office = 0, night = 0;
  for (const auto& e : events) {
    users.insert(e.user);
    workstations.insert(e.workstation);
    CHECK(e.time >= 0);
    CHECK(e.time < 3 * 86400);
    if (e.kind == feat::EventKind::ProcessStart) CHECK_FALSE(e.process.empty());
    if (e.kind == feat::EventKind::EmailSent || e.kind == feat::EventKind::EmailReceived) {
      CHECK(e.email_size >= 0);
      CHECK(e.email_files >= 0);
      CHECK(e.email_links >= 0);
    }
    int hour = static_cast<int>((e.time / 3600) % 24);
    if (hour >= 9 && hour < 17)
      ++office;
    else if (hour >= 21 || hour < 7)
      ++night;
  }
  CHECK(users.size() == 5);
  CHECK(users.count("cm_user0") == 1);
  // each user has at most workstations_per_user machines
  CHECK(workstations.size() <= 5 * p.workstations_per_user);
  CHECK(office > night);

  CHECK_THROWS_AS(generate_logs(p, 0, 3, 7), std::invalid_argument);
}

TEST_CASE("generate_logs: Poisson rates land near expectation over many windows") {
  auto p = default_profile(feat::Role::CM);
  // flatten the day so every window has rate exactly `rates`
  p.hourly_activity.fill(1.0);
  auto events = generate_logs(p, 4, 30, 11);
  std::size_t logins = 0;
  for (const auto& e : events)
    if (e.kind == feat::EventKind::LoginOk) ++logins;
  double expected = p.rates[feat::EventKind::LoginOk] * 4.0 * 30.0 * 24.0;
  double observed = static_cast<double>(logins);
  // LLN: ~5760 expected events, 4 sigma is about 300
  CHECK(std::abs(observed - expected) < 4.5 * std::sqrt(expected));
}

TEST_CASE("build_default_templates: 10 templates of the documented types") {
  auto normals = unit_normals(200, 3);
  auto templates = build_default_templates(normals);
  REQUIRE(templates.size() == 10);
  std::map<std::string, int> by_type;
  for (const auto& t : templates) {
    CHECK(t.point.size() == feat::kInputDim);
    ++by_type[t.type];
  }
  CHECK(by_type["login"] == 4);
  CHECK(by_type["antivirus"] == 2);
  CHECK(by_type["email"] == 2);
  CHECK(by_type["process"] == 2);
  for (std::size_t i = 0; i < templates.size(); ++i) CHECK(templates[i].id == int(i) + 1);

  // boosted coordinates sit clearly above the training data range
  const auto& login = templates[0];
  CHECK(login.point[3] > 1.0);  // num_f_logins in scaled space

  CHECK_THROWS_AS(build_default_templates(Matrix(1, feat::kInputDim)), std::invalid_argument);
  CHECK_THROWS_AS(build_default_templates(Matrix(10, 5)), std::invalid_argument);
}

TEST_CASE("templates json round-trip") {
  TempDir tmp;
  auto templates = build_default_templates(unit_normals(50, 5));
  auto file = tmp.path / "templates.json";
  write_templates_json(file, templates);
  auto back = read_templates_json(file);
  REQUIRE(back.size() == templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) {
    CHECK(back[i].id == templates[i].id);
    CHECK(back[i].type == templates[i].type);
    CHECK(back[i].point == templates[i].point);
  }
}

TEST_CASE("IntensityGrid: default is k/100 for k = 1..100") {
  auto g = IntensityGrid::default_grid();
  g.validate();
  REQUIRE(g.lambdas.size() == 100);
  CHECK(g.lambdas.front() == doctest::Approx(0.01));
  CHECK(g.lambdas[49] == doctest::Approx(0.50));
  CHECK(g.lambdas.back() == 1.0);

  IntensityGrid bad;
  bad.lambdas = {0.5, 0.2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.lambdas = {1.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("interpolate: endpoints are exact, midpoint is the average") {
  std::vector<double> z = {0.0, 1.0, -2.0};
  std::vector<double> a = {4.0, 1.0, 6.0};
  CHECK(interpolate(z, a, 0.0) == z);
  CHECK(interpolate(z, a, 1.0) == a);
  auto mid = interpolate(z, a, 0.5);
  CHECK(mid[0] == doctest::Approx(2.0));
  CHECK(mid[1] == doctest::Approx(1.0));
  CHECK(mid[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(interpolate(z, a, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(interpolate(z, {1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("build_test_set: 10 templates x 100 lambdas = 1000 labelled rows") {
  auto normals = unit_normals(300, 8);
  auto templates = build_default_templates(normals);
  auto set = build_test_set(normals, templates, IntensityGrid::default_grid(), 21);
  CHECK(set.X.rows() == 1000);
  CHECK(set.X.cols() == feat::kInputDim);
  REQUIRE(set.labels.size() == 1000);
  CHECK(set.labels[0].template_id == 1);
  CHECK(set.labels[0].lambda == doctest::Approx(0.01));
  CHECK(set.labels[999].template_id == 10);
  CHECK(set.labels[999].lambda == 1.0);

  // determinism
  auto again = build_test_set(normals, templates, IntensityGrid::default_grid(), 21);
  CHECK(set.X == again.X);

  // lambda = 1 rows equal the template exactly
  for (std::size_t c = 0; c < feat::kInputDim; ++c)
    CHECK(set.X(99, c) == templates[0].point[c]);
}

TEST_CASE("build_test_set: fixed_z_per_template reuses one normal row") {
  auto normals = unit_normals(100, 4);
  auto templates = build_default_templates(normals);
  IntensityGrid grid;
  grid.lambdas = {0.25, 0.5};
  auto set = build_test_set(normals, templates, grid, 9, true);
  // With z fixed, row(lambda2) - template is collinear with row(lambda1) - template:
  // reconstruct z from each row and compare.
  for (std::size_t t = 0; t < templates.size(); ++t) {
    for (std::size_t c = 0; c < feat::kInputDim; ++c) {
      double z1 = (set.X(t * 2, c) - 0.25 * templates[t].point[c]) / 0.75;
      double z2 = (set.X(t * 2 + 1, c) - 0.5 * templates[t].point[c]) / 0.5;
      CHECK(z1 == doctest::Approx(z2).epsilon(1e-9));
    }
  }
}

TEST_CASE("test set csv round-trip") {
  TempDir tmp;
  auto normals = unit_normals(40, 2);
  auto templates = build_default_templates(normals);
  IntensityGrid grid;
  grid.lambdas = {0.1, 0.9, 1.0};
  auto set = build_test_set(normals, templates, grid, 5);
  auto file = tmp.path / "test_set.csv";
  write_test_set_csv(file, set);
  auto back = read_test_set_csv(file);
  CHECK(back.X == set.X);
  REQUIRE(back.labels.size() == set.labels.size());
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    CHECK(back.labels[i].template_id == set.labels[i].template_id);
    CHECK(back.labels[i].type == set.labels[i].type);
    CHECK(back.labels[i].lambda == set.labels[i].lambda);
  }
}
