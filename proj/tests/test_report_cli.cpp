#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "vscreen/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  const char* p = std::getenv("VSCREEN_CLI");
  REQUIRE_MESSAGE(p != nullptr, "VSCREEN_CLI not set");
  return p;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = cli() + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = fixtures::slurp(out);
  r.err = fixtures::slurp(err);
  return r;
}

json load(const fs::path& p) { return json::parse(fixtures::slurp(p)); }

// Simulated eight-policy battery; contains Tier 1 models.
const fs::path& mixed_battery() {
  static fixtures::TempDir dir("cli-mixed");
  static const bool ready = [] {
    const auto r = run("simulate --seed 7 --out " + (dir.path / "data").string(), dir.path);
    REQUIRE(r.code == 0);
    return true;
  }();
  (void)ready;
  static const fs::path data = dir.path / "data";
  return data;
}

// Monitoring-only battery; nothing should reach Tier 1.
const fs::path& valid_battery() {
  static fixtures::TempDir dir("cli-valid");
  static const bool ready = [] {
    const auto items = vscreen::synthetic::sample_item_accuracies({}, 524, 11);
    std::vector<std::vector<vscreen::ProbeRecord>> models;
    for (int k = 0; k < 3; ++k) {
      models.push_back(fixtures::policy_model(vscreen::synthetic::Policy::PerfectMonitor, "perfect" + std::to_string(k),
                                              items, 2));
      models.push_back(fixtures::policy_model(vscreen::synthetic::Policy::NoisyMonitor, "noisy" + std::to_string(k),
                                              items, 2));
    }
    fixtures::write_battery(dir.path / "data", models);
    return true;
  }();
  (void)ready;
  static const fs::path data = dir.path / "data";
  return data;
}

std::set<std::string> tier1_of(const json& report) {
  std::set<std::string> out;
  for (const auto& a : report.at("classification").at("assignments"))
    if (a.at("tier") == "Tier1Invalid") out.insert(a.at("model_id").get<std::string>());
  return out;
}

void check_meta(const json& j, const std::string& command) {
  REQUIRE(j.contains("meta"));
  const auto& m = j.at("meta");
  CHECK(m.at("tool") == "vscreen");
  CHECK(m.at("command") == command);
  CHECK(m.contains("version"));
  CHECK(m.contains("seed"));
  CHECK(m.contains("thresholds"));
  CHECK(std::regex_match(m.at("input_digest").get<std::string>(), std::regex("[0-9a-f]{16}")));
}

}  // namespace

TEST_CASE("screen exit codes") {
  fixtures::TempDir tmp("cli-exit");
  const auto mixed = run("screen --data " + mixed_battery().string() + " --out " + (tmp.path / "a").string(), tmp.path);
  CHECK(mixed.code == 2);
  CHECK(mixed.out.find("screen.json") != std::string::npos);

  const auto clean = run("screen --data " + valid_battery().string() + " --out " + (tmp.path / "b").string(), tmp.path);
  CHECK(clean.code == 0);
  CHECK(tier1_of(load(tmp.path / "b" / "screen.json")).empty());

  const auto missing = run("screen --data " + (tmp.path / "nowhere").string() + " --out " + (tmp.path / "c").string(),
                           tmp.path);
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error: ", 0) == 0);
}

TEST_CASE("every artifact carries run metadata") {
  fixtures::TempDir tmp("cli-meta");
  const auto data = mixed_battery().string();
  const auto out = tmp.path.string();
  REQUIRE(run("screen --data " + data + " --out " + out + "/screen", tmp.path).code == 2);
  REQUIRE(run("psych --data " + data + " --bootstrap-iterations 200 --out " + out + "/psych", tmp.path).code == 2);
  REQUIRE(run("sweep --data " + data + " --out " + out + "/sweep", tmp.path).code == 2);
  REQUIRE(run("synthetic --iterations 100 --out " + out + "/syn", tmp.path).code == 0);

  check_meta(load(tmp.path / "screen" / "screen.json"), "screen");
  check_meta(load(tmp.path / "psych" / "psych.json"), "psych");
  check_meta(load(tmp.path / "sweep" / "sweep.json"), "sweep");
  const auto syn = load(tmp.path / "syn" / "synthetic.json");
  check_meta(syn, "synthetic");
  CHECK(syn.at("meta").at("input_digest") == "cbf29ce484222325");

  for (const auto& f : {"screen/screen.md", "psych/psych.md", "sweep/sweep.md", "syn/synthetic.md"}) {
    const auto text = fixtures::slurp(tmp.path / f);
    CHECK(text.find("- input digest: ") != std::string::npos);
    CHECK(text.find("- seed: ") != std::string::npos);
  }
  for (const auto& f : {"screen/profiles.csv", "sweep/sweep.csv", "syn/synthetic.csv"}) {
    const auto text = fixtures::slurp(tmp.path / f);
    CHECK(text.rfind("# ", 0) == 0);
    CHECK(text.find("# input_digest=") != std::string::npos);
  }
}

TEST_CASE("reruns are byte identical across thread counts") {
  fixtures::TempDir tmp("cli-rerun");
  const auto data = mixed_battery().string();
  for (const char* t : {"1", "8"}) {
    run("screen --data " + data + " --threads " + t + " --out " + (tmp.path / ("s" + std::string(t))).string(),
        tmp.path);
    run("psych --data " + data + " --bootstrap-iterations 300 --threads " + t + " --out " +
            (tmp.path / ("p" + std::string(t))).string(),
        tmp.path);
    run("synthetic --iterations 120 --seed 3 --threads " + std::string(t) + " --out " +
            (tmp.path / ("y" + std::string(t))).string(),
        tmp.path);
  }
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"s1/screen.json", "s8/screen.json"}, {"s1/screen.md", "s8/screen.md"},
           {"s1/profiles.csv", "s8/profiles.csv"}, {"p1/psych.json", "p8/psych.json"},
           {"p1/psych.md", "p8/psych.md"}, {"y1/synthetic.json", "y8/synthetic.json"}}) {
    const auto x = fixtures::slurp(tmp.path / a);
    CHECK_FALSE(x.empty());
    CHECK_MESSAGE(x == fixtures::slurp(tmp.path / b), a);
  }
}

TEST_CASE("markdown table agrees with the JSON report") {
  fixtures::TempDir tmp("cli-agree");
  run("screen --data " + mixed_battery().string() + " --out " + tmp.path.string(), tmp.path);
  const auto j = load(tmp.path / "screen.json");
  const auto md = fixtures::slurp(tmp.path / "screen.md");
  for (const auto& a : j.at("classification").at("assignments")) {
    const std::string row = "| " + a.at("model_id").get<std::string>() + " | " + a.at("tier").get<std::string>() + " |";
    CHECK_MESSAGE(md.find(row) != std::string::npos, row);
  }
  for (const auto& p : j.at("profiles")) {
    const auto& L = p.at("overall").at("L");
    if (L.is_null()) continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", L.get<double>());
    const auto at = md.find("| " + p.at("model_id").get<std::string>() + " |");
    REQUIRE(at != std::string::npos);
    const auto line = md.substr(at, md.find('\n', at) - at);
    CHECK_MESSAGE(line.find(buf) != std::string::npos, line);
  }
}

TEST_CASE("a one-point sweep equals the screen Tier 1 set") {
  fixtures::TempDir tmp("cli-sweep");
  const auto data = mixed_battery().string();
  run("screen --data " + data + " --out " + (tmp.path / "s").string(), tmp.path);
  const auto r = run("sweep --data " + data + " --l-grid 0.95 --f-grid 0.5 --out " + (tmp.path / "w").string(),
                     tmp.path);
  CHECK(r.code == 2);
  const auto sweep = load(tmp.path / "w" / "sweep.json");
  const auto& points = sweep.at("sweep").at("points");
  REQUIRE(points.size() == 1);
  std::set<std::string> t1;
  for (const auto& m : points[0].at("tier1")) t1.insert(m.get<std::string>());
  CHECK(t1 == tier1_of(load(tmp.path / "s" / "screen.json")));
}

TEST_CASE("tiered figure draws the configured thresholds") {
  fixtures::TempDir tmp("cli-plot");
  const auto data = mixed_battery().string();
  run("screen --data " + data + " --out " + (tmp.path / "d").string(), tmp.path);
  run("screen --data " + data + " --l-min 0.9 --f-min 0.4 --out " + (tmp.path / "e").string(), tmp.path);
  REQUIRE(run("plot --report " + (tmp.path / "d" / "screen.json").string() + " --figure tiered --out " +
                  (tmp.path / "d.svg").string(),
              tmp.path)
              .code == 0);
  REQUIRE(run("plot --report " + (tmp.path / "e" / "screen.json").string() + " --figure tiered --out " +
                  (tmp.path / "e.svg").string(),
              tmp.path)
              .code == 0);
  // Plot area: x 70..470 for F in [0, 1], y 440..40 for L in [0, 1].
  auto lines = [](const std::string& svg) {
    std::set<std::string> out;
    const std::regex re(R"re(<line x1="([0-9.]+)" y1="([0-9.]+)" x2="([0-9.]+)" y2="([0-9.]+)"[^>]*class="threshold")re");
    for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it)
      out.insert((*it)[1].str() == (*it)[3].str() ? "x=" + (*it)[1].str() : "y=" + (*it)[2].str());
    return out;
  };
  const auto d = fixtures::slurp(tmp.path / "d.svg");
  CHECK(d.find("stroke-dasharray") != std::string::npos);
  CHECK(lines(d) == std::set<std::string>{"x=270.00", "y=60.00"});
  CHECK(lines(fixtures::slurp(tmp.path / "e.svg")) == std::set<std::string>{"x=230.00", "y=80.00"});
}

TEST_CASE("figures from sparse or mismatched reports") {
  fixtures::TempDir tmp("cli-figs");
  std::ofstream(tmp.path / "empty.json") << R"({"meta": {}, "profiles": [], "classification": {"assignments": []}})";
  const auto ok = run("plot --report " + (tmp.path / "empty.json").string() + " --figure tiered --out " +
                          (tmp.path / "empty.svg").string(),
                      tmp.path);
  CHECK(ok.code == 0);
  const auto svg = fixtures::slurp(tmp.path / "empty.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  run("screen --data " + mixed_battery().string() + " --out " + (tmp.path / "s").string(), tmp.path);
  const auto miss = run("plot --report " + (tmp.path / "s" / "screen.json").string() + " --figure synthetic --out " +
                            (tmp.path / "x.svg").string(),
                        tmp.path);
  CHECK(miss.code == 1);
  CHECK(miss.err.find("MissingSection") != std::string::npos);

  std::ofstream(tmp.path / "bad.json") << "{ not json";
  const auto bad = run("plot --report " + (tmp.path / "bad.json").string() + " --figure tiered --out " +
                           (tmp.path / "b.svg").string(),
                       tmp.path);
  CHECK(bad.code == 1);
  CHECK(bad.err.find("ParseError") != std::string::npos);

  const auto unknown = run("plot --report " + (tmp.path / "empty.json").string() + " --figure pie --out " +
                               (tmp.path / "p.svg").string(),
                           tmp.path);
  CHECK(unknown.code == 1);
}

TEST_CASE("configuration errors") {
  fixtures::TempDir tmp("cli-config");
  std::ofstream(tmp.path / "bad.json") << R"({"seed": 4, "sede": 5})";
  const auto r = run("screen --config " + (tmp.path / "bad.json").string() + " --data " + mixed_battery().string() +
                         " --out " + (tmp.path / "o").string(),
                     tmp.path);
  CHECK(r.code == 1);
  CHECK(r.err.find("ConfigError") != std::string::npos);
  CHECK(r.err.find("sede") != std::string::npos);

  const auto csv = run("psych --data " + mixed_battery().string() + " --format csv --out " + (tmp.path / "p").string(),
                       tmp.path);
  CHECK(csv.code == 1);
  CHECK(csv.err.find("ConfigError") != std::string::npos);

  const auto range = run("screen --data " + mixed_battery().string() + " --l-min 1.5 --out " +
                             (tmp.path / "r").string(),
                         tmp.path);
  CHECK(range.code == 1);
}

TEST_CASE("flags override the config file") {
  fixtures::TempDir tmp("cli-precedence");
  std::ofstream(tmp.path / "c.json") << R"({"seed": 99, "thresholds": {"l_min": 0.9}})";
  run("screen --config " + (tmp.path / "c.json").string() + " --seed 5 --data " + mixed_battery().string() +
          " --out " + (tmp.path / "o").string(),
      tmp.path);
  const auto j = load(tmp.path / "o" / "screen.json");
  CHECK(j.at("meta").at("seed") == 5);
  CHECK(j.at("meta").at("thresholds").at("l_min") == 0.9);
}

TEST_CASE("synthetic validation through the CLI") {
  fixtures::TempDir tmp("cli-syn");
  const auto r = run("synthetic --iterations 200 --seed 7 --out " + tmp.path.string(), tmp.path);
  CHECK(r.code == 0);
  const auto j = load(tmp.path / "synthetic.json");
  const auto& policies = j.at("synthetic").at("policies");
  CHECK(j.at("synthetic").at("all_pass") == true);
  CHECK(policies.size() == 8);
  for (const auto& p : policies) CHECK_MESSAGE(p.at("pass") == true, p.at("policy"));
  CHECK(run("plot --report " + (tmp.path / "synthetic.json").string() + " --figure synthetic --out " +
                (tmp.path / "m.svg").string(),
            tmp.path)
            .code == 0);
}

TEST_CASE("synthetic takes item norms from a data directory") {
  fixtures::TempDir tmp("cli-syn-data");
  const auto data = mixed_battery().string();
  run("screen --data " + data + " --out " + (tmp.path / "s").string(), tmp.path);
  const auto r = run("synthetic --data " + data + " --iterations 100 --out " + (tmp.path / "y").string(), tmp.path);
  CHECK((r.code == 0 || r.code == 1));
  const auto syn = load(tmp.path / "y" / "synthetic.json");
  CHECK(syn.at("meta").at("input_digest") == load(tmp.path / "s" / "screen.json").at("meta").at("input_digest"));
  CHECK(syn.at("meta").at("input_digest") != "cbf29ce484222325");
}
