#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "vscreen/error.hpp"
#include "vscreen/indices.hpp"
#include "vscreen/synthetic.hpp"

using namespace vscreen;
using namespace vscreen::synthetic;

namespace {

std::vector<PolicySpec> all_defaults() {
  std::vector<PolicySpec> out;
  for (auto p : kAllPolicies) out.push_back(PolicySpec::defaults(p));
  return out;
}

const std::vector<SyntheticItem>& battery() {
  static const auto items = sample_item_accuracies({}, 524, 20260101);
  return items;
}

}  // namespace

TEST_CASE("expected verdict table") {
  for (auto p : {Policy::AlwaysKeepBet, Policy::AlwaysWithdrawNoBet, Policy::Random5050, Policy::InvertedMonitor,
                 Policy::R1Like})
    CHECK(expected_verdict(p) == Verdict::Flagged);
  for (auto p : {Policy::Random80Keep, Policy::PerfectMonitor, Policy::NoisyMonitor})
    CHECK(expected_verdict(p) == Verdict::Passed);
  for (auto p : kAllPolicies) CHECK(*parse_policy(to_string(p)) == p);
  CHECK_FALSE(parse_policy("Nope"));
}

TEST_CASE("policy parameters") {
  const auto noisy = PolicySpec::defaults(Policy::NoisyMonitor);
  CHECK(noisy.param("keep_on_correct") == 0.8);
  CHECK(noisy.param("keep_on_incorrect") == doctest::Approx(0.4));
  auto bad = noisy;
  bad.parameters["keep_on_correct"] = 1.2;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(noisy.param("missing"), Error);
}

TEST_CASE("policy rules per record") {
  const auto& items = battery();
  for (auto p : kAllPolicies) {
    CounterRng rng(1, static_cast<std::uint64_t>(p));
    const auto rs = generate_policy_dataset(PolicySpec::defaults(p), items, rng, "m");
    REQUIRE(rs.size() == items.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const auto& r = rs[i];
      CHECK(r.item_id == items[i].item_id);
      CHECK(r.prospective.has_value() == (r.track == Track::T6));
      switch (p) {
        case Policy::AlwaysKeepBet: CHECK((r.kept() && r.bet_on())); break;
        case Policy::AlwaysWithdrawNoBet: CHECK((r.withdrew() && !r.bet_on())); break;
        case Policy::PerfectMonitor: CHECK(r.kept() == r.correct); break;
        case Policy::InvertedMonitor: CHECK(r.kept() == !r.correct); break;
        case Policy::R1Like:
          CHECK(r.kept() == !r.correct);
          CHECK(r.bet_on());
          if (r.correct) CHECK(r.withdrew());
          break;
        default: break;
      }
      if (p != Policy::R1Like) CHECK(r.bet_on() == r.kept());
    }
  }
}

TEST_CASE("item accuracy sampling") {
  AccuracyConfig flat;
  flat.mode = AccuracyMode::Uniform;
  flat.uniform_lo = flat.uniform_hi = 0.8;
  for (const auto& it : sample_item_accuracies(flat, 50, 1)) CHECK(it.accuracy == 0.8);

  const auto b = sample_item_accuracies({}, 10000, 4);
  double m = 0;
  for (const auto& it : b) m += it.accuracy;
  CHECK(std::abs(m / 10000 - 7.0 / 9.0) <= 0.01);
  CHECK(sample_item_accuracies({}, 100, 4)[7].accuracy == sample_item_accuracies({}, 100, 4)[7].accuracy);

  AccuracyConfig bad;
  bad.beta_a = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  AccuracyConfig bad_u;
  bad_u.mode = AccuracyMode::Uniform;
  bad_u.uniform_lo = 0.9;
  bad_u.uniform_hi = 0.1;
  CHECK_THROWS_AS(bad_u.validate(), Error);
}

TEST_CASE("battery layout follows the full-battery proportions") {
  const auto items = battery_layout(524);
  std::map<Track, int> counts;
  for (const auto& it : items) ++counts[it.track];
  CHECK(counts[Track::T1] == 98);
  CHECK(counts[Track::T2] == 90);
  CHECK(counts[Track::T3] == 116);
  CHECK(counts[Track::T4] == 60);
  CHECK(counts[Track::T5] == 88);
  CHECK(counts[Track::T6] == 72);
  CHECK(items.front().item_id == "T1-0001");
  CHECK(battery_layout(10).size() == 10);
}

TEST_CASE("norms passthrough") {
  ItemNorms norms;
  norms["T3-0001"] = {20, 0.9, 0.5, 0.65};
  norms["zz"] = {20, 0.9, 0.5, 0.25};
  norms["mapped"] = {20, 0.9, 0.5, 0.5};
  const auto items = items_from_norms(norms, {{"mapped", Track::T6}});
  REQUIRE(items.size() == 3);
  std::map<std::string, SyntheticItem> by_id;
  for (const auto& it : items) by_id[it.item_id] = it;
  CHECK(by_id["T3-0001"].accuracy == 0.65);
  CHECK(by_id["T3-0001"].track == Track::T3);
  CHECK(by_id["zz"].track == Track::T1);
  CHECK(by_id["mapped"].track == Track::T6);
}

TEST_CASE("validation matrix is bit identical across runs and thread counts") {
  const auto& items = battery();
  const auto consensus = consensus_from_accuracy(items);
  ValidationOptions a;
  a.iterations = 120;
  a.seed = 5;
  a.threads = 1;
  ValidationOptions b = a;
  b.threads = 8;
  const auto x = run_policy_validation(all_defaults(), items, consensus, a);
  const auto y = run_policy_validation(all_defaults(), items, consensus, b);
  REQUIRE(x.policies.size() == y.policies.size());
  for (std::size_t i = 0; i < x.policies.size(); ++i)
    for (std::size_t j = 0; j < x.policies[i].summaries.size(); ++j) {
      CHECK(x.policies[i].summaries[j].second.mean == y.policies[i].summaries[j].second.mean);
      CHECK(x.policies[i].summaries[j].second.sd == y.policies[i].summaries[j].second.sd);
    }
}

TEST_CASE("deterministic policies have zero spread and exact profiles") {
  const auto& items = battery();
  ValidationOptions o;
  o.iterations = 100;
  o.seed = 9;
  const auto vm = run_policy_validation(all_defaults(), items, consensus_from_accuracy(items), o);
  const auto* kb = vm.find(Policy::AlwaysKeepBet);
  for (const char* name : {"L", "K", "TRIN", "F", "Fp", "withdraw_delta"}) CHECK(kb->find(name)->sd == 0.0);
  CHECK(kb->find("L")->mean == 1.0);
  CHECK(kb->find("K")->mean == 1.0);
  CHECK(kb->find("TRIN")->mean == 1.0);
  CHECK(kb->find("F")->mean == 0.0);
  CHECK(kb->find("Fp")->mean == 0.0);
  CHECK(kb->find("withdraw_delta")->mean == 0.0);
  const auto* inv = vm.find(Policy::InvertedMonitor);
  CHECK(inv->find("RBS")->mean == 1.0);
  CHECK(inv->find("L")->mean == 1.0);
  CHECK(inv->find("Fp")->mean == 1.0);
  CHECK(inv->find("item_sensitivity")->mean == doctest::Approx(-1.0));
  CHECK(vm.find(Policy::PerfectMonitor)->find("item_sensitivity")->mean == doctest::Approx(1.0));
  CHECK(vm.find(Policy::R1Like)->find("contradiction_rate_correct")->mean == 1.0);
}

TEST_CASE("a single iteration runs with a warning and zero SD") {
  const auto& items = battery();
  ValidationOptions o;
  o.iterations = 1;
  o.seed = 2;
  const auto vm = run_policy_validation(all_defaults(), items, consensus_from_accuracy(items), o);
  CHECK_FALSE(vm.warnings.empty());
  for (const auto& p : vm.policies)
    for (const auto& [name, s] : p.summaries) CHECK(s.sd == 0.0);
}

TEST_CASE("Random80Keep passes while its withdraw delta is centred on zero") {
  const auto& items = battery();
  ValidationOptions o;
  o.iterations = 400;
  o.seed = 31;
  const std::vector<PolicySpec> ps{PolicySpec::defaults(Policy::Random80Keep)};
  const auto vm = run_policy_validation(ps, items, consensus_from_accuracy(items), o);
  const auto& r = vm.policies.front();
  CHECK(std::abs(r.find("withdraw_delta")->mean) <= 0.01);
  CHECK(r.verdict == Verdict::Passed);
  CHECK(r.pass());
}

TEST_CASE("noisy monitor keeps one phenotype across tracks") {
  // Mid-difficulty items give every track enough errors to label.
  AccuracyConfig half;
  half.mode = AccuracyMode::Uniform;
  half.uniform_lo = half.uniform_hi = 0.5;
  const auto items = sample_item_accuracies(half, 524, 1);
  const auto consensus = consensus_from_accuracy(items);
  int zero = 0;
  const int n = 1000;
  for (int it = 0; it < n; ++it) {
    CounterRng rng(77, static_cast<std::uint64_t>(it));
    const auto rs = generate_policy_dataset(PolicySpec::defaults(Policy::NoisyMonitor), items, rng, "noisy");
    const auto prof = compute_profile("noisy", rs, consensus);
    zero += prof.icn.switches && *prof.icn.switches == 0;
  }
  CHECK(zero >= 0.95 * n);
}
