#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fairsim/metrics.hpp"
#include "fairsim/rng.hpp"
#include "support/gini_oracle.hpp"
#include "support/tmpdir.hpp"

using namespace fairsim;

TEST_CASE("round exposure position weights") {
  // item 0 at position 1 for one user; at position 3 for another
  RankedLists lists{{0, 1, 2}, {3, 4, 0}};
  const std::vector<double> exposure = round_exposure(lists, 10, 6);
  CHECK(exposure[0] == doctest::Approx(1.0 + 1.0 / std::log2(4.0)).epsilon(1e-12));
  CHECK(exposure[5] == 0.0);

  RankedLists solo{{0}};
  CHECK(round_exposure(solo, 10, 2)[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exposure mass conservation") {
  std::mt19937_64 rng(3);
  const int m = 40;
  const int K = 5;
  RankedLists lists;
  for (int u = 0; u < 12; ++u) {
    RankedList list;
    while (static_cast<int>(list.size()) < K) {
      const int item = static_cast<int>(uniform_below(rng, m));
      if (std::find(list.begin(), list.end(), item) == list.end()) list.push_back(item);
    }
    lists.push_back(list);
  }
  const std::vector<double> exposure = round_exposure(lists, K, m);
  double total = 0.0;
  for (double e : exposure) total += e;
  double per_user = 0.0;
  for (int k = 1; k <= K; ++k) per_user += position_weight(k);
  CHECK(total == doctest::Approx(12.0 * per_user).epsilon(1e-12));
}

TEST_CASE("ledger accumulates and rejects duplicate rounds") {
  ExposureLedger ledger(3);
  ledger.accumulate({1.0, 0.0, 0.0}, 1);
  CHECK(ledger.cumulative()[0] == doctest::Approx(1.0));
  ledger.accumulate({0.5, 0.25, 0.0}, 2);
  CHECK(ledger.cumulative()[0] == doctest::Approx(1.5));
  CHECK(ledger.cumulative()[1] == doctest::Approx(0.25));
  CHECK(ledger.seen_count() == 2);
  CHECK(ledger.round_count() == 2);
  CHECK_THROWS_AS(ledger.accumulate({0, 0, 0}, 2), std::invalid_argument);

  // Eq(2) additivity: cumulative equals the sum of recorded rounds.
  const std::vector<double> through = ledger.cumulative_through(2);
  for (int i = 0; i < 3; ++i)
    CHECK(through[i] == doctest::Approx(ledger.cumulative()[i]).epsilon(1e-12));
}

TEST_CASE("ledger save and load round-trips") {
  testsupport::TmpDir tmp("ledger");
  ExposureLedger ledger(4);
  ledger.accumulate({1.0, 0.0, 0.25, 0.0}, 1);
  ledger.accumulate({0.0, 2.0, 0.25, 0.0}, 2);
  ledger.save(tmp.file("ledger.bin"));
  const ExposureLedger loaded = ExposureLedger::load(tmp.file("ledger.bin"));
  CHECK(loaded.item_count() == 4);
  CHECK(loaded.round_count() == 2);
  CHECK(loaded.cumulative() == ledger.cumulative());
  CHECK(loaded.seen_count() == 3);
  CHECK(loaded.round_exposure(2) == ledger.round_exposure(2));
}

TEST_CASE("ndcg hand cases") {
  InteractionStore test(3, 10);
  test.upsert({0, 1, 1.0, 0, InteractionSource::kOriginal});
  test.upsert({0, 2, 1.0, 0, InteractionSource::kOriginal});
  test.upsert({1, 5, 1.0, 0, InteractionSource::kOriginal});
  // user 2 has no test items -> excluded from the average

  SUBCASE("ideal front-loaded lists give 1") {
    RankedLists lists{{1, 2, 3}, {5, 0, 3}, {9}};
    CHECK(ndcg(lists, test, 3) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("no hits give 0") {
    RankedLists lists{{7, 8, 9}, {7, 8, 9}, {9}};
    CHECK(ndcg(lists, test, 3) == doctest::Approx(0.0));
  }
  SUBCASE("single test item at position 2 of K=2") {
    InteractionStore one(1, 10);
    one.upsert({0, 4, 1.0, 0, InteractionSource::kOriginal});
    RankedLists lists{{9, 4}};
    CHECK(ndcg(lists, one, 2) == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-9));
  }
  SUBCASE("no eligible users defines 0") {
    InteractionStore empty_test(2, 10);
    RankedLists lists{{1}, {2}};
    CHECK(ndcg(lists, empty_test, 2) == 0.0);
  }
}

TEST_CASE("aggregate diversity") {
  RankedLists same{{0, 1}, {0, 1}, {1, 0}};
  CHECK(aggregate_diversity(same, 20) == doctest::Approx(0.1));
  RankedLists all{{0, 1}, {2, 3}};
  CHECK(aggregate_diversity(all, 4) == doctest::Approx(1.0));
  CHECK(aggregate_diversity(RankedLists{{}, {}}, 4) == doctest::Approx(0.0));
}

TEST_CASE("cumulative aggregate diversity grows with coverage") {
  ExposureLedger ledger(100);
  std::vector<double> round1(100, 0.0), round2(100, 0.0);
  for (int i = 0; i < 10; ++i) round1[i] = 1.0;
  for (int i = 10; i < 20; ++i) round2[i] = 1.0;
  ledger.accumulate(round1, 1);
  CHECK(cumulative_aggregate_diversity(ledger, 100) == doctest::Approx(0.1));
  ledger.accumulate(round2, 2);
  CHECK(cumulative_aggregate_diversity(ledger, 100) == doctest::Approx(0.2));
}

TEST_CASE("equality of exposure identities") {
  SUBCASE("uniform gives exactly 1") {
    const std::vector<double> uniform(7, 0.3);
    CHECK(equality_of_exposure(uniform) == 1.0);
  }
  SUBCASE("full concentration gives exactly 0") {
    const std::vector<double> one_item{0.0, 0.0, 0.0, 0.0, 2.5};
    CHECK(equality_of_exposure(one_item) == 0.0);
  }
  SUBCASE("hand case (0,0,1,1)") {
    const std::vector<double> half{0.0, 0.0, 1.0, 1.0};
    CHECK(equality_of_exposure(half) == doctest::Approx(1.0 - 2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(equality_of_exposure(std::vector<double>{0.0, 0.0}), std::runtime_error);
    CHECK_THROWS_AS(equality_of_exposure(std::vector<double>{1.0}), std::invalid_argument);
  }
}

TEST_CASE("equality of exposure is scale invariant") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> exposure(2 + uniform_below(rng, 30));
    for (double& e : exposure) e = uniform_unit(rng) < 0.3 ? 0.0 : uniform_unit(rng) * 10;
    exposure[0] = 1.0;  // keep the total positive
    const double base = equality_of_exposure(exposure);
    std::vector<double> scaled = exposure;
    const double c = 0.001 + uniform_unit(rng) * 500;
    for (double& e : scaled) e *= c;
    CHECK(equality_of_exposure(scaled) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("equality of exposure matches the mean-absolute-difference oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> exposure(2 + uniform_below(rng, 40));
    for (double& e : exposure) e = uniform_unit(rng) < 0.25 ? 0.0 : uniform_unit(rng) * 5;
    exposure[exposure.size() / 2] = 0.5 + uniform_unit(rng);
    CHECK(equality_of_exposure(exposure) ==
          doctest::Approx(testsupport::equality_of_exposure_mad(exposure)).epsilon(1e-9));
  }
}

TEST_CASE("pigou-dalton transfers reduce equality") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> exposure(4 + uniform_below(rng, 12));
    for (double& e : exposure) e = 0.5 + uniform_unit(rng) * 4;
    const double before = equality_of_exposure(exposure);
    // move mass from a poorer item to a richer one
    std::size_t poor = 0, rich = 0;
    for (std::size_t i = 0; i < exposure.size(); ++i) {
      if (exposure[i] < exposure[poor]) poor = i;
      if (exposure[i] > exposure[rich]) rich = i;
    }
    if (poor == rich) continue;
    const double amount = exposure[poor] * 0.5;
    exposure[poor] -= amount;
    exposure[rich] += amount;
    CHECK(equality_of_exposure(exposure) < before);
  }
}

TEST_CASE("round report csv round-trips") {
  RoundReport report;
  report.round = 7;
  report.ndcg = 0.123456789;
  report.agg_div = 0.25;
  report.cum_agg_div = 0.5;
  report.ee = 0.75;
  report.cum_ee = 0.8;
  report.discrepancy = 42;
  report.clicks = 99;
  const std::string row = to_csv_row(report);
  const RoundReport parsed = round_report_from_csv_row(row);
  CHECK(parsed.round == report.round);
  CHECK(parsed.ndcg == doctest::Approx(report.ndcg).epsilon(1e-9));
  CHECK(parsed.clicks == report.clicks);
  CHECK(kRoundReportCsvHeader ==
        std::string("round,ndcg,agg_div,cum_agg_div,ee,cum_ee,discrepancy,clicks"));
}
