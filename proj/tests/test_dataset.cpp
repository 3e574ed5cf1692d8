#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "fairsim/dataset.hpp"
#include "fairsim/rng.hpp"
#include "support/tmpdir.hpp"

using namespace fairsim;
using testsupport::TmpDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

InteractionStore random_store(std::mt19937_64& rng, int users, int items,
                              int max_profile) {
  InteractionStore store(users, items);
  for (int u = 0; u < users; ++u) {
    const int size = 1 + static_cast<int>(uniform_below(rng, max_profile));
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < std::min(size, items)) {
      chosen.insert(static_cast<int>(uniform_below(rng, items)));
    }
    for (int item : chosen) {
      store.upsert({u, item, 1.0 + static_cast<double>(uniform_below(rng, 5)), 0,
                    InteractionSource::kOriginal});
    }
  }
  return store;
}

}  // namespace

TEST_CASE("single movielens record") {
  TmpDir tmp("dataset");
  write_file(tmp.file("one.dat"), "1::1193::5::978300760\n");
  const LoadResult result = load_dataset(tmp.file("one.dat"), DatasetFormat::kMovielensDelimited);
  CHECK(result.store.user_count() == 1);
  CHECK(result.store.item_count() == 1);
  CHECK(result.store.size() == 1);
  CHECK(result.store.profile(0).at(0).value == 5.0);
  CHECK(result.store.profile(0).at(0).source == InteractionSource::kOriginal);
  CHECK(result.store.profile(0).at(0).round_added == 0);
  CHECK(result.report.to_json() ==
        R"({"duplicates_dropped":0,"interactions":1,"items":1,"users":1})");
}

TEST_CASE("empty file errors") {
  TmpDir tmp("dataset");
  write_file(tmp.file("empty.dat"), "");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("empty.dat"), DatasetFormat::kMovielensDelimited),
                       "no interactions in dataset file", std::runtime_error);
}

TEST_CASE("duplicates keep the last value and are counted") {
  TmpDir tmp("dataset");
  write_file(tmp.file("dup.dat"), "1::7::3::0\n1::7::4::0\n");
  const LoadResult result = load_dataset(tmp.file("dup.dat"), DatasetFormat::kMovielensDelimited);
  CHECK(result.store.size() == 1);
  CHECK(result.store.profile(0).at(0).value == 4.0);
  CHECK(result.report.duplicates_dropped == 1);
}

TEST_CASE("malformed line names the line number") {
  TmpDir tmp("dataset");
  write_file(tmp.file("bad.dat"), "1::2::3::0\n1::junk\n");
  try {
    load_dataset(tmp.file("bad.dat"), DatasetFormat::kMovielensDelimited);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("csv format skips the header and uses commas") {
  TmpDir tmp("dataset");
  write_file(tmp.file("data.csv"), "user,item,rating\nu1,i1,4.5\nu2,i1,2\n");
  const LoadResult result = load_dataset(tmp.file("data.csv"), DatasetFormat::kCsv);
  CHECK(result.store.user_count() == 2);
  CHECK(result.store.item_count() == 1);
  CHECK(result.store.size() == 2);
}

TEST_CASE("re-indexing is a bijection") {
  TmpDir tmp("dataset");
  write_file(tmp.file("ids.dat"), "17::900::1::0\n3::900::2::0\n17::24::3::0\n");
  const LoadResult result = load_dataset(tmp.file("ids.dat"), DatasetFormat::kMovielensDelimited);
  // Dense ids decode to distinct raw ids covering exactly the input set.
  CHECK(result.user_ids == std::vector<std::string>{"17", "3"});
  CHECK(result.item_ids == std::vector<std::string>{"900", "24"});
  std::set<std::string> unique_users(result.user_ids.begin(), result.user_ids.end());
  CHECK(unique_users.size() == result.user_ids.size());
}

TEST_CASE("split sizes follow the floor rule") {
  InteractionStore store(3, 20);
  for (int item = 0; item < 10; ++item)
    store.upsert({0, item, 1.0, 0, InteractionSource::kOriginal});
  store.upsert({1, 0, 1.0, 0, InteractionSource::kOriginal});
  for (int item = 0; item < 2; ++item)
    store.upsert({2, item, 1.0, 0, InteractionSource::kOriginal});

  const SplitPair pair = split(store, 0.8, 42);
  CHECK(pair.train.profile(0).size() == 8);
  CHECK(pair.test.profile(0).size() == 2);
  CHECK(pair.train.profile(1).size() == 1);  // single interaction goes to train
  CHECK(pair.test.profile(1).size() == 0);
  CHECK(pair.train.profile(2).size() == 1);  // floor(0.8*2) = 1
  CHECK(pair.test.profile(2).size() == 1);
}

TEST_CASE("split is deterministic and an exact partition") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const InteractionStore store = random_store(rng, 8, 30, 12);
    const SplitPair a = split(store, 0.8, 1000 + trial);
    const SplitPair b = split(store, 0.8, 1000 + trial);
    for (int u = 0; u < store.user_count(); ++u) {
      // determinism
      REQUIRE(a.train.profile(u).size() == b.train.profile(u).size());
      for (std::size_t i = 0; i < a.train.profile(u).size(); ++i) {
        CHECK(a.train.profile(u)[i].item == b.train.profile(u)[i].item);
      }
      // partition: train(u) and test(u) are disjoint and cover profile(u)
      std::set<int> train_items, test_items, all_items;
      for (const auto& x : a.train.profile(u)) train_items.insert(x.item);
      for (const auto& x : a.test.profile(u)) test_items.insert(x.item);
      for (const auto& x : store.profile(u)) all_items.insert(x.item);
      CHECK(train_items.size() + test_items.size() == all_items.size());
      std::set<int> unioned = train_items;
      unioned.insert(test_items.begin(), test_items.end());
      CHECK(unioned == all_items);
    }
  }
}

TEST_CASE("split rejects bad ratios") {
  InteractionStore store(1, 2);
  store.upsert({0, 0, 1.0, 0, InteractionSource::kOriginal});
  CHECK_THROWS_AS(split(store, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(store, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(store, -0.5, 1), std::invalid_argument);
}

TEST_CASE("apply_clicks appends and skips duplicates") {
  InteractionStore store(2, 10);
  store.upsert({0, 1, 5.0, 0, InteractionSource::kOriginal});
  store.upsert({1, 2, 3.0, 0, InteractionSource::kOriginal});

  CHECK(store.apply_clicks({}, 1) == 0);
  CHECK(store.size() == 2);

  const std::vector<std::pair<int, int>> clicks{{0, 3}, {0, 4}, {1, 5}};
  CHECK(store.apply_clicks(clicks, 3) == 0);
  CHECK(store.size() == 5);
  CHECK(store.profile(0).back().round_added == 3);
  CHECK(store.profile(0).back().source == InteractionSource::kClick);
  CHECK(store.profile(0).back().value == 1.0);

  // Re-applying the same clicks is an identity (idempotence).
  CHECK(store.apply_clicks(clicks, 4) == 3);
  CHECK(store.size() == 5);

  // A click duplicating an original profile item is skipped too.
  CHECK(store.apply_clicks({{0, 1}}, 5) == 1);
  CHECK(store.size() == 5);
}

TEST_CASE("store rejects inconsistent interactions") {
  InteractionStore store(1, 2);
  CHECK_THROWS_AS(store.upsert({0, 0, 0.0, 0, InteractionSource::kOriginal}),
                  std::invalid_argument);
  CHECK_THROWS_AS(store.upsert({0, 0, 1.0, 2, InteractionSource::kOriginal}),
                  std::invalid_argument);
  CHECK_THROWS_AS(store.upsert({0, 0, 1.0, 0, InteractionSource::kClick}),
                  std::invalid_argument);
  CHECK_THROWS_AS(store.upsert({0, 5, 1.0, 0, InteractionSource::kOriginal}),
                  std::out_of_range);
}

TEST_CASE("fingerprint changes with content") {
  TmpDir tmp("dataset");
  write_file(tmp.file("a.dat"), "1::1::1::0\n");
  write_file(tmp.file("b.dat"), "1::1::2::0\n");
  CHECK(dataset_fingerprint(tmp.file("a.dat")) == dataset_fingerprint(tmp.file("a.dat")));
  CHECK(dataset_fingerprint(tmp.file("a.dat")) != dataset_fingerprint(tmp.file("b.dat")));
}
