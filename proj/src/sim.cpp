#include "fairsim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fairsim/config.hpp"
#include "fairsim/rng.hpp"

namespace fairsim {

namespace fs = std::filesystem;

Pipeline pipeline_from_string(const std::string& name) {
  if (name == "mf") return Pipeline::kMf;
  if (name == "mf+dm-static") return Pipeline::kDmStatic;
  if (name == "mf+dm-dynamic") return Pipeline::kDmDynamic;
  throw std::invalid_argument("unknown pipeline: " + name);
}

std::string to_string(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::kMf: return "mf";
    case Pipeline::kDmStatic: return "mf+dm-static";
    case Pipeline::kDmDynamic: return "mf+dm-dynamic";
  }
  throw std::logic_error("bad pipeline");
}

GiniPopulation gini_population_from_string(const std::string& name) {
  if (name == "catalog") return GiniPopulation::kCatalog;
  if (name == "recommended") return GiniPopulation::kRecommended;
  throw std::invalid_argument("unknown gini population: " + name);
}

std::string to_string(GiniPopulation population) {
  return population == GiniPopulation::kCatalog ? "catalog" : "recommended";
}

ClickOutcome simulate_clicks(const RankedLists& final_lists, double alpha,
                             std::uint64_t rng_seed) {
  if (alpha > 0) throw std::invalid_argument("alpha must be nonpositive");
  ClickOutcome outcome;
  for (int user = 0; user < static_cast<int>(final_lists.size()); ++user) {
    const RankedList& list = final_lists[user];
    if (list.empty()) continue;
    std::mt19937_64 rng(derive_seed(rng_seed, static_cast<std::uint64_t>(user), "clicks-user"));
    for (int rank = 1; rank <= static_cast<int>(list.size()); ++rank) {
      ++outcome.offered;
      const double acceptance = std::exp(alpha * rank);
      if (uniform_unit(rng) < acceptance) {
        outcome.accepted.push_back({user, list[rank - 1], rank});
      }
    }
  }
  return outcome;
}

SimRoundError::SimRoundError(int round, const std::string& what)
    : std::runtime_error("round " + std::to_string(round) + ": " + what), round_(round) {}

namespace {

double equality_of_exposure_for(const std::vector<double>& exposure,
                                GiniPopulation population) {
  if (population == GiniPopulation::kCatalog) return equality_of_exposure(exposure);
  std::vector<double> recommended;
  recommended.reserve(exposure.size());
  for (double e : exposure) {
    if (e > 0.0) recommended.push_back(e);
  }
  if (recommended.size() < 2) return 1.0;  // degenerate population
  return equality_of_exposure(recommended);
}

// Streams owned by one run; everything flushed after each round so a
// crashed or aborted run leaves a resumable directory.
struct RunWriter {
  fs::path dir;
  std::ofstream rounds_csv;
  std::ofstream rounds_jsonl;
  std::ofstream clicks_jsonl;
  std::ofstream rerank_jsonl;
  std::ofstream lists_jsonl;

  RunWriter(const fs::path& run_dir, bool append, const SimConfig& config) : dir(run_dir) {
    const auto mode = append ? std::ios::app : std::ios::trunc;
    rounds_csv.open(dir / "rounds.csv", mode);
    rounds_jsonl.open(dir / "rounds.jsonl", mode);
    clicks_jsonl.open(dir / "clicks.jsonl", mode);
    if (config.dump_rerank) rerank_jsonl.open(dir / "rerank.jsonl", mode);
    if (config.dump_lists) lists_jsonl.open(dir / "lists.jsonl", mode);
    if (!rounds_csv || !rounds_jsonl || !clicks_jsonl)
      throw std::runtime_error("cannot open run outputs under " + dir.string());
    if (!append) rounds_csv << kRoundReportCsvHeader << '\n';
  }

  void flush_all() {
    rounds_csv.flush();
    rounds_jsonl.flush();
    clicks_jsonl.flush();
    if (rerank_jsonl.is_open()) rerank_jsonl.flush();
    if (lists_jsonl.is_open()) lists_jsonl.flush();
  }
};

std::vector<RoundReport> read_reports(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path.string());
  std::vector<RoundReport> reports;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;  // header
    }
    reports.push_back(round_report_from_csv_row(line));
  }
  return reports;
}

void replay_clicks(InteractionStore& store, const fs::path& clicks_path,
                   int through_round) {
  std::ifstream in(clicks_path);
  if (!in) return;  // no clicks recorded yet
  std::string line;
  std::vector<std::pair<int, int>> batch;
  int batch_round = -1;
  auto flush_batch = [&]() {
    if (batch_round >= 1 && !batch.empty()) store.apply_clicks(batch, batch_round);
    batch.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    const int round = j.at("round").get<int>();
    if (round > through_round) break;
    if (round != batch_round) {
      flush_batch();
      batch_round = round;
    }
    batch.emplace_back(j.at("user").get<int>(), j.at("item").get<int>());
  }
  flush_batch();
}

// Train split of the current store with the frozen test pairs removed.
SplitPair frozen_split(const InteractionStore& store, const InteractionStore& frozen_test) {
  SplitPair pair{InteractionStore(store.user_count(), store.item_count()),
                 InteractionStore(store.user_count(), store.item_count())};
  for (int user = 0; user < store.user_count(); ++user) {
    for (const Interaction& interaction : store.profile(user)) {
      if (frozen_test.contains(user, interaction.item)) continue;
      pair.train.upsert(interaction);
    }
  }
  for (int user = 0; user < frozen_test.user_count(); ++user) {
    for (const Interaction& interaction : frozen_test.profile(user)) {
      pair.test.upsert(interaction);
    }
  }
  return pair;
}

}  // namespace

std::vector<RoundReport> run(const SimConfig& config, bool resume, RoundObserver* observer) {
  validate(config);
  const auto start_time = std::chrono::steady_clock::now();

  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.json";

  const std::string hash = config_hash(config);
  const std::string fingerprint = dataset_fingerprint(config.dataset);

  RunManifest manifest;
  int completed = 0;
  if (resume) {
    if (!fs::exists(manifest_path))
      throw std::runtime_error("cannot resume: no manifest in " + dir.string());
    manifest = RunManifest::load(manifest_path);
    if (manifest.config_hash != hash)
      throw std::runtime_error("cannot resume: config differs from the recorded run");
    if (manifest.dataset_fingerprint != fingerprint)
      throw std::runtime_error("cannot resume: dataset differs from the recorded run");
    completed = manifest.rounds_completed;
  } else {
    if (fs::exists(manifest_path))
      throw std::runtime_error("run directory already contains a run: " + dir.string());
    manifest.run_id = hash.substr(0, 12) + "-" + fingerprint.substr(0, 8);
    manifest.config_hash = hash;
    manifest.dataset_fingerprint = fingerprint;
    std::ofstream config_out(dir / "config.json", std::ios::trunc);
    config_out << config_json(config) << '\n';
    if (!config_out) throw std::runtime_error("cannot write config.json");
    manifest.save(manifest_path);
  }
  const double base_wall_time = manifest.wall_time;

  LoadResult loaded = load_dataset(config.dataset, config.format, config.separator);
  InteractionStore store = std::move(loaded.store);
  const int item_count = store.item_count();
  const int K = config.final_list_length;

  // The frozen test set is the round-1 partition of the pristine store, so
  // it is identical whether a run is fresh or resumed.
  InteractionStore frozen_test;
  if (config.freeze_test_set) {
    frozen_test = split(store, config.split_ratio, derive_seed(config.seed, 1, "split")).test;
  }

  ExposureLedger ledger(item_count);
  std::vector<RoundReport> reports;
  if (resume && completed > 0) {
    reports = read_reports(dir / "rounds.csv");
    if (static_cast<int>(reports.size()) != completed)
      throw std::runtime_error("rounds.csv does not match manifest rounds_completed");
    ledger = ExposureLedger::load(dir / "ledger.bin");
    replay_clicks(store, dir / "clicks.jsonl", completed);
  }
  if (completed >= config.rounds) return reports;

  RunWriter writer(dir, /*append=*/resume && fs::exists(dir / "rounds.csv"), config);

  FactorModel previous_model;
  bool have_previous_model = false;

  RerankConfig rerank_cfg;
  rerank_cfg.final_list_length = K;
  rerank_cfg.long_list_length = config.long_list_length;
  rerank_cfg.discrepancy_weight = config.discrepancy_weight;
  rerank_cfg.target_mode = config.target_mode;
  rerank_cfg.epsilon_exposure = config.epsilon_exposure > 0
                                    ? config.epsilon_exposure
                                    : default_epsilon_exposure(K);

  for (int round = completed + 1; round <= config.rounds; ++round) {
    try {
      // (1) Partition the current profiles.
      SplitPair split_pair;
      if (config.freeze_test_set) {
        split_pair = frozen_split(store, frozen_test);
      } else {
        split_pair = split(store, config.split_ratio,
                           derive_seed(config.seed, static_cast<std::uint64_t>(round), "split"));
      }

      // (2) Retrain the base recommender.
      MfHyperparams hp = config.mf;
      hp.seed = derive_seed(config.seed, static_cast<std::uint64_t>(round), "train");
      TrainStats train_stats;
      const FactorModel model =
          train(split_pair.train, hp,
                config.warm_start && have_previous_model ? &previous_model : nullptr,
                &train_stats);
      if (train_stats.monotonicity_violations > 0 &&
          hp.learning_rate <= kStableLearningRateCeiling) {
        std::cerr << "warning: round " << round << ": training loss rose in "
                  << train_stats.monotonicity_violations << " epoch(s)\n";
      }
      if (config.warm_start) {
        previous_model = model;
        have_previous_model = true;
      }

      // (3) Long candidate lists, excluding each user's full profile.
      const RankedLists candidate_lists = long_lists(model, store, config.long_list_length);
      int slot_users = 0;
      for (const RankedList& list : candidate_lists) {
        if (!list.empty()) ++slot_users;
      }

      // (4) Final lists per pipeline.
      const TargetVector statics = static_targets(candidate_lists, K, item_count);
      TargetVector round_targets = statics;
      RankedLists final_lists;
      DiscrepancyStats stats;
      if (config.pipeline == Pipeline::kMf) {
        final_lists.resize(candidate_lists.size());
        for (std::size_t user = 0; user < candidate_lists.size(); ++user) {
          const auto& list = candidate_lists[user];
          const std::size_t take = std::min<std::size_t>(K, list.size());
          final_lists[user].assign(list.begin(), list.begin() + take);
        }
        stats = discrepancy_stats(final_lists, candidate_lists, round_targets);
      } else {
        if (config.pipeline == Pipeline::kDmDynamic) {
          const TargetMode mode = config.target_mode == TargetMode::kStatic
                                      ? TargetMode::kDynamicNormalized
                                      : config.target_mode;
          round_targets = dynamic_targets(statics, ledger.cumulative(), round, mode,
                                          rerank_cfg.epsilon_exposure, slot_users, K);
        }
        RerankResult reranked = rerank(candidate_lists, round_targets, rerank_cfg);
        final_lists = std::move(reranked.lists);
        stats = std::move(reranked.stats);
      }

      // (5) Exposure bookkeeping, then the round report.
      const std::vector<double> exposure = round_exposure(final_lists, K, item_count);
      ledger.accumulate(exposure, round);

      RoundReport report;
      report.round = round;
      report.ndcg = ndcg(final_lists, split_pair.test, K);
      report.agg_div = aggregate_diversity(final_lists, item_count);
      report.cum_agg_div = cumulative_aggregate_diversity(ledger, item_count);
      report.ee = equality_of_exposure_for(exposure, config.gini_population);
      report.cum_ee = equality_of_exposure_for(ledger.cumulative(), config.gini_population);
      report.discrepancy = static_cast<double>(stats.l1_discrepancy);

      // (6) Click simulation and profile update.
      const ClickOutcome clicks = simulate_clicks(
          final_lists, config.alpha, derive_seed(config.seed, static_cast<std::uint64_t>(round), "clicks"));
      report.clicks = static_cast<long long>(clicks.accepted.size());
      std::vector<std::pair<int, int>> click_pairs;
      click_pairs.reserve(clicks.accepted.size());
      for (const auto& click : clicks.accepted) click_pairs.emplace_back(click.user, click.item);
      const std::size_t skipped = store.apply_clicks(click_pairs, round);
      if (skipped != 0) {
        std::cerr << "warning: round " << round << ": " << skipped
                  << " click(s) duplicated existing profile entries\n";
      }

      // (7) Persist the round.
      writer.rounds_csv << to_csv_row(report) << '\n';
      writer.rounds_jsonl << to_json_line(report) << '\n';
      for (const auto& click : clicks.accepted) {
        nlohmann::json j;
        j["round"] = round;
        j["user"] = click.user;
        j["item"] = click.item;
        j["rank"] = click.rank;
        writer.clicks_jsonl << j.dump() << '\n';
      }
      if (writer.rerank_jsonl.is_open()) {
        nlohmann::json j;
        j["round"] = round;
        j["mode"] = to_string(round_targets.mode);
        j["discrepancy"] = stats.l1_discrepancy;
        j["overflow_units"] = stats.overflow_units;
        nlohmann::json entries = nlohmann::json::array();
        for (int item = 0; item < item_count; ++item) {
          if (round_targets.targets[item] == 0 && stats.degrees[item] == 0) continue;
          entries.push_back({item, round_targets.targets[item], stats.degrees[item]});
        }
        j["items"] = std::move(entries);  // [item, target, degree]
        writer.rerank_jsonl << j.dump() << '\n';
      }
      if (writer.lists_jsonl.is_open()) {
        nlohmann::json j;
        j["round"] = round;
        j["lists"] = final_lists;
        writer.lists_jsonl << j.dump() << '\n';
      }
      ledger.save(dir / "ledger.bin");
      manifest.rounds_completed = round;
      manifest.wall_time =
          base_wall_time +
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
      manifest.save(manifest_path);
      writer.flush_all();

      reports.push_back(report);
      if (observer) observer->on_round(round, final_lists, report);
    } catch (const SimRoundError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimRoundError(round, e.what());
    }
  }

  return reports;
}

}  // namespace fairsim
