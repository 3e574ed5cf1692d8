#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairsim/dataset.hpp"
#include "fairsim/metrics.hpp"
#include "fairsim/mf.hpp"
#include "fairsim/rerank.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

enum class Pipeline { kMf, kDmStatic, kDmDynamic };

Pipeline pipeline_from_string(const std::string& name);
std::string to_string(Pipeline pipeline);

enum class GiniPopulation { kCatalog, kRecommended };

GiniPopulation gini_population_from_string(const std::string& name);
std::string to_string(GiniPopulation population);

struct SimConfig {
  std::string dataset;
  DatasetFormat format = DatasetFormat::kMovielensDelimited;
  std::string separator = "::";

  int rounds = 600;              // T
  int final_list_length = 10;    // K
  int long_list_length = 40;     // L
  double alpha = -0.5;           // click acceptance exponent, < 0
  double split_ratio = 0.8;
  std::uint64_t seed = 42;
  Pipeline pipeline = Pipeline::kMf;

  MfHyperparams mf;  // mf.seed is ignored; per-round seeds derive from `seed`

  TargetMode target_mode = TargetMode::kDynamicNormalized;
  double epsilon_exposure = 0.0;     // 0 = 1/log2(1+K)
  long long discrepancy_weight = 0;  // 0 = active_users*K*L + 1

  bool warm_start = false;
  bool freeze_test_set = false;
  GiniPopulation gini_population = GiniPopulation::kCatalog;
  bool dump_rerank = true;  // per-round targets/degrees JSONL
  bool dump_lists = true;   // per-round final lists JSONL

  std::string output_dir;
};

struct ClickOutcome {
  struct Click {
    int user = 0;
    int item = 0;
    int rank = 0;  // 1-based position in the final list
  };
  std::vector<Click> accepted;
  long long offered = 0;  // recommendation slots that took a draw
};

// Independent Bernoulli draw per recommended slot with acceptance
// probability e^(alpha * rank). Each user draws from its own substream of
// `rng_seed`, so outcomes are order-independent and reproducible.
ClickOutcome simulate_clicks(const RankedLists& final_lists, double alpha,
                             std::uint64_t rng_seed);

// Per-round observation hook; throwing aborts the run after the round's
// outputs are flushed, which is also how tests exercise resumption.
class RoundObserver {
 public:
  virtual ~RoundObserver() = default;
  virtual void on_round(int round, const RankedLists& final_lists,
                        const RoundReport& report) = 0;
};

class SimRoundError : public std::runtime_error {
 public:
  SimRoundError(int round, const std::string& what);
  int round() const { return round_; }

 private:
  int round_;
};

// Runs the full feedback loop for config.rounds rounds: split the current
// profiles, retrain the base recommender, build long lists, produce final
// lists per the configured pipeline, record metrics, then draw clicks and
// fold them back into the profiles. Writes config.json, rounds.csv,
// rounds.jsonl, clicks.jsonl, ledger.bin, manifest.json (and the optional
// dumps) under config.output_dir, flushing after every round. With
// `resume`, continues a partial run from its persisted state.
std::vector<RoundReport> run(const SimConfig& config, bool resume = false,
                             RoundObserver* observer = nullptr);

}  // namespace fairsim
