#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairsim/dataset.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

// Position weight of rank k (1-based): 1 / log2(1 + k).
double position_weight(int rank);

// Per-item exposure of one round of recommendation lists: each appearance
// at rank k contributes 1/log2(1+k). Lists longer than `list_length` are
// truncated. Returns a full-catalog vector (never-shown items get 0).
std::vector<double> round_exposure(const RankedLists& lists, int list_length,
                                   int item_count);

// Per-round and running cumulative per-item exposure. Rounds are recorded
// once each; cumulative values are the sums of all recorded rounds.
class ExposureLedger {
 public:
  ExposureLedger() = default;
  explicit ExposureLedger(int item_count);

  int item_count() const { return item_count_; }
  int round_count() const { return static_cast<int>(rounds_.size()); }
  bool has_round(int round) const;

  void accumulate(const std::vector<double>& exposure, int round);

  const std::vector<double>& cumulative() const { return cumulative_; }
  const std::vector<double>& round_exposure(int round) const;
  const std::vector<std::pair<int, std::vector<double>>>& rounds() const { return rounds_; }

  // Cumulative exposure restricted to rounds <= `round`.
  std::vector<double> cumulative_through(int round) const;

  // Items that ever appeared in a recommendation list (exposure > 0).
  std::size_t seen_count() const { return seen_count_; }
  bool seen(int item) const { return seen_[item] != 0; }

  void save(const std::filesystem::path& path) const;
  static ExposureLedger load(const std::filesystem::path& path);

 private:
  int item_count_ = 0;
  std::vector<std::pair<int, std::vector<double>>> rounds_;
  std::vector<double> cumulative_;
  std::vector<std::uint8_t> seen_;
  std::size_t seen_count_ = 0;
};

// Mean nDCG over users with at least one test interaction, binary
// relevance by test-set membership, discounts 1/log2(1+k). Users without
// test items are excluded; if no user qualifies, returns 0 and warns.
double ndcg(const RankedLists& lists, const InteractionStore& test, int list_length);

// Fraction of the catalog appearing at least once in the lists.
double aggregate_diversity(const RankedLists& lists, int item_count);

// Fraction of the catalog recommended at least once in any recorded round.
double cumulative_aggregate_diversity(const ExposureLedger& ledger, int item_count);

// 1 - Gini index of a per-item exposure distribution over the whole
// catalog, zeros included. Uniform exposure gives 1; all exposure on one
// item gives exactly 0 under the (m - 1) normalization. Throws when every
// exposure is zero or fewer than two items are given.
double equality_of_exposure(std::span<const double> exposure);

struct RoundReport {
  int round = 0;
  double ndcg = 0.0;
  double agg_div = 0.0;
  double cum_agg_div = 0.0;
  double ee = 0.0;
  double cum_ee = 0.0;
  double discrepancy = 0.0;
  long long clicks = 0;
};

inline constexpr std::string_view kRoundReportCsvHeader =
    "round,ndcg,agg_div,cum_agg_div,ee,cum_ee,discrepancy,clicks";

std::string to_csv_row(const RoundReport& report);
RoundReport round_report_from_csv_row(const std::string& row);
std::string to_json_line(const RoundReport& report);

}  // namespace fairsim
