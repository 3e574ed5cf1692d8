#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairsim {

enum class InteractionSource : std::uint8_t { kOriginal, kClick };

struct Interaction {
  int user = 0;
  int item = 0;
  double value = 0.0;        // original strength, kept for reporting; models binarize
  int round_added = 0;       // 0 = original data, >= 1 = simulated click
  InteractionSource source = InteractionSource::kOriginal;
};

// User-item interaction profiles with at most one record per (user, item).
// User and item counts are fixed at construction for the lifetime of a run.
class InteractionStore {
 public:
  InteractionStore() = default;
  InteractionStore(int user_count, int item_count);

  int user_count() const { return user_count_; }
  int item_count() const { return item_count_; }
  std::size_t size() const { return size_; }

  const std::vector<Interaction>& profile(int user) const;
  bool contains(int user, int item) const;

  // Inserts, or overwrites the value of an existing (user, item) record.
  // Returns true when a record was replaced.
  bool upsert(const Interaction& interaction);

  // Appends click interactions (value 1, source kClick). Clicks on pairs
  // already in a profile are skipped; returns the skip count.
  std::size_t apply_clicks(const std::vector<std::pair<int, int>>& clicks, int round);

 private:
  void check_indices(int user, int item) const;

  int user_count_ = 0;
  int item_count_ = 0;
  std::size_t size_ = 0;
  std::vector<std::vector<Interaction>> profiles_;
  std::vector<std::unordered_map<int, std::size_t>> position_;  // item -> index in profile
};

struct SplitPair {
  InteractionStore train;
  InteractionStore test;
};

enum class DatasetFormat { kMovielensDelimited, kCsv };

DatasetFormat dataset_format_from_string(const std::string& name);
std::string to_string(DatasetFormat format);

struct LoadReport {
  int users = 0;
  int items = 0;
  std::size_t interactions = 0;
  std::size_t duplicates_dropped = 0;

  std::string to_json() const;
};

struct LoadResult {
  InteractionStore store;
  LoadReport report;
  // Dense id -> raw id. Re-indexing is a bijection over the ids seen.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
};

// Reads a delimited interaction file and re-indexes raw ids densely from 0
// in order of first appearance. movielens-delimited is headerless
// user<sep>item<sep>value[<sep>...] with a configurable separator
// (default "::"); csv is comma-separated with a header line and at least
// user,item,value columns. Later duplicates of a (user, item) pair replace
// earlier ones and are counted in the report.
LoadResult load_dataset(const std::filesystem::path& path, DatasetFormat format,
                        const std::string& separator = "::");

// Per-user random partition: each profile is shuffled by a per-user
// substream of `seed` and the first floor(ratio * size) records (at least
// one) go to train, the rest to test. Single-interaction users keep their
// record in train and contribute no test items.
SplitPair split(const InteractionStore& store, double ratio, std::uint64_t seed);

// FNV-1a hash of the file bytes, as 16 hex digits. Identifies the dataset
// in run manifests.
std::string dataset_fingerprint(const std::filesystem::path& path);

}  // namespace fairsim
