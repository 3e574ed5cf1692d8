#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "fairsim/dataset.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

struct MfHyperparams {
  int factors = 16;
  double learning_rate = 0.05;
  double regularization = 0.02;
  int epochs = 20;
  int negatives_per_positive = 4;
  std::uint64_t seed = 0;
};

// Biased matrix-factorization model: score(u, i) = global_bias +
// user_bias[u] + item_bias[i] + <user_factors[u], item_factors[i]>.
struct FactorModel {
  int user_count = 0;
  int item_count = 0;
  int factors = 0;
  std::vector<double> user_factors;  // row-major user_count x factors
  std::vector<double> item_factors;  // row-major item_count x factors
  std::vector<double> user_bias;
  std::vector<double> item_bias;
  double global_bias = 0.0;

  double score(int user, int item) const;

  // Flat binary checkpoint with a shape header.
  void save(const std::filesystem::path& path) const;
  static FactorModel load(const std::filesystem::path& path);
};

class TrainingDivergedError : public std::runtime_error {
 public:
  explicit TrainingDivergedError(int epoch);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean squared error over the sampled objective
  int monotonicity_violations = 0;
};

// Loss increases beyond this tolerance count as monotonicity violations.
inline constexpr double kLossMonotonicityTolerance = 1e-6;
// Learning rates at or below this are expected to train monotonically;
// violations are reported by the caller, never fatal.
inline constexpr double kStableLearningRateCeiling = 0.1;

// Pointwise squared-loss SGD over binarized interactions (target 1) with
// uniformly sampled unobserved negatives (target 0). Deterministic for a
// given store and seed. Throws TrainingDivergedError when any parameter
// goes non-finite.
FactorModel train(const InteractionStore& train_store, const MfHyperparams& hp,
                  const FactorModel* warm_start = nullptr, TrainStats* stats = nullptr);

// Top-`list_length` items per user by model score, excluding each user's
// current full profile. Ties broken by ascending item id; lists may be
// shorter than requested when candidates run out.
RankedLists long_lists(const FactorModel& model, const InteractionStore& full_store,
                       int list_length);

}  // namespace fairsim
