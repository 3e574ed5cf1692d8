#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairsim/rng.hpp"

namespace testsupport {

// Synthetic implicit-feedback dataset with the two properties the real
// MovieLens data supplies: a long-tailed item popularity distribution and
// a low-rank latent structure the factor model can learn.
struct SynthSpec {
  int users = 500;
  int items = 800;
  double zipf_exponent = 1.0;     // item popularity skew
  double affinity_strength = 3.0; // weight of the latent user-item match
  int latent_dim = 8;
  int min_profile = 20;
  int max_profile = 120;
  double mean_profile = 50.0;
  std::uint64_t seed = 7;
};

inline void write_synthetic_dataset(const std::filesystem::path& path,
                                    const SynthSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto gauss = [&rng]() {
    // Box-Muller on the portable uniform helper.
    const double u1 = std::max(fairsim::uniform_unit(rng), 1e-12);
    const double u2 = fairsim::uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  const int d = spec.latent_dim;
  std::vector<double> user_latent(static_cast<std::size_t>(spec.users) * d);
  std::vector<double> item_latent(static_cast<std::size_t>(spec.items) * d);
  for (double& x : user_latent) x = gauss() / std::sqrt(static_cast<double>(d));
  for (double& x : item_latent) x = gauss() / std::sqrt(static_cast<double>(d));

  std::vector<double> popularity(spec.items);
  for (int i = 0; i < spec.items; ++i) {
    popularity[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_exponent);
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write synthetic dataset: " + path.string());

  std::vector<double> weight(spec.items);
  std::vector<std::uint8_t> taken(spec.items);
  const double log_mean = std::log(spec.mean_profile);
  for (int u = 0; u < spec.users; ++u) {
    const double size_draw = std::exp(log_mean + 0.5 * gauss());
    const int profile_size = std::clamp(static_cast<int>(std::lround(size_draw)),
                                        spec.min_profile, spec.max_profile);

    const double* zu = user_latent.data() + static_cast<std::size_t>(u) * d;
    double weight_total = 0.0;
    for (int i = 0; i < spec.items; ++i) {
      const double* wi = item_latent.data() + static_cast<std::size_t>(i) * d;
      double dot = 0.0;
      for (int f = 0; f < d; ++f) dot += zu[f] * wi[f];
      weight[i] = popularity[i] * std::exp(spec.affinity_strength * dot);
      weight_total += weight[i];
      taken[i] = 0;
    }

    for (int pick = 0; pick < profile_size; ++pick) {
      double mark = fairsim::uniform_unit(rng) * weight_total;
      int chosen = -1;
      for (int i = 0; i < spec.items; ++i) {
        if (taken[i]) continue;
        mark -= weight[i];
        if (mark <= 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) {  // numeric tail: take the last free item
        for (int i = spec.items - 1; i >= 0; --i) {
          if (!taken[i]) {
            chosen = i;
            break;
          }
        }
      }
      taken[chosen] = 1;
      weight_total -= weight[chosen];
      const int rating = 1 + static_cast<int>(fairsim::uniform_below(rng, 5));
      out << (u + 1) << "::" << (chosen + 1) << "::" << rating << "::0\n";
    }
  }
  if (!out) throw std::runtime_error("short write to synthetic dataset");
}

}  // namespace testsupport
