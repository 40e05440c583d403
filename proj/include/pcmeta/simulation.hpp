#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcmeta/kernels.hpp"
#include "pcmeta/prob_value.hpp"

namespace pcmeta {

// Power study for the PC null H_0^{r/n}: study i reports the two-sided
// p-value of Z_i ~ N(sqrt(N_i) mu_i, 1), with mu_i = 0 for null studies and
// mu_i ~ Gamma(mean mu0, sd sigma0) i.i.d. for the r0 non-null ones.

enum class SimMethod { fisher_bhpc, simes_bhpc, stouffer_gbhpc };

std::string_view to_string(SimMethod m);
SimMethod parse_sim_method(std::string_view name);

struct SimConfig {
  std::size_t r = 2;
  std::vector<double> sample_sizes{100, 100, 100, 500, 500, 500, 1000, 1000};
  std::vector<std::size_t> r0_values{2, 4, 6};
  std::vector<double> mu0_grid;     // defaults to 10 points over [0.02, 0.4]
  std::vector<double> sigma0_grid;  // defaults to 10 points over [0.01, 0.4]
  double alpha = 0.05;
  std::uint64_t reps = 20000;
  std::uint64_t seed = 20240601;
  std::vector<SimMethod> methods{SimMethod::fisher_bhpc, SimMethod::simes_bhpc, SimMethod::stouffer_gbhpc};
  unsigned threads = 0;
  /// Pins which studies are non-null: the first r0 entries are used. When
  /// absent, a uniformly random subset of size r0 is drawn per replicate.
  std::optional<std::vector<std::size_t>> fixed_nonnull;
  kernels::SimdLevel simd = kernels::active_level();

  static SimConfig defaults();
  /// Reads a JSON document; absent keys keep their defaults.
  static SimConfig from_json(std::string_view text);
  [[nodiscard]] std::string to_json() const;

  [[nodiscard]] std::size_t n() const { return sample_sizes.size(); }
  void validate() const;
};

/// Gamma shape and rate for mean mu0 and standard deviation sigma0.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};
GammaParams gamma_from_moments(double mu0, double sigma0);

/// One replicate of study p-values with r0 non-null studies.
std::vector<ProbValue> draw_study_pvalues(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0,
                                          std::mt19937_64& rng);

/// PC p-value of `method` for H_0^{r/n} on one replicate.
ProbValue sim_method_pvalue(const SimConfig& cfg, SimMethod method, std::span<const ProbValue> p);

struct PowerEntry {
  double mu0 = 0, sigma0 = 0;
  SimMethod method = SimMethod::fisher_bhpc;
  std::size_t r0 = 0;
  double power = 0, se = 0;
};

struct PowerGrid {
  std::vector<double> mu0_axis;
  std::vector<double> sigma0_axis;
  std::vector<PowerEntry> entries;  // ordered by (r0, mu0, sigma0, method)

  [[nodiscard]] const PowerEntry& at(std::size_t r0, double mu0, double sigma0, SimMethod m) const;
};

/// Replicates are split into fixed-size blocks; block b of cell c draws from
/// the stream keyed (seed, c, b), so results do not depend on threads.
PowerGrid run_power_map(const SimConfig& cfg);

/// Power at a single (r0, mu0, sigma0) cell for every configured method.
std::vector<PowerEntry> run_power_cell(const SimConfig& cfg, std::size_t r0, double mu0, double sigma0,
                                       std::uint64_t cell_key);

/// sqrt(se_a^2 + se_b^2).
double joint_se(const PowerEntry& a, const PowerEntry& b);

}  // namespace pcmeta
