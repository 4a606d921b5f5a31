#ifndef AGEBAYES_INFERENCE_HPP
#define AGEBAYES_INFERENCE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agebayes/indicator_model.hpp"
#include "agebayes/population.hpp"
#include "agebayes/random.hpp"

namespace agebayes {

/// Counts per combination of indicator states (see encode_combination).
struct ObservedTable {
  std::size_t indicators = 2;
  std::vector<std::int64_t> counts;

  static ObservedTable zeros(std::size_t indicators);
  std::int64_t total() const;
  std::size_t combinations() const { return counts.size(); }
  /// Two-indicator accessor (teeth = indicator 0, knee = indicator 1).
  std::int64_t at(IndicatorState teeth, IndicatorState knee) const;
  std::int64_t& at(IndicatorState teeth, IndicatorState knee);
  bool operator==(const ObservedTable&) const = default;
};

/// Persons per (combination, grid age) cell.
class LatentCounts {
 public:
  LatentCounts() = default;
  LatentCounts(std::size_t combinations, std::size_t ages);

  std::size_t combinations() const { return combinations_; }
  std::size_t ages() const { return ages_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return cells_[i * ages_ + j]; }
  std::int64_t& operator()(std::size_t i, std::size_t j) { return cells_[i * ages_ + j]; }
  std::span<std::int64_t> row(std::size_t i) { return {cells_.data() + i * ages_, ages_}; }
  std::span<const std::int64_t> row(std::size_t i) const { return {cells_.data() + i * ages_, ages_}; }
  std::span<const std::int64_t> cells() const { return cells_; }

  std::int64_t row_sum(std::size_t i) const;
  /// Marginal of indicator k: entry [state * T + j] sums the cells whose
  /// combination has indicator k in `state`, at age j.
  std::vector<double> tau_prime(std::size_t k, std::size_t indicators) const;
  /// Total persons per grid age.
  std::vector<double> tau_dblprime() const;

  bool operator==(const LatentCounts&) const = default;

 private:
  std::size_t combinations_ = 0;
  std::size_t ages_ = 0;
  std::vector<std::int64_t> cells_;
};

struct ChainState {
  std::vector<IndicatorParams> theta;
  PopulationProfile psi;
  LatentCounts tau;
};

/// Random-walk standard deviations for the four coordinates of one
/// indicator. A zero entry holds that coordinate fixed.
using ProposalScale = std::array<double, IndicatorParams::kDim>;

ProposalScale default_proposal_scale();

struct ChainConfig {
  long cycles = 100000;
  long burn_in = 20000;
  long thinning = 100;
  std::vector<ProposalScale> proposal_sds;  // one per indicator; empty means defaults
  bool adapt = true;                        // tune step sizes during burn-in only
  double target_acceptance = 0.15;
  long adapt_window = 100;
  std::uint64_t seed = 1;
  std::vector<IndicatorPrior> priors;       // one per indicator
  ProfilePrior profile_prior;
  bool keep_tau = false;
  /// Starting parameters; defaults to the prior centers with missingness set
  /// to the observed missing fraction of each indicator.
  std::optional<std::vector<IndicatorParams>> initial_theta;
  std::optional<PopulationProfile> initial_psi;

  /// Throws UsageError when inconsistent.
  void validate(std::size_t indicators) const;
};

/// Joint probability r(v_i, x_j) = psi_j * p(v_i | x_j, theta).
double cell_prob(const ChainState& state, const AgeGrid& grid, std::size_t combination,
                 std::size_t age_index);

/// All r(v_i, x_j) in row-major order (combination, age).
std::vector<double> cell_prob_table(std::span<const IndicatorParams> theta,
                                    const PopulationProfile& psi, const AgeGrid& grid);

/// Exact conditional draw of the latent counts: one multinomial per observed
/// combination over the grid ages. Throws ModelError when a combination with
/// positive count has zero probability at every age.
LatentCounts sample_latent_counts(const ObservedTable& y, std::span<const IndicatorParams> theta,
                                  const PopulationProfile& psi, const AgeGrid& grid, Rng& rng);

/// Log-likelihood of one indicator's parameters given its latent marginal.
double indicator_loglik(const IndicatorParams& params, const AgeGrid& grid,
                        std::span<const double> tau_prime_k);

struct ThetaUpdate {
  std::vector<IndicatorParams> theta;
  std::vector<bool> accepted;
};

/// One random-walk Metropolis step per indicator, all four coordinates
/// proposed jointly. Proposals with scale <= 0 or a missingness line leaving
/// [0, 1] on the grid are rejected.
ThetaUpdate mh_update_theta(const ChainState& state, const AgeGrid& grid,
                            std::span<const IndicatorPrior> priors,
                            std::span<const ProposalScale> proposal_sds, Rng& rng);

/// psi | tau ~ Dirichlet(tau''(x_j) + alpha / T).
PopulationProfile gibbs_update_psi(const LatentCounts& tau, const ProfilePrior& prior, Rng& rng);

/// One retained draw.
struct ChainSample {
  long cycle = 0;
  std::vector<IndicatorParams> theta;
  PopulationProfile psi;
  std::vector<std::int64_t> tau;  // row-major, only when keep_tau
};

struct ChainOutput {
  ChainConfig config;
  ObservedTable observed;
  std::vector<ChainSample> samples;
  std::vector<double> acceptance_rates;        // per indicator, after burn-in
  std::vector<ProposalScale> final_proposal_sds;
  double wall_seconds = 0.0;
};

/// Cycle-by-cycle driver: latent counts, then each indicator's parameters,
/// then the population profile.
class Sampler {
 public:
  Sampler(const ObservedTable& y, const ChainConfig& config);

  void cycle();
  long cycles_done() const { return cycle_; }
  const ChainState& state() const { return state_; }
  const std::vector<bool>& last_accepted() const { return last_accepted_; }
  const std::vector<ProposalScale>& proposal_sds() const { return current_sds_; }
  std::vector<double> acceptance_rates() const;

 private:
  void adapt();

  ObservedTable y_;
  ChainConfig config_;
  Rng rng_;
  ChainState state_;
  long cycle_ = 0;
  std::vector<ProposalScale> base_sds_;
  std::vector<ProposalScale> current_sds_;
  std::vector<double> log_scale_;
  std::vector<long> window_accepts_;
  std::vector<long> accepts_;
  long counted_ = 0;
  std::vector<bool> last_accepted_;
  // Running moments of theta over the second quarter of burn-in.
  std::vector<std::array<double, IndicatorParams::kDim>> sum_;
  std::vector<std::array<double, IndicatorParams::kDim>> sum_sq_;
  long moment_count_ = 0;
  long windows_since_reset_ = 0;
};

ChainOutput run_chain(const ObservedTable& y, const ChainConfig& config);

/// Independent chains with seeds derived from config.seed; chains after the
/// first start from parameters drawn from the priors. Runs up to `jobs`
/// chains concurrently; results do not depend on `jobs`.
std::vector<ChainOutput> run_chains(const ObservedTable& y, const ChainConfig& config, int chains,
                                    int jobs);

std::string indicator_name(std::size_t k, std::size_t indicators);
std::string coordinate_name(std::size_t c);

struct ParameterSummary {
  std::string name;
  std::vector<double> chain_means;
  std::vector<double> chain_lower;   // 2.5% quantile
  std::vector<double> chain_upper;   // 97.5% quantile
  std::optional<double> scale_reduction;  // only with >= 2 chains
};

struct DiagnosticsReport {
  std::size_t chains = 0;
  std::vector<ParameterSummary> parameters;
  std::vector<std::vector<double>> acceptance_rates;  // [chain][indicator]
};

/// Per-chain summaries of every theta coordinate plus a between/within
/// variance ratio sqrt((W + B/n) / W) when there are several chains.
DiagnosticsReport diagnostics(std::span<const ChainOutput> outputs);

}  // namespace agebayes

#endif
