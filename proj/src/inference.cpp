#include "agebayes/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "agebayes/error.hpp"
#include "agebayes/stats.hpp"

namespace agebayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// p_k(state | x_j) for every indicator: [k][state * T + j].
std::vector<std::vector<double>> state_prob_tables(std::span<const IndicatorParams> theta,
                                                   const AgeGrid& grid) {
  const std::size_t T = grid.size();
  std::vector<std::vector<double>> tables(theta.size(), std::vector<double>(3 * T));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    for (std::size_t j = 0; j < T; ++j) {
      const auto p = state_probs(theta[k], grid[j]);
      for (std::size_t z = 0; z < 3; ++z) tables[k][z * T + j] = p[z];
    }
  }
  return tables;
}

std::vector<IndicatorParams> default_start(const ObservedTable& y, std::span<const IndicatorPrior> priors) {
  std::vector<IndicatorParams> theta;
  const double n = static_cast<double>(y.total());
  for (std::size_t k = 0; k < priors.size(); ++k) {
    IndicatorParams p = priors[k].center();
    double missing = 0.0;
    for (std::size_t i = 0; i < y.combinations(); ++i) {
      if (decode_combination(i, y.indicators)[k] == IndicatorState::Missing) missing += y.counts[i];
    }
    p.missing_at_20 = n > 0.0 ? missing / n : 0.0;
    theta.push_back(p);
  }
  return theta;
}

}  // namespace

ObservedTable ObservedTable::zeros(std::size_t indicators) {
  return {indicators, std::vector<std::int64_t>(combination_count(indicators), 0)};
}

std::int64_t ObservedTable::total() const {
  std::int64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::int64_t ObservedTable::at(IndicatorState teeth, IndicatorState knee) const {
  const std::array<IndicatorState, 2> s{teeth, knee};
  return counts.at(encode_combination(s));
}

std::int64_t& ObservedTable::at(IndicatorState teeth, IndicatorState knee) {
  const std::array<IndicatorState, 2> s{teeth, knee};
  return counts.at(encode_combination(s));
}

LatentCounts::LatentCounts(std::size_t combinations, std::size_t ages)
    : combinations_(combinations), ages_(ages), cells_(combinations * ages, 0) {}

std::int64_t LatentCounts::row_sum(std::size_t i) const {
  std::int64_t s = 0;
  for (auto c : row(i)) s += c;
  return s;
}

std::vector<double> LatentCounts::tau_prime(std::size_t k, std::size_t indicators) const {
  std::vector<double> out(3 * ages_, 0.0);
  for (std::size_t i = 0; i < combinations_; ++i) {
    const auto z = static_cast<std::size_t>(decode_combination(i, indicators)[k]);
    const auto r = row(i);
    for (std::size_t j = 0; j < ages_; ++j) out[z * ages_ + j] += static_cast<double>(r[j]);
  }
  return out;
}

std::vector<double> LatentCounts::tau_dblprime() const {
  std::vector<double> out(ages_, 0.0);
  for (std::size_t i = 0; i < combinations_; ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < ages_; ++j) out[j] += static_cast<double>(r[j]);
  }
  return out;
}

ProposalScale default_proposal_scale() { return {0.05, 0.05, 0.005, 0.0005}; }

void ChainConfig::validate(std::size_t indicators) const {
  if (cycles <= 0) throw UsageError("cycles must be positive");
  if (burn_in < 0 || burn_in >= cycles) throw UsageError("burn-in must satisfy 0 <= burn_in < cycles");
  if (thinning < 1) throw UsageError("thinning must be at least 1");
  if (adapt_window < 1) throw UsageError("adaptation window must be at least 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw UsageError("target acceptance must lie in (0, 1)");
  }
  if (priors.size() != indicators) throw UsageError("need one prior per indicator");
  for (const auto& p : priors) {
    if (!(p.location_sd > 0.0) || !(p.scale_sd > 0.0)) {
      throw UsageError("prior standard deviations must be positive (" + p.label + ")");
    }
  }
  if (!proposal_sds.empty() && proposal_sds.size() != indicators) {
    throw UsageError("need one proposal scale per indicator");
  }
  for (const auto& s : proposal_sds) {
    for (double v : s) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("proposal step sizes must be finite and >= 0");
    }
  }
  if (!(profile_prior.alpha > 0.0)) throw UsageError("profile prior alpha must be positive");
  if (profile_prior.grid.size() < 2) throw UsageError("age grid needs at least two points");
  if (initial_theta && initial_theta->size() != indicators) {
    throw UsageError("initial parameters need one entry per indicator");
  }
  if (initial_psi && initial_psi->weights.size() != profile_prior.grid.size()) {
    throw UsageError("initial profile length does not match the grid");
  }
}

double cell_prob(const ChainState& state, const AgeGrid& grid, std::size_t combination,
                 std::size_t age_index) {
  const auto states = decode_combination(combination, state.theta.size());
  return state.psi.weights[age_index] * prob_vector(state.theta, grid[age_index], states);
}

std::vector<double> cell_prob_table(std::span<const IndicatorParams> theta,
                                    const PopulationProfile& psi, const AgeGrid& grid) {
  const std::size_t T = grid.size();
  const std::size_t V = combination_count(theta.size());
  const auto tables = state_prob_tables(theta, grid);
  std::vector<double> r(V * T);
  for (std::size_t i = 0; i < V; ++i) {
    const auto states = decode_combination(i, theta.size());
    for (std::size_t j = 0; j < T; ++j) {
      double p = psi.weights[j];
      for (std::size_t k = 0; k < theta.size(); ++k) {
        p *= tables[k][static_cast<std::size_t>(states[k]) * T + j];
      }
      r[i * T + j] = p;
    }
  }
  return r;
}

LatentCounts sample_latent_counts(const ObservedTable& y, std::span<const IndicatorParams> theta,
                                  const PopulationProfile& psi, const AgeGrid& grid, Rng& rng) {
  if (theta.size() != y.indicators) throw UsageError("one parameter set per indicator required");
  const std::size_t T = grid.size();
  const std::size_t V = y.combinations();
  const auto r = cell_prob_table(theta, psi, grid);
  LatentCounts tau(V, T);
  for (std::size_t i = 0; i < V; ++i) {
    const std::int64_t n = y.counts[i];
    if (n == 0) continue;
    const std::span<const double> weights(r.data() + i * T, T);
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
      throw ModelError("combination " + std::to_string(i) +
                       " has positive count but zero probability at every age");
    }
    multinomial(rng, n, weights, tau.row(i));
  }
  return tau;
}

double indicator_loglik(const IndicatorParams& params, const AgeGrid& grid,
                        std::span<const double> tau_prime_k) {
  const std::size_t T = grid.size();
  double ll = 0.0;
  for (std::size_t j = 0; j < T; ++j) {
    const double c0 = tau_prime_k[j];
    const double c1 = tau_prime_k[T + j];
    const double c2 = tau_prime_k[2 * T + j];
    if (c0 == 0.0 && c1 == 0.0 && c2 == 0.0) continue;
    const auto p = state_probs(params, grid[j]);
    const double counts[3] = {c0, c1, c2};
    for (std::size_t z = 0; z < 3; ++z) {
      if (counts[z] == 0.0) continue;
      if (!(p[z] > 0.0)) return kNegInf;
      ll += counts[z] * std::log(p[z]);
    }
  }
  return ll;
}

ThetaUpdate mh_update_theta(const ChainState& state, const AgeGrid& grid,
                            std::span<const IndicatorPrior> priors,
                            std::span<const ProposalScale> proposal_sds, Rng& rng) {
  const std::size_t K = state.theta.size();
  ThetaUpdate out{state.theta, std::vector<bool>(K, false)};
  const AgeRange range = grid.range();
  for (std::size_t k = 0; k < K; ++k) {
    const auto current = state.theta[k].to_array();
    std::array<double, IndicatorParams::kDim> proposal{};
    for (std::size_t c = 0; c < proposal.size(); ++c) {
      proposal[c] = current[c] + proposal_sds[k][c] * rng.normal();
    }
    const double log_u = std::log(rng.uniform());
    const auto candidate = IndicatorParams::from_array(proposal);
    if (!is_valid(candidate, range)) continue;

    const auto tp = state.tau.tau_prime(k, K);
    const double cand_lp = prior_logdensity(priors[k], candidate) + indicator_loglik(candidate, grid, tp);
    if (!std::isfinite(cand_lp)) continue;
    const double cur_lp =
        prior_logdensity(priors[k], state.theta[k]) + indicator_loglik(state.theta[k], grid, tp);
    if (!std::isfinite(cur_lp) || log_u < cand_lp - cur_lp) {
      out.theta[k] = candidate;
      out.accepted[k] = true;
    }
  }
  return out;
}

PopulationProfile gibbs_update_psi(const LatentCounts& tau, const ProfilePrior& prior, Rng& rng) {
  auto conc = tau.tau_dblprime();
  const double a = prior.cell_concentration();
  for (double& c : conc) c += a;
  return {dirichlet(rng, conc)};
}

Sampler::Sampler(const ObservedTable& y, const ChainConfig& config)
    : y_(y), config_(config), rng_(config.seed) {
  const std::size_t K = y.indicators;
  if (y.counts.size() != combination_count(K)) throw DataError("observed table has wrong size");
  config_.validate(K);
  const AgeGrid& grid = config_.profile_prior.grid;

  base_sds_ = config_.proposal_sds.empty() ? std::vector<ProposalScale>(K, default_proposal_scale())
                                           : config_.proposal_sds;
  current_sds_ = base_sds_;
  log_scale_.assign(K, 0.0);
  window_accepts_.assign(K, 0);
  accepts_.assign(K, 0);
  last_accepted_.assign(K, false);
  sum_.assign(K, {});
  sum_sq_.assign(K, {});

  state_.theta = config_.initial_theta ? *config_.initial_theta : default_start(y_, config_.priors);
  for (const auto& p : state_.theta) require_valid(p, grid.range());
  state_.psi = config_.initial_psi ? *config_.initial_psi : PopulationProfile::uniform(grid.size());
  state_.tau = sample_latent_counts(y_, state_.theta, state_.psi, grid, rng_);
}

void Sampler::cycle() {
  const AgeGrid& grid = config_.profile_prior.grid;
  state_.tau = sample_latent_counts(y_, state_.theta, state_.psi, grid, rng_);
  auto update = mh_update_theta(state_, grid, config_.priors, current_sds_, rng_);
  state_.theta = std::move(update.theta);
  last_accepted_ = update.accepted;
  state_.psi = gibbs_update_psi(state_.tau, config_.profile_prior, rng_);
  ++cycle_;

  const std::size_t K = state_.theta.size();
  const bool in_burn_in = cycle_ <= config_.burn_in;
  for (std::size_t k = 0; k < K; ++k) {
    if (last_accepted_[k]) ++window_accepts_[k];
    if ((!in_burn_in || config_.burn_in == 0) && last_accepted_[k]) ++accepts_[k];
  }
  if (!in_burn_in || config_.burn_in == 0) ++counted_;
  if (config_.adapt && in_burn_in) {
    adapt();
  } else {
    std::fill(window_accepts_.begin(), window_accepts_.end(), 0);
  }
}

void Sampler::adapt() {
  const std::size_t K = state_.theta.size();
  const long half = config_.burn_in / 2;
  const long quarter = config_.burn_in / 4;
  const bool reshape = config_.burn_in >= 400;

  if (reshape && cycle_ > quarter && cycle_ <= half) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto a = state_.theta[k].to_array();
      for (std::size_t c = 0; c < a.size(); ++c) {
        sum_[k][c] += a[c];
        sum_sq_[k][c] += a[c] * a[c];
      }
    }
    ++moment_count_;
  }
  if (reshape && cycle_ == half && moment_count_ > 1) {
    // Match step shapes to the spread of each coordinate seen so far.
    const double n = static_cast<double>(moment_count_);
    for (std::size_t k = 0; k < K; ++k) {
      std::size_t active = 0;
      for (double s : base_sds_[k]) active += s > 0.0 ? 1 : 0;
      if (active == 0) continue;
      for (std::size_t c = 0; c < IndicatorParams::kDim; ++c) {
        if (base_sds_[k][c] <= 0.0) continue;
        const double m = sum_[k][c] / n;
        const double var = std::max(sum_sq_[k][c] / n - m * m, 0.0);
        if (var > 0.0) base_sds_[k][c] = std::sqrt(var) * 2.38 / std::sqrt(static_cast<double>(active));
      }
      log_scale_[k] = 0.0;
    }
    windows_since_reset_ = 0;
  }

  if (cycle_ % config_.adapt_window == 0) {
    // Decaying gain, so the frozen step is an average rather than the last noisy move.
    const double gain = 2.0 / std::sqrt(1.0 + 0.1 * static_cast<double>(windows_since_reset_++));
    for (std::size_t k = 0; k < K; ++k) {
      const double rate = static_cast<double>(window_accepts_[k]) / config_.adapt_window;
      log_scale_[k] += gain * (rate - config_.target_acceptance);
      window_accepts_[k] = 0;
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t c = 0; c < IndicatorParams::kDim; ++c) {
      current_sds_[k][c] = base_sds_[k][c] * std::exp(log_scale_[k]);
    }
  }
}

std::vector<double> Sampler::acceptance_rates() const {
  std::vector<double> out(accepts_.size(), 0.0);
  if (counted_ == 0) return out;
  for (std::size_t k = 0; k < accepts_.size(); ++k) {
    out[k] = static_cast<double>(accepts_[k]) / static_cast<double>(counted_);
  }
  return out;
}

ChainOutput run_chain(const ObservedTable& y, const ChainConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Sampler sampler(y, config);
  ChainOutput out;
  out.config = config;
  out.observed = y;
  for (long c = 1; c <= config.cycles; ++c) {
    sampler.cycle();
    if (c > config.burn_in && (c - config.burn_in) % config.thinning == 0) {
      const auto& s = sampler.state();
      ChainSample sample{c, s.theta, s.psi, {}};
      if (config.keep_tau) sample.tau.assign(s.tau.cells().begin(), s.tau.cells().end());
      out.samples.push_back(std::move(sample));
    }
  }
  out.acceptance_rates = sampler.acceptance_rates();
  out.final_proposal_sds = sampler.proposal_sds();
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<ChainOutput> run_chains(const ObservedTable& y, const ChainConfig& config, int chains,
                                    int jobs) {
  if (chains < 1) throw UsageError("need at least one chain");
  config.validate(y.indicators);
  std::vector<ChainConfig> configs;
  for (int c = 0; c < chains; ++c) {
    ChainConfig cc = config;
    if (c > 0) {
      Rng start_rng = Rng::derive(config.seed, 2 * static_cast<std::uint64_t>(c) + 1);
      cc.seed = Rng::derive(config.seed, 2 * static_cast<std::uint64_t>(c)).engine()();
      if (!cc.initial_theta) {
        auto theta = default_start(y, config.priors);
        for (std::size_t k = 0; k < theta.size(); ++k) {
          const auto& pr = config.priors[k];
          theta[k].location = pr.location_mean + pr.location_sd * start_rng.normal();
          do {
            theta[k].scale = pr.scale_mean + pr.scale_sd * start_rng.normal();
          } while (!(theta[k].scale > 0.0));
        }
        cc.initial_theta = theta;
      }
    }
    configs.push_back(std::move(cc));
  }

  std::vector<ChainOutput> outputs(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < configs.size();) {
      try {
        outputs[c] = run_chain(y, configs[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, chains);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

std::string indicator_name(std::size_t k, std::size_t indicators) {
  if (indicators == 2) return k == 0 ? "teeth" : "knee";
  return "indicator" + std::to_string(k + 1);
}

std::string coordinate_name(std::size_t c) {
  static const char* names[] = {"location", "scale", "missing_at_20", "missing_slope"};
  return names[c];
}

DiagnosticsReport diagnostics(std::span<const ChainOutput> outputs) {
  if (outputs.empty()) throw UsageError("diagnostics need at least one chain");
  DiagnosticsReport report;
  report.chains = outputs.size();
  const std::size_t K = outputs.front().observed.indicators;
  std::size_t n = outputs.front().samples.size();
  for (const auto& o : outputs) {
    n = std::min(n, o.samples.size());
    report.acceptance_rates.push_back(o.acceptance_rates);
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t c = 0; c < IndicatorParams::kDim; ++c) {
      ParameterSummary ps;
      ps.name = indicator_name(k, K) + "_" + coordinate_name(c);
      std::vector<double> within;
      for (const auto& o : outputs) {
        std::vector<double> trace;
        for (const auto& s : o.samples) trace.push_back(s.theta[k].to_array()[c]);
        if (trace.empty()) {
          ps.chain_means.push_back(NAN);
          ps.chain_lower.push_back(NAN);
          ps.chain_upper.push_back(NAN);
          continue;
        }
        ps.chain_means.push_back(mean(trace));
        ps.chain_lower.push_back(quantile(trace, 0.025));
        ps.chain_upper.push_back(quantile(trace, 0.975));
        trace.resize(n);
        within.push_back(n > 0 ? variance(trace) : 0.0);
      }
      if (outputs.size() >= 2 && n >= 2) {
        std::vector<double> means;
        for (const auto& o : outputs) {
          std::vector<double> trace;
          for (std::size_t i = 0; i < n; ++i) trace.push_back(o.samples[i].theta[k].to_array()[c]);
          means.push_back(mean(trace));
        }
        const double w = mean(within);
        const double b_over_n = variance(means);
        if (w > 0.0) {
          ps.scale_reduction = std::sqrt((w + b_over_n) / w);
        } else {
          ps.scale_reduction = b_over_n > 0.0 ? INFINITY : 1.0;
        }
      }
      report.parameters.push_back(std::move(ps));
    }
  }
  return report;
}

}  // namespace agebayes
