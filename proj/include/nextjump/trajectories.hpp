#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nextjump/model.hpp"
#include "nextjump/propagator.hpp"

namespace nextjump {

// ---- reproducible RNG plumbing ------------------------------------------
//
// Streams: record i of an ensemble with master seed m uses
// mt19937_64(derive_stream_seed(m, i)), so parallel and serial runs produce
// identical records. Uniform deviates are built directly from the raw 64-bit
// output as u = ((x >> 11) + 0.5) * 2^-53, strictly inside (0,1); no
// distribution object is involved, so results are identical across standard
// library implementations.

// SplitMix64 finalizer over master + (index+1)*golden-gamma.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

inline double u01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// ---- photon records -------------------------------------------------------

enum class Channel { Bright, Dark };  // |1>->|0> vs |2>->|0>

const char* to_string(Channel ch);

struct PhotonEvent {
    double time = 0.0;  // absolute time within the record, s
    Channel channel = Channel::Bright;
};

struct PhotonRecord {
    std::vector<PhotonEvent> events;  // strictly increasing times in (0, horizon]
    double horizon = 0.0;
    std::uint64_t seed = 0;
    // Open interval between the last event (or 0) and the horizon.
    double censored_length = 0.0;
};

// ---- waiting-time inversion ----------------------------------------------

struct SamplerOptions {
    double dt_tau = kDefaultStepTau;  // integrator step as dt * beta1
    double tol_wt = 1e-6;             // |W(t_jump) - u| tolerance, probability
    int bisect_iters = 20;
    int checkpoint_stride = 64;       // steps between stored table states
};

// Inverts the survival function W(t) of the no-jump waiting time from a fixed
// start state (the reset state, for records): integrate forward at dt,
// bracket the W = u crossing, then bisect inside the bracketing step.
//
// The forward scan is computed once and cached as checkpoints every
// `checkpoint_stride` steps; draws re-integrate locally from a checkpoint, so
// the result is bit-identical to a straight scan. prepare() must be called
// before draw(); afterwards the sampler is immutable and safe to share across
// threads.
class WaitingTimeSampler {
  public:
    WaitingTimeSampler(const SystemParams& p, AmplitudeState start,
                       SamplerOptions opts = {});

    explicit WaitingTimeSampler(const SystemParams& p, SamplerOptions opts = {})
        : WaitingTimeSampler(p, reset_state(), opts) {}

    // Extend the cached scan to cover times up to `horizon` (or until W falls
    // below any reachable deviate, whichever comes first).
    void prepare(double horizon);

    struct Draw {
        bool jumped = false;
        double t = 0.0;            // time since the start state
        AmplitudeState state;      // amplitudes at the jump time
    };

    // Smallest t with W(t) = u, or a censored outcome when that t exceeds
    // max_t. Requires prepare(max_t) to have been called.
    Draw draw(double u, double max_t) const;

    // Tabulated survival at time t (re-integrated from the nearest
    // checkpoint; exact to the integrator's accuracy). t must be covered.
    double survival_at(double t) const;

    double dt() const { return dt_; }

  private:
    void extend_steps(long target_steps);

    SystemParams params_;
    Generator gen_;
    double dt_ = 0.0;
    SamplerOptions opts_;
    std::vector<AmplitudeState> checkpoints_;  // state at step i*stride
    std::vector<double> checkpoint_w_;
    AmplitudeState tail_;  // state at step n_steps_
    long n_steps_ = 0;
    long prepared_steps_ = 0;
    bool stationary_ = false;  // W no longer changes (e.g. no drive at all)
};

struct WaitingTimeResult {
    bool jumped = false;
    double t_jump = 0.0;
    AmplitudeState state_at_jump;
};

// One-shot form: waiting time from a conditioned state (survival(state0) must
// be 1 to within 1e-6). Horizon exhaustion is an outcome, not an error.
WaitingTimeResult sample_waiting_time(const AmplitudeState& state0,
                                      const SystemParams& p, double u,
                                      double max_horizon,
                                      SamplerOptions opts = {});

// Bright with probability beta1 c1^2 / (beta1 c1^2 + beta2 c2^2), else Dark.
// Throws SamplingError when both rates vanish at the jump state.
Channel select_channel(const AmplitudeState& at_jump, const SystemParams& p,
                       double u2);

// Jump-and-reset renewal cycle until the horizon. Deterministic per
// (params, horizon, seed). `shared` may point to a prepared sampler for the
// same params/options to avoid rebuilding the scan per record.
PhotonRecord simulate_record(const SystemParams& p, double horizon,
                             std::uint64_t seed, SamplerOptions opts = {},
                             const WaitingTimeSampler* shared = nullptr);

// n_records independent records with per-record streams derived from
// (master_seed, index). Aggregates are identical for any n_threads.
std::vector<PhotonRecord> simulate_ensemble(const SystemParams& p,
                                            int n_records, double horizon,
                                            std::uint64_t master_seed,
                                            int n_threads = 1,
                                            SamplerOptions opts = {});

// ---- interval statistics ---------------------------------------------------

struct DarkStatsOptions {
    int n_bins = 48;
    bool include_censored = false;  // count open intervals in the fractions
};

struct DarkStats {
    std::size_t n_intervals = 0;
    std::size_t n_censored = 0;
    // Log-spaced interval histogram with terminal-channel counts per bin.
    std::vector<double> bin_edges;  // n_bins + 1
    std::vector<std::size_t> bin_counts;
    std::vector<std::size_t> bin_bright;
    std::vector<std::size_t> bin_dark;

    double t0_prime = 0.0;
    double t3_threshold = 0.0;

    std::size_t n_dark = 0;       // intervals > t0_prime
    std::size_t n_extralong = 0;  // intervals > t3_threshold
    double fraction_dark = 0.0, se_dark = 0.0;
    double fraction_extralong = 0.0, se_extralong = 0.0;

    // Terminal channel counts per interval class.
    std::size_t bright_all = 0, dark_all = 0;
    std::size_t bright_dark_class = 0, dark_dark_class = 0;
    std::size_t bright_extralong = 0, dark_extralong = 0;
};

// Aggregates inter-jump intervals (gaps between consecutive events plus the
// initial gap from 0) across records, in record-index order. Throws
// SamplingError when no record contributes a complete interval.
DarkStats dark_stats(const std::vector<PhotonRecord>& records,
                     const SystemParams& p, double t0_prime,
                     double t3_threshold, DarkStatsOptions opts = {});

// Default extra-long threshold 1/|lambda3| = 2/(eta^2 beta1); +inf when the
// dark drive is off.
double default_t3_threshold(const SystemParams& p);

}  // namespace nextjump
