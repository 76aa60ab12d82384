#include "nextjump/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace nextjump {

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

const char* to_string(Channel ch) {
    return ch == Channel::Bright ? "bright" : "dark";
}

namespace {

// Smallest uniform deviate u01 can produce is 0.5 * 2^-53 ~ 5.6e-17; once W
// is below this floor every draw crosses inside the table.
constexpr double kWFloor = 1e-18;

}  // namespace

WaitingTimeSampler::WaitingTimeSampler(const SystemParams& p,
                                       AmplitudeState start, SamplerOptions opts)
    : params_(p), gen_(build_generator(p)), opts_(opts) {
    validate(p);
    if (opts_.dt_tau <= 0.0 || opts_.dt_tau > kMaxStepTau) {
        throw StepSizeError("WaitingTimeSampler: dt_tau outside (0, 0.1]");
    }
    if (opts_.checkpoint_stride < 1) {
        throw SamplingError("WaitingTimeSampler: checkpoint_stride must be >= 1");
    }
    dt_ = opts_.dt_tau / p.beta1;
    start.t = 0.0;
    checkpoints_.push_back(start);
    checkpoint_w_.push_back(survival(start));
    tail_ = start;
}

// Extends the scan in whole checkpoint blocks so checkpoint i is always the
// state at step i*stride and the last checkpoint equals the tail. Stops at
// block boundaries once W is below any reachable deviate or the state stopped
// moving (no drive: the reset state is an exact fixed point of the step map).
void WaitingTimeSampler::extend_steps(long target_steps) {
    while (n_steps_ < target_steps && !stationary_ &&
           survival(tail_) > kWFloor) {
        for (int j = 0; j < opts_.checkpoint_stride; ++j) {
            const AmplitudeState before = tail_;
            tail_ = rk4_step(tail_, gen_, dt_).state;
            ++n_steps_;
            if (before.c0 == tail_.c0 && before.c1 == tail_.c1 &&
                before.c2 == tail_.c2) {
                stationary_ = true;
            }
        }
        checkpoints_.push_back(tail_);
        checkpoint_w_.push_back(survival(tail_));
    }
}

void WaitingTimeSampler::prepare(double horizon) {
    if (horizon < 0.0) horizon = 0.0;
    const long target =
        static_cast<long>(std::ceil(horizon / dt_)) + opts_.checkpoint_stride;
    extend_steps(target);
    prepared_steps_ = std::max(prepared_steps_, target);
}

WaitingTimeSampler::Draw WaitingTimeSampler::draw(double u, double max_t) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw SamplingError("WaitingTimeSampler::draw: u must be in (0, 1)");
    }
    if (static_cast<long>(std::ceil(max_t / dt_)) > prepared_steps_) {
        throw SamplingError(
            "WaitingTimeSampler::draw: prepare() did not cover max_t");
    }
    if (u >= checkpoint_w_.front()) {
        throw SamplingError("WaitingTimeSampler::draw: start state has W < u");
    }

    // First checkpoint with W < u; the crossing lies in the preceding block.
    const auto it =
        std::partition_point(checkpoint_w_.begin(), checkpoint_w_.end(),
                             [u](double w) { return w >= u; });
    if (it == checkpoint_w_.end()) {
        // W never dropped below u inside the table. The table ends either
        // because W went stationary / under the deviate floor (no crossing,
        // ever) or past the prepared horizon; censored either way.
        if (!stationary_ && survival(tail_) > kWFloor &&
            n_steps_ < prepared_steps_) {
            throw SamplingError("WaitingTimeSampler::draw: table underrun");
        }
        return {};
    }

    const auto block = static_cast<std::size_t>(it - checkpoint_w_.begin());
    AmplitudeState s = checkpoints_[block - 1];
    long step = static_cast<long>(block - 1) * opts_.checkpoint_stride;

    // Re-integrate to the bracketing dt step (same op sequence as the scan).
    AmplitudeState next;
    for (int j = 0;; ++j) {
        if (j >= opts_.checkpoint_stride) {
            throw SamplingError("WaitingTimeSampler::draw: bracket not found");
        }
        next = rk4_step(s, gen_, dt_).state;
        ++step;
        if (survival(next) < u) break;
        s = next;
    }
    const double t_lo = static_cast<double>(step - 1) * dt_;
    if (t_lo >= max_t) return {};

    // Bisect W(t_lo + h) = u over h in (0, dt] with single RK4 substeps from
    // the bracket start state.
    double lo = 0.0, hi = dt_;
    for (int i = 0; i < opts_.bisect_iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (survival(rk4_step(s, gen_, mid).state) >= u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double h = 0.5 * (lo + hi);
    AmplitudeState out = rk4_step(s, gen_, h).state;
    const double t_jump = t_lo + h;
    if (t_jump > max_t) return {};
    out.t = t_jump;
    return {true, t_jump, out};
}

double WaitingTimeSampler::survival_at(double t) const {
    if (t < 0.0) throw SamplingError("survival_at: negative time");
    const long step = static_cast<long>(std::floor(t / dt_));
    if (step > n_steps_) {
        if (stationary_ || survival(tail_) <= kWFloor) {
            return survival(tail_);  // W no longer changes past the tail
        }
        throw SamplingError("survival_at: time not covered; call prepare()");
    }
    const auto block = static_cast<std::size_t>(step / opts_.checkpoint_stride);
    AmplitudeState s = checkpoints_[std::min(block, checkpoints_.size() - 1)];
    long at = static_cast<long>(std::min(block, checkpoints_.size() - 1)) *
              opts_.checkpoint_stride;
    while (at < step) {
        s = rk4_step(s, gen_, dt_).state;
        ++at;
    }
    const double rem = t - static_cast<double>(at) * dt_;
    if (rem > 0.0) {
        s = rk4_step(s, gen_, std::min(rem, dt_)).state;
    }
    return survival(s);
}

WaitingTimeResult sample_waiting_time(const AmplitudeState& state0,
                                      const SystemParams& p, double u,
                                      double max_horizon, SamplerOptions opts) {
    if (std::abs(survival(state0) - 1.0) > 1e-6) {
        throw SamplingError(
            "sample_waiting_time: state0 must be conditioned (W = 1)");
    }
    WaitingTimeSampler sampler(p, state0, opts);
    sampler.prepare(max_horizon);
    const auto d = sampler.draw(u, max_horizon);
    WaitingTimeResult r;
    r.jumped = d.jumped;
    r.t_jump = d.t;
    r.state_at_jump = d.state;
    if (r.jumped) r.state_at_jump.t = state0.t + d.t;
    return r;
}

Channel select_channel(const AmplitudeState& at_jump, const SystemParams& p,
                       double u2) {
    const auto [r1, r2] = emission_rates(at_jump, p);
    const double total = r1 + r2;
    if (!(total > 0.0)) {
        throw SamplingError(
            "select_channel: zero emission rate at the jump state (waiting-"
            "time solver bug?)");
    }
    return (u2 < r1 / total) ? Channel::Bright : Channel::Dark;
}

PhotonRecord simulate_record(const SystemParams& p, double horizon,
                             std::uint64_t seed, SamplerOptions opts,
                             const WaitingTimeSampler* shared) {
    if (!(horizon > 0.0)) {
        throw SamplingError("simulate_record: horizon must be positive");
    }
    WaitingTimeSampler own(p, opts);
    const WaitingTimeSampler* sampler = shared;
    if (sampler == nullptr) {
        own.prepare(horizon);
        sampler = &own;
    }

    PhotonRecord rec;
    rec.horizon = horizon;
    rec.seed = seed;
    std::mt19937_64 rng(seed);
    double t_acc = 0.0;
    while (true) {
        const double remaining = horizon - t_acc;
        if (remaining <= 0.0) break;
        const double u = u01(rng);
        const auto d = sampler->draw(u, remaining);
        if (!d.jumped) {
            rec.censored_length = remaining;
            break;
        }
        const double u2 = u01(rng);
        const Channel ch = select_channel(d.state, p, u2);
        t_acc += d.t;
        rec.events.push_back({t_acc, ch});
    }
    return rec;
}

std::vector<PhotonRecord> simulate_ensemble(const SystemParams& p,
                                            int n_records, double horizon,
                                            std::uint64_t master_seed,
                                            int n_threads, SamplerOptions opts) {
    if (n_records < 0) {
        throw SamplingError("simulate_ensemble: n_records must be >= 0");
    }
    WaitingTimeSampler sampler(p, opts);
    sampler.prepare(horizon);

    std::vector<PhotonRecord> out(static_cast<std::size_t>(n_records));
    const int workers =
        std::max(1, std::min(n_threads, n_records > 0 ? n_records : 1));

    std::atomic<int> next{0};
    auto work = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n_records) break;
            out[static_cast<std::size_t>(i)] = simulate_record(
                p, horizon, derive_stream_seed(master_seed, static_cast<std::uint64_t>(i)),
                opts, &sampler);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

DarkStats dark_stats(const std::vector<PhotonRecord>& records,
                     const SystemParams& p, double t0_prime,
                     double t3_threshold, DarkStatsOptions opts) {
    validate(p);
    if (opts.n_bins < 1) {
        throw SamplingError("dark_stats: n_bins must be >= 1");
    }

    struct Interval {
        double len;
        Channel ch;
    };
    std::vector<Interval> intervals;
    std::size_t n_censored = 0;
    std::vector<double> censored_lengths;
    for (const PhotonRecord& rec : records) {
        double prev = 0.0;
        for (const PhotonEvent& ev : rec.events) {
            intervals.push_back({ev.time - prev, ev.channel});
            prev = ev.time;
        }
        if (rec.censored_length > 0.0) {
            ++n_censored;
            censored_lengths.push_back(rec.censored_length);
        }
    }
    if (intervals.empty()) {
        throw SamplingError("dark_stats: no complete intervals in input");
    }

    DarkStats st;
    st.n_intervals = intervals.size();
    st.n_censored = n_censored;
    st.t0_prime = t0_prime;
    st.t3_threshold = t3_threshold;

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const Interval& iv : intervals) {
        lo = std::min(lo, iv.len);
        hi = std::max(hi, iv.len);
    }
    if (!(hi > lo)) {
        lo *= 0.5;
        hi = std::max(hi * 2.0, lo * 4.0);
    }
    lo *= 1.0 - 1e-12;
    hi *= 1.0 + 1e-12;
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / opts.n_bins;
    st.bin_edges.resize(static_cast<std::size_t>(opts.n_bins) + 1);
    for (int i = 0; i <= opts.n_bins; ++i) {
        st.bin_edges[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
    }
    st.bin_counts.assign(static_cast<std::size_t>(opts.n_bins), 0);
    st.bin_bright.assign(static_cast<std::size_t>(opts.n_bins), 0);
    st.bin_dark.assign(static_cast<std::size_t>(opts.n_bins), 0);

    for (const Interval& iv : intervals) {
        int b = static_cast<int>((std::log(iv.len) - log_lo) / step);
        b = std::clamp(b, 0, opts.n_bins - 1);
        const auto bi = static_cast<std::size_t>(b);
        ++st.bin_counts[bi];
        if (iv.ch == Channel::Bright) {
            ++st.bin_bright[bi];
            ++st.bright_all;
        } else {
            ++st.bin_dark[bi];
            ++st.dark_all;
        }
        if (iv.len > t0_prime) {
            ++st.n_dark;
            (iv.ch == Channel::Bright ? st.bright_dark_class : st.dark_dark_class)++;
        }
        if (iv.len > t3_threshold) {
            ++st.n_extralong;
            (iv.ch == Channel::Bright ? st.bright_extralong : st.dark_extralong)++;
        }
    }

    std::size_t n_total = st.n_intervals;
    std::size_t n_dark = st.n_dark;
    std::size_t n_extra = st.n_extralong;
    if (opts.include_censored) {
        n_total += n_censored;
        for (const double len : censored_lengths) {
            if (len > t0_prime) ++n_dark;
            if (len > t3_threshold) ++n_extra;
        }
    }
    const auto frac = [n_total](std::size_t k) {
        return static_cast<double>(k) / static_cast<double>(n_total);
    };
    const auto stderr_of = [n_total](double f) {
        return std::sqrt(f * (1.0 - f) / static_cast<double>(n_total));
    };
    st.fraction_dark = frac(n_dark);
    st.se_dark = stderr_of(st.fraction_dark);
    st.fraction_extralong = frac(n_extra);
    st.se_extralong = stderr_of(st.fraction_extralong);
    return st;
}

double default_t3_threshold(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    const double lam3 = r.eta * r.eta * p.beta1 / 2.0;
    return lam3 > 0.0 ? 1.0 / lam3 : std::numeric_limits<double>::infinity();
}

}  // namespace nextjump
