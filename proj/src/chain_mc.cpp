// Monte Carlo engine for repeater chains.

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qors/repeater.hpp"

namespace qors {

namespace {

using chain_model::max_slots;
using chain_model::slot_seconds;

struct SpanModel {
  double p;
  double slot_s;
  double flight_s;
  std::uint64_t max_slots;
  DensityMatrix state;
};

struct TrialOutcome {
  bool delivered = false;
  double duration_s = 0.0;
  double fidelity = 0.0;
  std::optional<ComplexMatrix> state;
};

// Trial i draws from a stream fixed by (seed, i) alone.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on (0, 1].
double uniform_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Attempts up to and including the first success.
std::uint64_t sample_attempts(double p, std::mt19937_64& rng) {
  if (p >= 1.0) {
    rng();
    return 1;
  }
  const double n = std::floor(std::log(uniform_open_closed(rng)) / std::log1p(-p));
  if (!(n < 9.0e18)) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return 1 + static_cast<std::uint64_t>(n);
}

TrialOutcome run_trial(const RepeaterChain& chain, const std::vector<SpanModel>& spans,
                       std::uint64_t seed, std::uint64_t trial) {
  std::mt19937_64 rng = trial_stream(seed, trial);
  const std::size_t n = spans.size();
  std::vector<std::uint64_t> attempts(n);
  for (std::size_t i = 0; i < n; ++i) {
    attempts[i] = sample_attempts(spans[i].p, rng);
  }
  auto ready = [&](std::size_t i) { return static_cast<double>(attempts[i]) * spans[i].slot_s; };
  auto emitted = [&](std::size_t i) {
    return static_cast<double>(attempts[i] - 1) * spans[i].slot_s;
  };

  TrialOutcome out;
  if (n == 1) {
    out.delivered = true;
    out.duration_s = ready(0);
    out.fidelity = fidelity(spans[0].state, bell_ket(Bell::kPhiPlus));
    out.state = spans[0].state.matrix();
    return out;
  }

  bool timed_out = attempts[0] > spans[0].max_slots;
  double prefix_max = ready(0);
  DensityMatrix segment = spans[0].state;
  for (std::size_t j = 1; j < n; ++j) {
    timed_out = timed_out || attempts[j] > spans[j].max_slots;
    if (timed_out) {
      out.duration_s = chain.memory_cutoff_s;
      return out;
    }
    prefix_max = std::max(prefix_max, ready(j));
    const QorsNode& node = chain.nodes[j - 1];
    if (uniform_open_closed(rng) > chain_model::swap_success(node)) {
      out.duration_s = prefix_max;
      return out;
    }
    // Node j holds the right qubit of the segment (emitted with span j-1's
    // successful attempt) and the left qubit of span j (written one flight
    // time after emission).
    const double segment_dwell = prefix_max - emitted(j - 1);
    const double span_dwell = prefix_max - (emitted(j) + spans[j].flight_s);
    const DensityMatrix left = memory_decay(segment, segment_dwell, node.memory, 1);
    const DensityMatrix right = memory_decay(spans[j].state, span_dwell, node.memory, 0);
    segment = entanglement_swap(left, right, node).state;
  }
  out.delivered = true;
  out.duration_s = prefix_max;
  out.fidelity = fidelity(segment, bell_ket(Bell::kPhiPlus));
  out.state = segment.matrix();
  return out;
}

}  // namespace

EndToEndResult simulate_chain_mc(const RepeaterChain& chain, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers) {
  chain.validate();
  if (trials == 0) {
    throw ParameterError("Monte Carlo needs at least one trial");
  }

  std::vector<SpanModel> spans;
  spans.reserve(chain.spans.size());
  for (std::size_t i = 0; i < chain.spans.size(); ++i) {
    SpanAttempt attempt = chain_model::attempt_for_span(chain, i);
    const double slot = slot_seconds(chain, i);
    spans.push_back({attempt.success_probability, slot, photon_dwell_time(chain.spans[i]),
                     max_slots(chain.memory_cutoff_s, slot), std::move(attempt.state)});
  }

  EndToEndResult result;
  result.trials = trials;
  const bool any_dead = std::any_of(spans.begin(), spans.end(),
                                    [](const SpanModel& s) { return !(s.p > 0.0); });
  if (any_dead) {
    return result;
  }

  std::vector<TrialOutcome> outcomes(trials);
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      outcomes[t] = run_trial(chain, spans, seed, t);
    }
  };
  if (workers <= 1) {
    work(0, trials);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(trials, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
  }

  // Reduce in trial order so the floating-point sums do not depend on the
  // worker split.
  double total_time = 0.0;
  double fid_sum = 0.0;
  double fid_sq = 0.0;
  double lat_sum = 0.0;
  double lat_sq = 0.0;
  std::uint64_t delivered = 0;
  ComplexMatrix state_sum(4, 4);
  for (const auto& o : outcomes) {
    total_time += o.duration_s;
    if (o.delivered) {
      ++delivered;
      fid_sum += o.fidelity;
      fid_sq += o.fidelity * o.fidelity;
      lat_sum += o.duration_s;
      lat_sq += o.duration_s * o.duration_s;
      state_sum += *o.state;
    }
  }
  result.successes = delivered;
  const auto n = static_cast<double>(trials);
  result.success_probability = static_cast<double>(delivered) / n;
  result.pair_rate_hz = total_time > 0.0 ? static_cast<double>(delivered) / total_time : 0.0;
  if (trials > 1 && total_time > 0.0) {
    // Delta-method error of the ratio estimator sum(s) / sum(d).
    const double mean_d = total_time / n;
    double resid_sq = 0.0;
    for (const auto& o : outcomes) {
      const double e = (o.delivered ? 1.0 : 0.0) - result.pair_rate_hz * o.duration_s;
      resid_sq += e * e;
    }
    result.rate_stderr = std::sqrt(resid_sq / (n * (n - 1.0))) / mean_d;
  }
  if (delivered > 0) {
    const auto k = static_cast<double>(delivered);
    result.werner_fidelity = fid_sum / k;
    result.mean_latency_s = lat_sum / k;
    if (delivered > 1) {
      const double fvar = std::max(0.0, (fid_sq - k * result.werner_fidelity * result.werner_fidelity) / (k - 1.0));
      const double lvar = std::max(0.0, (lat_sq - k * result.mean_latency_s * result.mean_latency_s) / (k - 1.0));
      result.fidelity_stderr = std::sqrt(fvar / k);
      result.latency_stderr = std::sqrt(lvar / k);
    }
    result.mean_state = DensityMatrix::normalized(state_sum * (1.0 / k));
  }
  return result;
}

}  // namespace qors
