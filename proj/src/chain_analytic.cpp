// Expected-value model for repeater chains.
//
// Span i heralds after N_i ~ Geometric(p_i) slots, at R_i = N_i T_i. With
// sequential swapping the swap at node j happens at the prefix maximum
// P_j = max(R_0..R_j). Every state in the chain is Bell diagonal, and memory
// depolarisation multiplies all non-identity Pauli-frame characters by the
// same factor, so the delivered fidelity is
//
//   F = 1/4 + D (F0 - 1/4),   D = prod_j exp(-(2 P_j - w_{j-1} - w'_j) / tau_j)
//
// where F0 is the no-decay fidelity and w, w' the write times of the two
// qubits held at node j. E[D] factorises into per-span tilts exp(w / tau) and
// per-node factors exp(-2 P_j / tau_j), which a recursion over the
// distribution of P_j evaluates exactly. The same recursion gives the timeout
// probabilities and the expected round duration.

#include <algorithm>
#include <cmath>

#include "qors/repeater.hpp"

namespace qors {

namespace {

using chain_model::max_slots;
using chain_model::slot_seconds;

// Spans with more support points than this are binned.
constexpr std::uint64_t kMaxGridPoints = 200000;
// Probability mass below which the geometric tail is dropped.
constexpr double kTailMass = 1e-16;
// Largest |exponent| the tilted weights may reach before overflow risk.
constexpr double kMaxExponent = 600.0;

struct GridPoint {
  double t;
  double mass;    // Pr(value = t, within cutoff)
  double weight;  // mass times accumulated decay factors
};

double inverse(double tau) { return std::isinf(tau) ? 0.0 : 1.0 / tau; }

// Ready-time distribution of one span, truncated at the cutoff, with each
// point's tilt exp(rate * (n - 1) T + offset).
std::vector<GridPoint> span_grid(double p, double slot, std::uint64_t limit, double rate,
                                 double offset) {
  const double q = 1.0 - p;
  std::uint64_t tail = 1;
  if (q > 0.0) {
    const double t = std::ceil(std::log(kTailMass) / std::log(q));
    tail = t < 9.0e18 ? std::max<std::uint64_t>(1, static_cast<std::uint64_t>(t))
                      : std::numeric_limits<std::uint64_t>::max();
  }
  const std::uint64_t count = std::min(limit, tail);
  std::vector<GridPoint> grid;
  if (count == 0) {
    return grid;
  }
  const std::uint64_t width = (count + kMaxGridPoints - 1) / kMaxGridPoints;
  const double r = q * std::exp(rate * slot);
  grid.reserve(static_cast<std::size_t>((count + width - 1) / width));
  for (std::uint64_t first = 1; first <= count; first += width) {
    const std::uint64_t last = std::min(count, first + width - 1);
    const auto f = static_cast<double>(first);
    const auto l = static_cast<double>(last);
    GridPoint g;
    g.t = slot * 0.5 * (f + l);
    // Pr(first <= N <= last) and sum_n p q^(n-1) exp(rate (n-1) T).
    g.mass = std::pow(q, f - 1.0) - std::pow(q, l);
    if (width == 1) {
      g.weight = p * std::pow(r, f - 1.0);
    } else if (std::abs(r - 1.0) < 1e-15) {
      g.weight = p * (l - f + 1.0);
    } else {
      g.weight = p * (std::pow(r, f - 1.0) - std::pow(r, l)) / (1.0 - r);
    }
    g.weight *= std::exp(offset);
    grid.push_back(g);
  }
  return grid;
}

// Distribution of max(prev, next) for independent prev and next. `node_rate`
// applies exp(-node_rate * t) to the weight at the new maximum.
std::vector<GridPoint> merge_max(const std::vector<GridPoint>& prev,
                                 const std::vector<GridPoint>& next, double node_rate) {
  std::vector<GridPoint> out;
  out.reserve(prev.size() + next.size());
  std::size_t a = 0;
  std::size_t b = 0;
  double prev_mass_before = 0.0;
  double prev_weight_before = 0.0;
  double next_mass_upto = 0.0;
  double next_weight_upto = 0.0;
  while (a < prev.size() || b < next.size()) {
    const double ta = a < prev.size() ? prev[a].t : std::numeric_limits<double>::infinity();
    const double tb = b < next.size() ? next[b].t : std::numeric_limits<double>::infinity();
    const double t = std::min(ta, tb);
    GridPoint here_prev{t, 0.0, 0.0};
    GridPoint here_next{t, 0.0, 0.0};
    if (ta == t) {
      here_prev = prev[a++];
    }
    if (tb == t) {
      here_next = next[b++];
    }
    next_mass_upto += here_next.mass;
    next_weight_upto += here_next.weight;
    GridPoint g{t, prev_mass_before * here_next.mass + here_prev.mass * next_mass_upto,
                prev_weight_before * here_next.weight + here_prev.weight * next_weight_upto};
    g.weight *= std::exp(-node_rate * t);
    prev_mass_before += here_prev.mass;
    prev_weight_before += here_prev.weight;
    if (g.mass > 0.0 || g.weight > 0.0) {
      out.push_back(g);
    }
  }
  return out;
}

}  // namespace

EndToEndResult simulate_chain_analytic(const RepeaterChain& chain) {
  chain.validate();
  const std::size_t n = chain.spans.size();

  std::vector<double> p(n);
  std::vector<double> slot(n);
  std::vector<double> flight(n);
  BellDiagonal ideal{{1.0, 0.0, 0.0, 0.0}};
  for (std::size_t i = 0; i < n; ++i) {
    const SpanAttempt attempt = chain_model::attempt_for_span(chain, i);
    p[i] = attempt.success_probability;
    slot[i] = slot_seconds(chain, i);
    flight[i] = photon_dwell_time(chain.spans[i]);
    ideal = convolve(ideal, BellDiagonal::from_state(attempt.state));
    if (i > 0) {
      const double v = chain.nodes[i - 1].bsm_visibility_penalty;
      ideal = convolve(ideal, BellDiagonal{{1.0 - v, 0.0, v, 0.0}});
    }
  }

  EndToEndResult result;
  if (std::any_of(p.begin(), p.end(), [](double v) { return !(v > 0.0); })) {
    return result;
  }

  if (n == 1) {
    result.success_probability = 1.0;
    result.mean_latency_s = slot[0] / p[0];
    result.pair_rate_hz = p[0] / slot[0];
    result.werner_fidelity = ideal.fidelity();
    result.mean_state = ideal.to_state();
    return result;
  }

  const double cutoff = chain.memory_cutoff_s;
  std::vector<double> node_rate(n, 0.0);  // index j = node j (1-based)
  for (std::size_t j = 1; j < n; ++j) {
    node_rate[j] = inverse(chain.nodes[j - 1].memory.coherence_time_s);
  }
  if (std::isfinite(cutoff)) {
    double worst = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      worst = std::max(worst, 2.0 * node_rate[j] * cutoff);
    }
    if (worst > kMaxExponent) {
      throw ParameterError("memory cutoff is too long relative to coherence time for the analytic model");
    }
  }

  // Tilt of span i: exp(+w / tau) for the qubit written at each memory end.
  auto grid_for = [&](std::size_t i) {
    const double right_rate = i + 1 < n ? node_rate[i + 1] : 0.0;
    const double left_rate = i > 0 ? node_rate[i] : 0.0;
    const double rate = right_rate + left_rate;
    const double offset = left_rate * flight[i];
    return span_grid(p[i], slot[i], max_slots(cutoff, slot[i]), rate, offset);
  };

  std::vector<double> within(n);       // Pr(A_j): every span up to j heralded in time
  std::vector<double> expected_max(n); // E[P_j ; A_j]
  std::vector<GridPoint> dist = grid_for(0);
  for (const auto& g : dist) {
    within[0] += g.mass;
  }
  for (std::size_t j = 1; j < n; ++j) {
    dist = merge_max(dist, grid_for(j), 2.0 * node_rate[j]);
    for (const auto& g : dist) {
      within[j] += g.mass;
      expected_max[j] += g.mass * g.t;
    }
  }
  double decay_mass = 0.0;
  for (const auto& g : dist) {
    decay_mass += g.weight;
  }

  // Round duration: timeout at node j costs the cutoff, a failed swap at
  // node j ends the round at P_j, a full success ends it at P_{N-1}.
  double swaps_ok = 1.0;
  double expected_duration = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double b = chain_model::swap_success(chain.nodes[j - 1]);
    const double reached = j == 1 ? 1.0 : within[j - 1];
    const double timed_out = reached - within[j];
    const double cutoff_cost = std::isfinite(cutoff) && timed_out > 0.0 ? timed_out * cutoff : 0.0;
    expected_duration += swaps_ok * (cutoff_cost + (1.0 - b) * expected_max[j]);
    swaps_ok *= b;
  }
  expected_duration += swaps_ok * expected_max[n - 1];

  const double delivered = within[n - 1];
  result.success_probability = swaps_ok * delivered;
  if (!(result.success_probability > 0.0) || !(expected_duration > 0.0)) {
    result.success_probability = 0.0;
    return result;
  }
  result.pair_rate_hz = result.success_probability / expected_duration;
  result.mean_latency_s = expected_max[n - 1] / delivered;
  const double decay = std::clamp(decay_mass / delivered, 0.0, 1.0);
  const BellDiagonal final_state = depolarize(ideal, decay);
  result.werner_fidelity = final_state.fidelity();
  result.mean_state = final_state.to_state();
  return result;
}

}  // namespace qors
