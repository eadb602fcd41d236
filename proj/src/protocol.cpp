// Copyright 2026 The qtem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtem/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qtem/error.hpp"

namespace qtem::protocol {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kNeverSampled = 1e-15;

}  // namespace

CompositeState CompositeState::product(const QubitState &electron, const QubitState &qubit) {
    CompositeState s;
    for (int e = 0; e < 2; ++e) {
        for (int q = 0; q < 2; ++q) s(e, q) = electron[e] * qubit[q];
    }
    return s;
}

double CompositeState::norm() const {
    double s = 0;
    for (const auto &a : amp) s += std::norm(a);
    return std::sqrt(s);
}

QubitState ket0() {
    return {cplx(1, 0), cplx(0, 0)};
}

QubitState ket1() {
    return {cplx(0, 0), cplx(1, 0)};
}

double norm(const QubitState &q) {
    return std::sqrt(std::norm(q[0]) + std::norm(q[1]));
}

CompositeState gate_entangle(const CompositeState &s) {
    CompositeState out = s;
    out(0, 1) = s(1, 1);
    out(1, 1) = s(0, 1);
    return out;
}

CompositeState gate_specimen(const CompositeState &s, double delta) {
    const cplx phase = std::polar(1.0, delta);
    CompositeState out = s;
    out(1, 0) *= phase;
    out(1, 1) *= phase;
    return out;
}

CompositeState gate_u_electron(const CompositeState &s) {
    CompositeState out;
    for (int q = 0; q < 2; ++q) {
        out(0, q) = kInvSqrt2 * (s(0, q) + s(1, q));
        out(1, q) = kInvSqrt2 * (s(0, q) - s(1, q));
    }
    return out;
}

QubitState gate_u_qubit(const QubitState &q) {
    return {kInvSqrt2 * (q[0] + q[1]), kInvSqrt2 * (q[0] - q[1])};
}

QubitState gate_phase_correct(const QubitState &q, int outcome) {
    if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
    if (outcome == 0) return q;
    return {q[0], -q[1]};
}

double electron_probability(const CompositeState &s, int outcome) {
    if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
    return std::norm(s(outcome, 0)) + std::norm(s(outcome, 1));
}

QubitState collapse(const CompositeState &s, int outcome) {
    const double p = electron_probability(s, outcome);
    if (p < kNeverSampled) throw ValidationError("cannot condition on an outcome of zero probability");
    const double inv = 1.0 / std::sqrt(p);
    return {s(outcome, 0) * inv, s(outcome, 1) * inv};
}

Measurement measure_electron(const CompositeState &s, physcore::StreamRng &rng) {
    Measurement m;
    m.p0 = electron_probability(s, 0);
    m.p1 = electron_probability(s, 1);
    const double total = m.p0 + m.p1;
    double p1 = m.p1 / total;
    if (m.p1 < kNeverSampled) p1 = 0;
    if (m.p0 < kNeverSampled) p1 = 1;
    m.outcome = rng.bernoulli(p1) ? 1 : 0;
    m.qubit = collapse(s, m.outcome);
    return m;
}

QubitState phase_state(double phase) {
    return {cplx(kInvSqrt2, 0), kInvSqrt2 * std::polar(1.0, phase)};
}

double distance_up_to_phase(const QubitState &a, const QubitState &b) {
    const cplx overlap = std::conj(b[0]) * a[0] + std::conj(b[1]) * a[1];
    const cplx align = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1, 0);
    return std::max(std::abs(a[0] - align * b[0]), std::abs(a[1] - align * b[1]));
}

ProtocolSimulator::ProtocolSimulator(double delta, ProtocolOptions options) : options_(options) {
    state_.delta = delta;
    state_.qubit = gate_u_qubit(ket0());
}

CompositeState ProtocolSimulator::pass_state() const {
    CompositeState s = CompositeState::product(ket0(), state_.qubit);
    s = gate_entangle(s);
    s = gate_specimen(s, state_.delta);
    return gate_u_electron(s);
}

double ProtocolSimulator::next_probability(int outcome) const {
    return electron_probability(pass_state(), outcome);
}

namespace {

void record_pass(ProtocolState &st, const QubitState &collapsed, int outcome, bool defer, int &parity) {
    PassRecord rec;
    rec.outcome = outcome;
    rec.detected = true;
    if (defer) {
        st.qubit = collapsed;
        parity ^= outcome;
    } else {
        st.qubit = gate_phase_correct(collapsed, outcome);
        rec.correction_applied = outcome == 1;
    }
    st.records.push_back(rec);
    ++st.electrons_processed;
}

}  // namespace

int ProtocolSimulator::pass(physcore::StreamRng &rng) {
    const Measurement m = measure_electron(pass_state(), rng);
    record_pass(state_, m.qubit, m.outcome, options_.defer_correction, pending_parity_);
    return m.outcome;
}

double ProtocolSimulator::pass_forced(int outcome) {
    const CompositeState s = pass_state();
    const double p = electron_probability(s, outcome);
    record_pass(state_, collapse(s, outcome), outcome, options_.defer_correction, pending_parity_);
    return p;
}

QubitState ProtocolSimulator::pre_readout() const {
    return gate_phase_correct(state_.qubit, pending_parity_);
}

double ProtocolSimulator::readout_probability() const {
    const QubitState out = gate_u_qubit(pre_readout());
    const double p1 = std::norm(out[1]);
    return std::clamp(p1 / (p1 + std::norm(out[0])), 0.0, 1.0);
}

int ProtocolSimulator::readout(physcore::StreamRng &rng) const {
    return rng.bernoulli(readout_probability()) ? 1 : 0;
}

ProtocolRun run_protocol(int k, double delta, physcore::StreamRng &rng, ProtocolOptions options) {
    if (k < 1) throw ValidationError("k must be at least 1");
    ProtocolSimulator sim(delta, options);
    for (int i = 0; i < k; ++i) sim.pass(rng);
    ProtocolRun run;
    run.pre_readout = sim.pre_readout();
    run.phase_error = distance_up_to_phase(run.pre_readout, phase_state(k * delta));
    run.p_one = sim.readout_probability();
    run.final_outcome = sim.readout(rng);
    run.state = sim.state();
    return run;
}

namespace {

void enumerate(const ProtocolSimulator &sim, int remaining, double weight, int k, EnumerationResult &out) {
    if (remaining == 0) {
        out.p_one += weight * sim.readout_probability();
        out.total_probability += weight;
        out.max_phase_error =
            std::max(out.max_phase_error, distance_up_to_phase(sim.pre_readout(), phase_state(k * sim.state().delta)));
        ++out.branches;
        return;
    }
    for (int outcome = 0; outcome < 2; ++outcome) {
        const double p = sim.next_probability(outcome);
        out.max_marginal_error = std::max(out.max_marginal_error, std::abs(p - 0.5));
        if (p < kNeverSampled) continue;
        ProtocolSimulator next = sim;
        next.pass_forced(outcome);
        enumerate(next, remaining - 1, weight * p, k, out);
    }
}

}  // namespace

EnumerationResult enumerate_outcomes(int k, double delta, ProtocolOptions options) {
    if (k < 1 || k > 24) throw ValidationError("enumeration supports 1 <= k <= 24");
    EnumerationResult out;
    enumerate(ProtocolSimulator(delta, options), k, 1.0, k, out);
    return out;
}

double detection_probability(int k, double delta) {
    if (k < 1) throw ValidationError("k must be at least 1");
    const double s = std::sin(k * delta / 2);
    return s * s;
}

double classical_detection_probability(int k, double delta) {
    if (k < 1) throw ValidationError("k must be at least 1");
    const double s = std::sin(delta / 2);
    const double p = s * s;
    if (p >= 1) return 1;
    return -std::expm1(k * std::log1p(-p));
}

DetectionSummary detection_summary(int k, double delta) {
    DetectionSummary d;
    d.k = k;
    d.delta = delta;
    d.quantum = detection_probability(k, delta);
    d.classical = classical_detection_probability(k, delta);
    d.quantum_small = k * k * delta * delta / 4;
    const double q = delta * delta / 4;
    d.classical_small = q >= 1 ? 1 : -std::expm1(k * std::log1p(-q));
    d.classical_linear = k * delta * delta / 4;
    d.ratio = d.classical > 0 ? d.quantum / d.classical : 0;
    return d;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0, 1};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = successes / n;
    const double denom = 1 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

namespace {

struct RangeTally {
    std::uint64_t completed = 0;
    std::uint64_t detections = 0;
    std::uint64_t failures = 0;
};

RangeTally run_range(const MonteCarloConfig &cfg, std::uint64_t range, std::uint64_t count) {
    physcore::StreamRng rng(cfg.seed, range);
    RangeTally t;
    const ProtocolOptions opts{cfg.defer_correction};
    for (std::uint64_t i = 0; i < count; ++i) {
        ProtocolSimulator sim(cfg.delta, opts);
        bool failed = false;
        for (int e = 0; e < cfg.k; ++e) {
            if (!rng.bernoulli(cfg.eta)) {
                failed = true;
                break;
            }
            sim.pass(rng);
        }
        if (failed) {
            ++t.failures;
            continue;
        }
        ++t.completed;
        if (sim.readout(rng) == 1) ++t.detections;
    }
    return t;
}

}  // namespace

MCReport monte_carlo(const MonteCarloConfig &cfg) {
    if (cfg.k < 1) throw ValidationError("k must be at least 1");
    if (!(cfg.eta >= 0 && cfg.eta <= 1)) throw ValidationError("eta must lie in [0, 1]");
    if (cfg.range_size == 0) throw ValidationError("range size must be positive");

    MCReport r;
    r.trials = cfg.trials;
    r.k = cfg.k;
    r.delta = cfg.delta;
    r.eta = cfg.eta;
    r.analytic_p = detection_probability(cfg.k, cfg.delta);
    r.classical_p = classical_detection_probability(cfg.k, cfg.delta);
    r.expected_failure = 1 - std::pow(cfg.eta, cfg.k);
    r.rng = physcore::RngSpec{physcore::kRngAlgorithm, cfg.seed, 0};
    r.ranges = (cfg.trials + cfg.range_size - 1) / cfg.range_size;

    int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(r.ranges, 1)));
    r.workers = workers;

    std::vector<RangeTally> tallies(r.ranges);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t range = next.fetch_add(1);
            if (range >= r.ranges) return;
            const std::uint64_t begin = range * cfg.range_size;
            const std::uint64_t count = std::min(cfg.range_size, cfg.trials - begin);
            tallies[range] = run_range(cfg, range, count);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }
    for (const auto &t : tallies) {
        r.completed += t.completed;
        r.detections += t.detections;
        r.failures += t.failures;
    }
    r.detect_freq = r.completed > 0 ? static_cast<double>(r.detections) / r.completed : 0;
    r.detect_ci = wilson_interval(r.detections, r.completed);
    r.run_failure_freq = r.trials > 0 ? static_cast<double>(r.failures) / r.trials : 0;
    r.failure_ci = wilson_interval(r.failures, r.trials);
    r.all_failed = r.trials > 0 && r.completed == 0;
    return r;
}

RoleReversalCheck cnot_role_reversal_check() {
    RoleReversalCheck c;
    c.cnot_qubit_control.setZero();
    c.cnot_electron_control.setZero();
    for (int e = 0; e < 2; ++e) {
        for (int q = 0; q < 2; ++q) {
            c.cnot_qubit_control(2 * (e ^ q) + q, 2 * e + q) = 1;
            c.cnot_electron_control(2 * e + (q ^ e), 2 * e + q) = 1;
        }
    }
    // Columns of H (x) H are |s/a>_e (x) |s/a>_q with s <-> 0, a <-> 1.
    Eigen::Matrix2d h;
    h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    Eigen::Matrix4d hh;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) hh(i, j) = h(i / 2, j / 2) * h(i % 2, j % 2);
    }
    c.transformed = hh.transpose() * c.cnot_qubit_control * hh;
    c.max_elementwise_error = (c.transformed - c.cnot_electron_control).cwiseAbs().maxCoeff();
    return c;
}

}  // namespace qtem::protocol
