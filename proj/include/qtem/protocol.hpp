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

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "qtem/rng.hpp"

namespace qtem::protocol {

using cplx = std::complex<double>;

/// (|0>, |1>) amplitudes of one qubit.
using QubitState = std::array<cplx, 2>;

/// Electron (x) qubit amplitudes; |e, q> lives at index 2e + q.
struct CompositeState {
    std::array<cplx, 4> amp{};

    static CompositeState product(const QubitState &electron, const QubitState &qubit);
    cplx &operator()(int e, int q) {
        return amp[2 * e + q];
    }
    cplx operator()(int e, int q) const {
        return amp[2 * e + q];
    }
    double norm() const;
};

QubitState ket0();
QubitState ket1();
double norm(const QubitState &q);

/// |e, q> -> |e xor q, q>: the qubit controls a flip of the electron.
CompositeState gate_entangle(const CompositeState &s);
/// e^{i delta} on every amplitude whose electron is |1>.
CompositeState gate_specimen(const CompositeState &s, double delta);
/// U = [[1, 1], [1, -1]] / sqrt 2 on the electron.
CompositeState gate_u_electron(const CompositeState &s);
QubitState gate_u_qubit(const QubitState &q);
/// |1> -> -|1> when outcome is 1.
QubitState gate_phase_correct(const QubitState &q, int outcome);

/// Probability that the electron is found in `outcome`.
double electron_probability(const CompositeState &s, int outcome);
/// Renormalised qubit state conditional on the electron outcome. Throws
/// ValidationError for a branch of probability below 1e-15.
QubitState collapse(const CompositeState &s, int outcome);

struct Measurement {
    int outcome = 0;
    double p0 = 0;
    double p1 = 0;
    QubitState qubit{};
};

Measurement measure_electron(const CompositeState &s, physcore::StreamRng &rng);

struct PassRecord {
    int outcome = 0;
    bool detected = true;
    bool correction_applied = false;
};

struct ProtocolState {
    QubitState qubit{};
    int electrons_processed = 0;
    std::vector<PassRecord> records;
    double delta = 0;
};

struct ProtocolOptions {
    /// Apply the accumulated phase correction once before readout instead of
    /// after every electron.
    bool defer_correction = false;
};

/// Step-by-step k-electron protocol. The qubit starts in U|0>; each pass
/// entangles a fresh |0> electron, applies the specimen phase and U, and
/// measures the electron.
class ProtocolSimulator {
   public:
    explicit ProtocolSimulator(double delta, ProtocolOptions options = {});

    /// Probability of `outcome` for the next electron.
    double next_probability(int outcome) const;
    /// One pass with a sampled electron outcome.
    int pass(physcore::StreamRng &rng);
    /// One pass with a prescribed outcome; returns its probability.
    double pass_forced(int outcome);

    /// Qubit state before the final U, with any deferred correction applied.
    QubitState pre_readout() const;
    /// P(final outcome 1) = |<1| U pre_readout>|^2.
    double readout_probability() const;
    int readout(physcore::StreamRng &rng) const;

    const ProtocolState &state() const {
        return state_;
    }

   private:
    CompositeState pass_state() const;

    ProtocolOptions options_;
    ProtocolState state_;
    int pending_parity_ = 0;
};

/// (|0> + e^{i phase}|1>) / sqrt 2.
QubitState phase_state(double phase);

/// max_i |a_i - e^{i chi} b_i| with the global phase chi chosen to align a onto b.
double distance_up_to_phase(const QubitState &a, const QubitState &b);

struct ProtocolRun {
    int final_outcome = 0;
    double p_one = 0;
    QubitState pre_readout{};
    /// distance_up_to_phase(pre_readout, phase_state(k delta)).
    double phase_error = 0;
    ProtocolState state;
};

ProtocolRun run_protocol(int k, double delta, physcore::StreamRng &rng, ProtocolOptions options = {});

struct EnumerationResult {
    double p_one = 0;            // sum over branches of P(branch) P(1 | branch)
    double total_probability = 0;  // sum of branch probabilities
    double max_phase_error = 0;  // worst branch distance to phase_state(k delta)
    double max_marginal_error = 0;  // worst |P(outcome) - 1/2| over all passes
    std::uint64_t branches = 0;
};

/// Exhaustive enumeration over all 2^k electron outcome strings (k <= 24).
EnumerationResult enumerate_outcomes(int k, double delta, ProtocolOptions options = {});

/// sin^2(k delta / 2).
double detection_probability(int k, double delta);
/// 1 - (1 - sin^2(delta / 2))^k: k independent single-pass probes.
double classical_detection_probability(int k, double delta);

struct DetectionSummary {
    int k = 0;
    double delta = 0;
    double quantum = 0;
    double classical = 0;
    double quantum_small = 0;    // k^2 delta^2 / 4
    double classical_small = 0;  // 1 - (1 - delta^2 / 4)^k
    double classical_linear = 0;  // k delta^2 / 4
    double ratio = 0;            // quantum / classical (0 when both vanish)
};

DetectionSummary detection_summary(int k, double delta);

struct Interval {
    double low = 0;
    double high = 0;
};

/// Wilson score interval at 95% confidence.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct MonteCarloConfig {
    int k = 1;
    double delta = 0;
    double eta = 1;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    /// Trials per independently seeded range (stream index = range index).
    std::uint64_t range_size = 65536;
    /// Worker threads; 0 means hardware concurrency.
    int workers = 0;
    bool defer_correction = false;
};

struct MCReport {
    std::uint64_t trials = 0;
    int k = 0;
    double delta = 0;
    double eta = 0;
    std::uint64_t completed = 0;   // runs with every electron detected
    std::uint64_t detections = 0;  // completed runs with final outcome 1
    std::uint64_t failures = 0;
    double detect_freq = 0;        // detections / completed
    Interval detect_ci;
    double run_failure_freq = 0;
    Interval failure_ci;
    double analytic_p = 0;
    double classical_p = 0;
    double expected_failure = 0;  // 1 - eta^k
    bool all_failed = false;
    physcore::RngSpec rng;        // master seed; stream index = range index
    std::uint64_t ranges = 0;
    int workers = 0;
};

MCReport monte_carlo(const MonteCarloConfig &config);

struct RoleReversalCheck {
    Eigen::Matrix4d cnot_qubit_control;      // computational basis, |e, q> at 2e + q
    Eigen::Matrix4d transformed;             // same operator in the {|s>, |a>} basis
    Eigen::Matrix4d cnot_electron_control;   // expected form
    double max_elementwise_error = 0;
};

RoleReversalCheck cnot_role_reversal_check();

}  // namespace qtem::protocol
