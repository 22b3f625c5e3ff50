#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "adens/core.hpp"
#include "adens/rng.hpp"

namespace adens {

/// Parameters for the synthetic traffic-light process generator.
struct SimConfig {
    std::size_t n_records = 5000;
    double anomaly_fraction = 0.0;
    std::array<double, 7> scenario_mix = {1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7,
                                          1.0 / 7, 1.0 / 7, 1.0 / 7};
    std::size_t cycle_length_ticks = 60;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (n_records < 1) throw InvalidConfig("n_records must be >= 1");
        if (!(anomaly_fraction >= 0.0 && anomaly_fraction <= 1.0))
            throw InvalidConfig("anomaly_fraction must be in [0,1]");
        if (cycle_length_ticks < 10) throw InvalidConfig("cycle_length_ticks must be >= 10");
        double sum = 0.0;
        for (double w : scenario_mix) {
            if (w < 0.0) throw InvalidConfig("scenario weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("scenario weights must sum to 1");
    }
};

namespace sim_detail {

// Two signal groups cycle through four phases: group-1 green, group-1 yellow,
// group-2 green, group-2 yellow; the opposing group holds red throughout.
enum class Phase { g1_green, g1_yellow, g2_green, g2_yellow };

struct PhasePos {
    Phase phase;
    std::size_t phase_tick;   // ticks since phase start
    std::size_t cycle_tick;   // ticks since cycle start
};

inline PhasePos locate(std::size_t tick, std::size_t cycle_len) {
    std::size_t green = (cycle_len * 2) / 5;      // 40% of the cycle
    std::size_t yellow = cycle_len / 2 - green;   // remainder up to the half
    std::size_t t = tick % cycle_len;
    if (t < green) return {Phase::g1_green, t, t};
    if (t < green + yellow) return {Phase::g1_yellow, t - green, t};
    if (t < green + yellow + green) return {Phase::g2_green, t - green - yellow, t};
    return {Phase::g2_yellow, t - 2 * green - yellow, t};
}

// Column order of the generated schema.
inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "g1_green", "g1_yellow", "g1_red", "g2_green", "g2_yellow", "g2_red",
        "req1",     "req2",      "t1",     "t2"};
    return names;
}
constexpr std::size_t kNumFeatures = 10;

struct Record {
    std::array<double, kNumFeatures> v{};
};

inline Record normal_record(const PhasePos& pos, std::size_t cycle_len, Rng& rng) {
    Record r;
    bool g1_active = pos.phase == Phase::g1_green || pos.phase == Phase::g1_yellow;
    r.v[0] = pos.phase == Phase::g1_green ? 1.0 : 0.0;
    r.v[1] = pos.phase == Phase::g1_yellow ? 1.0 : 0.0;
    r.v[2] = g1_active ? 0.0 : 1.0;
    r.v[3] = pos.phase == Phase::g2_green ? 1.0 : 0.0;
    r.v[4] = pos.phase == Phase::g2_yellow ? 1.0 : 0.0;
    r.v[5] = g1_active ? 1.0 : 0.0;
    // a crossing request queues only while the group is held at red
    r.v[6] = (r.v[2] == 1.0 && rng.uniform() < 0.3) ? 1.0 : 0.0;
    r.v[7] = (r.v[5] == 1.0 && rng.uniform() < 0.3) ? 1.0 : 0.0;
    // timing counters carry a little sampling jitter, clamped to the valid range
    double denom = static_cast<double>(cycle_len - 1);
    r.v[8] = std::clamp(static_cast<double>(pos.phase_tick) / denom + rng.uniform(-0.02, 0.02),
                        0.0, 1.0);
    r.v[9] = std::clamp(static_cast<double>(pos.cycle_tick) / denom + rng.uniform(-0.02, 0.02),
                        0.0, 1.0);
    return r;
}

// Scenario injectors. 1-5 corrupt signal/input bits; 6-7 corrupt only the
// timing counters (t1, t2).
inline Record inject(int scenario, std::size_t tick, std::size_t cycle_len, Rng& rng) {
    PhasePos pos = locate(tick, cycle_len);
    switch (scenario) {
        case 1: {  // stuck output: active group's lamp head goes dark
            Record r = normal_record(pos, cycle_len, rng);
            if (pos.phase == Phase::g1_green || pos.phase == Phase::g1_yellow)
                r.v[0] = r.v[1] = r.v[2] = 0.0;
            else
                r.v[3] = r.v[4] = r.v[5] = 0.0;
            return r;
        }
        case 2: {  // illegal simultaneous greens
            Record r = normal_record(pos, cycle_len, rng);
            r.v[0] = r.v[3] = 1.0;
            r.v[1] = r.v[2] = r.v[4] = r.v[5] = 0.0;
            return r;
        }
        case 3: {  // dropped transition: both groups fall to red mid-cycle
            Record r = normal_record(pos, cycle_len, rng);
            r.v[0] = r.v[1] = r.v[3] = r.v[4] = 0.0;
            r.v[2] = r.v[5] = 1.0;
            return r;
        }
        case 4: {  // inverted input: request raised for the group that is moving
            Record r = normal_record(pos, cycle_len, rng);
            r.v[6] = 1.0 - r.v[2];
            r.v[7] = 1.0 - r.v[5];
            return r;
        }
        case 5: {  // premature phase skip: lights jump ahead, timers do not
            PhasePos ahead = locate(tick + cycle_len / 2, cycle_len);
            Record r = normal_record(ahead, cycle_len, rng);
            double denom = static_cast<double>(cycle_len - 1);
            r.v[8] = std::clamp(
                static_cast<double>(pos.phase_tick) / denom + rng.uniform(-0.02, 0.02), 0.0, 1.0);
            r.v[9] = std::clamp(
                static_cast<double>(pos.cycle_tick) / denom + rng.uniform(-0.02, 0.02), 0.0, 1.0);
            return r;
        }
        case 6: {  // timing-counter freeze: counters pinned at zero mid-phase
            if (pos.cycle_tick < cycle_len / 2)
                pos = locate(tick + cycle_len / 2, cycle_len);
            Record r = normal_record(pos, cycle_len, rng);
            r.v[8] = 0.0;
            r.v[9] = 0.0;
            return r;
        }
        case 7: {  // timing-counter jitter: counters land outside the valid range
            Record r = normal_record(pos, cycle_len, rng);
            r.v[8] = rng.uniform() < 0.5 ? rng.uniform(-0.30, -0.05) : rng.uniform(1.05, 1.30);
            r.v[9] = rng.uniform() < 0.5 ? rng.uniform(-0.30, -0.05) : rng.uniform(1.05, 1.30);
            return r;
        }
        default:
            throw InvalidConfig("unknown scenario " + std::to_string(scenario));
    }
}

// Largest-remainder apportionment of `total` across the weights; exact counts
// keep the requested scenario proportions even for small anomaly budgets.
inline std::array<std::size_t, 7> apportion(const std::array<double, 7>& w, std::size_t total) {
    std::array<std::size_t, 7> counts{};
    std::array<double, 7> frac{};
    std::size_t assigned = 0;
    for (int s = 0; s < 7; ++s) {
        double exact = w[s] * static_cast<double>(total);
        counts[s] = static_cast<std::size_t>(exact);
        frac[s] = exact - static_cast<double>(counts[s]);
        assigned += counts[s];
    }
    while (assigned < total) {
        int best = 0;
        for (int s = 1; s < 7; ++s)
            if (frac[s] > frac[best]) best = s;
        ++counts[best];
        frac[best] = -1.0;
        ++assigned;
    }
    return counts;
}

}  // namespace sim_detail

/// Generates a cyclic two-group traffic-light process with injected anomalies.
/// Deterministic for a fixed rng_seed; exactly round(anomaly_fraction *
/// n_records) rows are anomalous.
inline LabeledSet simulate_tlight(const SimConfig& config) {
    using namespace sim_detail;
    config.validate();
    Rng rng(derive_seed(config.rng_seed, "simulate"));

    std::size_t n = config.n_records;
    std::size_t n_anom =
        static_cast<std::size_t>(std::llround(config.anomaly_fraction * static_cast<double>(n)));

    // which rows are anomalous: partial Fisher-Yates over row indices
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_anom; ++i) {
        std::size_t j = i + rng.below(n - i);
        std::swap(order[i], order[j]);
    }
    std::vector<int> scenario_of(n, 0);
    auto counts = apportion(config.scenario_mix, n_anom);
    std::size_t next = 0;
    for (int s = 0; s < 7; ++s)
        for (std::size_t c = 0; c < counts[s]; ++c) scenario_of[order[next++]] = s + 1;

    LabeledSet set;
    set.features.n_features = kNumFeatures;
    set.features.feature_names = feature_names();
    set.features.values.reserve(n * kNumFeatures);
    set.labels.reserve(n);
    if (n_anom > 0) set.scenario_tags.reserve(n);

    std::size_t start = rng.below(config.cycle_length_ticks);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t tick = start + i;
        Record r;
        if (scenario_of[i] == 0) {
            r = normal_record(locate(tick, config.cycle_length_ticks), config.cycle_length_ticks,
                              rng);
            set.labels.push_back(Label::normal);
            if (n_anom > 0) set.scenario_tags.emplace_back();
        } else {
            r = inject(scenario_of[i], tick, config.cycle_length_ticks, rng);
            set.labels.push_back(Label::anomaly);
            set.scenario_tags.emplace_back(scenario_of[i]);
        }
        set.features.values.insert(set.features.values.end(), r.v.begin(), r.v.end());
        ++set.features.n_samples;
    }
    return set;
}

struct PaperSplits {
    LabeledSet train;
    std::array<LabeledSet, 5> tests;
};

/// Sizes and anomaly proportions of the five canonical test sets.
struct TestSetSpec {
    std::size_t n_records;
    double anomaly_fraction;
    bool timing_heavy;  // anomalies drawn mainly from the timing-bit scenarios
};

inline const std::array<TestSetSpec, 5>& paper_test_specs() {
    static const std::array<TestSetSpec, 5> specs = {{{5000, 0.10, false},
                                                      {7000, 0.10, false},
                                                      {13130, 0.20, false},
                                                      {15000, 0.30, true},
                                                      {18270, 0.50, true}}};
    return specs;
}

inline std::array<double, 7> scenario_mix_for(bool timing_heavy) {
    if (timing_heavy)
        // 82% of anomalies come from the two timing-bit scenarios (6 and 7)
        return {0.036, 0.036, 0.036, 0.036, 0.036, 0.41, 0.41};
    return {0.18, 0.18, 0.18, 0.18, 0.18, 0.05, 0.05};
}

/// 41580 all-normal training records plus the five canonical test sets.
inline PaperSplits make_paper_splits(std::uint64_t rng_seed) {
    PaperSplits out;
    SimConfig train_cfg;
    train_cfg.n_records = 41580;
    train_cfg.anomaly_fraction = 0.0;
    train_cfg.rng_seed = derive_seed(rng_seed, "train");
    out.train = simulate_tlight(train_cfg);
    for (std::size_t t = 0; t < 5; ++t) {
        const auto& spec = paper_test_specs()[t];
        SimConfig cfg;
        cfg.n_records = spec.n_records;
        cfg.anomaly_fraction = spec.anomaly_fraction;
        cfg.scenario_mix = scenario_mix_for(spec.timing_heavy);
        cfg.rng_seed = derive_seed(rng_seed, "test" + std::to_string(t + 1));
        out.tests[t] = simulate_tlight(cfg);
    }
    return out;
}

}  // namespace adens
