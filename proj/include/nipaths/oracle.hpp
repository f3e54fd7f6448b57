#pragma once

// Ground truth by dynamic programming over the truncated state space of
// N-tuples of heights 0 <= x_1 < ... < x_N <= M.
//
// One-step LGV determinants factor: det[a^{y_j-x_i} 1{y_j >= x_i}] is
// a^{sum(y-x)} when x_1 <= y_1 < x_2 <= y_2 < ... and zero otherwise (the
// downward steps mirror this). The transfer operator is therefore applied
// one coordinate at a time on a dense (M+1)^N tensor, which is exact on the
// truncated space.

#include <cstdint>
#include <vector>

#include "nipaths/model.hpp"

namespace nipaths {

// SplitMix64 (Steele, Lea, Flood 2014), version 1 of this library's streams:
// sample i of a run with seed s draws from the generator whose state starts
// at mix(s) + i * 0x9E3779B97F4A7C15, mix being the SplitMix64 finalizer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);
    static std::uint64_t mix(std::uint64_t z);

    std::uint64_t next();
    double uniform();  // in [0, 1), 53 random bits

private:
    std::uint64_t state_;
};

struct TruncationSpec {
    int max_height = 40;
    long long state_cap = 50'000'000;  // cap on (M+1)^N dense states
};

struct OracleEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

class Oracle {
public:
    Oracle(const ValidatedModel& model, TruncationSpec spec = {});

    // Sum of path weights over configurations with all heights <= M.
    double partition_function() const { return z_; }
    // Upper bound on the weight of discarded configurations.
    double tail_bound() const { return tail_; }

    // Probability that the configuration contains every given point.
    OracleEstimate correlation(const std::vector<GridPoint>& points) const;

    // count i.i.d. exact samples; sample i uses SplitMix64::stream(seed, i).
    std::vector<PathConfig> sample(std::uint64_t seed, int count) const;
    PathConfig sample_one(std::uint64_t seed, std::uint64_t index) const;

    const ValidatedModel& model() const { return model_; }
    int max_height() const { return m_; }

private:
    using Tensor = std::vector<double>;

    void apply_step(Tensor& t, int step) const;
    size_t index_of(const std::vector<long>& x) const;
    Tensor start_tensor() const;

    ValidatedModel model_;
    int n_;
    int m_;
    size_t side_;
    std::vector<size_t> stride_;
    std::vector<Tensor> forward_;  // forward weights on lines 0..2N
    double z_ = 0.0;
    double tail_ = 0.0;
};

}  // namespace nipaths
