#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ddmod/types.hpp"

namespace ddmod {

/// Two-sided power spectral density on an fftshift-ed frequency grid.
struct PsdEstimate {
    std::vector<double> freq_hz;
    std::vector<double> density;   // linear, power per Hz
    std::vector<double> power_db;  // density relative to its peak (0 dB)
    double sample_rate_hz = 0.0;
    /// Mean |x|^2 over all samples fed to the estimator.
    double mean_power = 0.0;
    int segments = 0;
};

struct WelchOptions {
    int segment = 0;  // samples per segment
    int overlap = 0;  // samples shared by consecutive segments
};

/// Accumulates Hann-windowed periodograms; finish() averages them.
class WelchAccumulator {
public:
    WelchAccumulator(double sample_rate_hz, WelchOptions opts);
    ~WelchAccumulator();
    WelchAccumulator(const WelchAccumulator&) = delete;
    WelchAccumulator& operator=(const WelchAccumulator&) = delete;

    /// Adds every full segment of `signal`; a signal shorter than one
    /// segment is zero-padded into a single segment.
    void add(const ComplexVector& signal);
    PsdEstimate finish() const;

private:
    void add_segment(const cplx* data, Eigen::Index count);

    double fs_;
    WelchOptions opts_;
    std::vector<double> window_;
    double window_energy_ = 0.0;
    std::vector<double> acc_;
    int segments_ = 0;
    double power_sum_ = 0.0;
    double sample_count_ = 0.0;
    struct Plan;
    Plan* plan_;
};

using SignalGenerator = std::function<ComplexVector(std::uint64_t trial_seed)>;

/// Welch PSD of `trials` generated frames. Frame t uses seed mix(seed, t).
PsdEstimate psd_estimate(const SignalGenerator& generate, double sample_rate_hz, int trials, std::uint64_t seed,
                         WelchOptions opts);

/// Peak PSD outside [-half_band, half_band] relative to the in-band peak, in dB.
double oob_level_db(const PsdEstimate& psd, double half_band_hz);

/// Smallest N_G in [0, max_guard] whose PSD keeps out-of-band emission at or
/// below `threshold_db`. `psd_for_guard(g)` measures the PSD with g edge
/// subcarriers nulled on each side. Throws NotAchievable otherwise.
struct GuardSearchResult {
    int guard = 0;
    double oob_db = 0.0;
    std::vector<double> oob_by_guard;  // measured level for every candidate tried
};
GuardSearchResult guard_count_for_threshold(const std::function<PsdEstimate(int)>& psd_for_guard,
                                            double threshold_db, double half_band_hz, int max_guard);

/// splitmix64-style mixing used for every derived seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace ddmod
