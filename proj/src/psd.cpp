#include "ddmod/psd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "ddmod/error.hpp"

namespace ddmod {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct WelchAccumulator::Plan {
    explicit Plan(int n) : size(n) {
        buffer = fftw_alloc_complex(static_cast<std::size_t>(n));
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~Plan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buffer);
    }
    int size;
    fftw_complex* buffer;
    fftw_plan plan;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

WelchAccumulator::WelchAccumulator(double sample_rate_hz, WelchOptions opts)
    : fs_(sample_rate_hz), opts_(opts) {
    require(opts.segment >= 2 && opts.overlap >= 0 && opts.overlap < opts.segment, ErrorCode::InvalidArgument,
            "welch: need segment >= 2 and 0 <= overlap < segment");
    require(sample_rate_hz > 0.0, ErrorCode::InvalidArgument, "welch: sample rate must be > 0");
    window_.resize(opts.segment);
    // Periodic Hann window.
    for (int i = 0; i < opts.segment; ++i) {
        window_[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / opts.segment);
        window_energy_ += window_[i] * window_[i];
    }
    acc_.assign(opts.segment, 0.0);
    plan_ = new Plan(opts.segment);
}

WelchAccumulator::~WelchAccumulator() {
    delete plan_;
}

void WelchAccumulator::add_segment(const cplx* data, Eigen::Index count) {
    auto* buf = plan_->buffer;
    for (int i = 0; i < opts_.segment; ++i) {
        const cplx v = i < count ? data[i] * window_[i] : cplx(0.0, 0.0);
        buf[i][0] = v.real();
        buf[i][1] = v.imag();
    }
    fftw_execute(plan_->plan);
    for (int i = 0; i < opts_.segment; ++i) acc_[i] += buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
    ++segments_;
}

void WelchAccumulator::add(const ComplexVector& signal) {
    power_sum_ += signal.squaredNorm();
    sample_count_ += static_cast<double>(signal.size());
    const Eigen::Index seg = opts_.segment;
    const Eigen::Index hop = opts_.segment - opts_.overlap;
    if (signal.size() < seg) {
        add_segment(signal.data(), signal.size());
        return;
    }
    for (Eigen::Index start = 0; start + seg <= signal.size(); start += hop) add_segment(signal.data() + start, seg);
}

PsdEstimate WelchAccumulator::finish() const {
    require(segments_ > 0, ErrorCode::InvalidArgument, "welch: no data");
    PsdEstimate psd;
    const int n = opts_.segment;
    psd.sample_rate_hz = fs_;
    psd.segments = segments_;
    psd.mean_power = sample_count_ > 0 ? power_sum_ / sample_count_ : 0.0;
    psd.freq_hz.resize(n);
    psd.density.resize(n);
    psd.power_db.resize(n);
    const double norm = 1.0 / (fs_ * window_energy_ * segments_);
    // fftshift: bin (b + n/2) mod n lands at output index b.
    double peak = 0.0;
    for (int b = 0; b < n; ++b) {
        const int src = (b + n / 2) % n;
        psd.freq_hz[b] = (b - n / 2) * fs_ / n;
        psd.density[b] = acc_[src] * norm;
        peak = std::max(peak, psd.density[b]);
    }
    const double floor = std::numeric_limits<double>::min();
    for (int b = 0; b < n; ++b) {
        psd.power_db[b] = peak > 0.0 ? 10.0 * std::log10(std::max(psd.density[b], floor) / peak) : 0.0;
    }
    return psd;
}

PsdEstimate psd_estimate(const SignalGenerator& generate, double sample_rate_hz, int trials, std::uint64_t seed,
                         WelchOptions opts) {
    require(trials >= 1, ErrorCode::InvalidArgument, "psd_estimate: trials must be >= 1");
    WelchAccumulator welch(sample_rate_hz, opts);
    for (int t = 0; t < trials; ++t) welch.add(generate(mix_seed(seed, static_cast<std::uint64_t>(t))));
    return welch.finish();
}

double oob_level_db(const PsdEstimate& psd, double half_band_hz) {
    double in_peak = 0.0;
    double out_peak = 0.0;
    for (std::size_t b = 0; b < psd.freq_hz.size(); ++b) {
        if (std::abs(psd.freq_hz[b]) <= half_band_hz) {
            in_peak = std::max(in_peak, psd.density[b]);
        } else {
            out_peak = std::max(out_peak, psd.density[b]);
        }
    }
    require(in_peak > 0.0, ErrorCode::ZeroReference, "oob_level_db: no in-band power");
    if (out_peak <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(out_peak / in_peak);
}

GuardSearchResult guard_count_for_threshold(const std::function<PsdEstimate(int)>& psd_for_guard,
                                            double threshold_db, double half_band_hz, int max_guard) {
    require(max_guard >= 0, ErrorCode::InvalidGuard, "guard search: max_guard must be >= 0");
    GuardSearchResult result;
    for (int g = 0; g <= max_guard; ++g) {
        const double level = oob_level_db(psd_for_guard(g), half_band_hz);
        result.oob_by_guard.push_back(level);
        if (level <= threshold_db) {
            result.guard = g;
            result.oob_db = level;
            return result;
        }
    }
    fail(ErrorCode::NotAchievable, "guard search: OOB threshold not met with up to " +
                                       std::to_string(max_guard) + " nulled subcarriers per edge");
}

}  // namespace ddmod
