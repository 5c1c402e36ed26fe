#include <doctest.h>

#include "ddmod/error.hpp"
#include "ddmod/harness.hpp"
#include "ddmod/psd.hpp"
#include "helpers.hpp"

using namespace ddmod;
using namespace test;

TEST_SUITE("psd") {

TEST_CASE("constant signal puts its power at DC") {
    WelchAccumulator w(1000.0, WelchOptions{64, 32});
    w.add(ComplexVector::Ones(1024));
    const PsdEstimate psd = w.finish();
    REQUIRE(psd.freq_hz.size() == 64);
    const int dc = 32;
    CHECK(psd.freq_hz[dc] == 0.0);
    CHECK(psd.power_db[dc] == 0.0);
    for (int b = 0; b < 64; ++b)
        if (std::abs(b - dc) > 1) CHECK(psd.power_db[b] < -200.0);
    CHECK(psd.segments == 31);
}

TEST_CASE("Parseval: integrated density equals mean power") {
    const double fs = 2.0e6;
    const ComplexVector x = complex_gaussian(200000, 2.0, 12);
    WelchAccumulator w(fs, WelchOptions{256, 128});
    w.add(x);
    const PsdEstimate psd = w.finish();
    double integral = 0.0;
    for (double d : psd.density) integral += d * fs / 256.0;
    CHECK(psd.mean_power == doctest::Approx(x.squaredNorm() / x.size()));
    CHECK(integral == doctest::Approx(psd.mean_power).epsilon(0.01));
}

TEST_CASE("frequency axis and short signals") {
    WelchAccumulator w(800.0, WelchOptions{8, 4});
    w.add(ComplexVector::Ones(3));
    const PsdEstimate psd = w.finish();
    CHECK(psd.segments == 1);
    CHECK(psd.freq_hz.front() == doctest::Approx(-400.0));
    CHECK(psd.freq_hz.back() == doctest::Approx(300.0));
    CHECK_THROWS_AS(WelchAccumulator(800.0, WelchOptions{8, 8}), Error);
    WelchAccumulator empty(800.0, WelchOptions{8, 4});
    CHECK_THROWS_AS(empty.finish(), Error);
}

TEST_CASE("psd_estimate is deterministic in the seed") {
    const SignalGenerator gen = [](std::uint64_t s) { return complex_gaussian(512, 1.0, s); };
    const PsdEstimate a = psd_estimate(gen, 1.0, 4, 9, WelchOptions{64, 32});
    const PsdEstimate b = psd_estimate(gen, 1.0, 4, 9, WelchOptions{64, 32});
    CHECK(a.density == b.density);
    CHECK_THROWS_AS(psd_estimate(gen, 1.0, 0, 9, WelchOptions{64, 32}), Error);
}

TEST_CASE("oob level and guard search on synthetic spectra") {
    // Tone at +0.1 fs plus a weaker one at +0.4 fs.
    const double fs = 1.0;
    const auto make = [&](double weak) {
        ComplexVector x(4096);
        for (int t = 0; t < x.size(); ++t) x(t) = expj(2.0 * kPi * 0.1 * t) + weak * expj(2.0 * kPi * 0.4 * t);
        WelchAccumulator w(fs, WelchOptions{256, 128});
        w.add(x);
        return w.finish();
    };
    CHECK(oob_level_db(make(0.1), 0.25) == doctest::Approx(-20.0).epsilon(0.01));

    const auto by_guard = [&](int g) { return make(std::pow(10.0, -g / 4.0)); };
    const GuardSearchResult r = guard_count_for_threshold(by_guard, -29.5, 0.25, 20);
    CHECK(r.guard == 6);
    CHECK(r.oob_by_guard.size() == 7);
    CHECK(guard_count_for_threshold(by_guard, 1.0, 0.25, 20).guard == 0);
    CHECK_THROWS_AS(guard_count_for_threshold(by_guard, -30.0, 0.25, 3), Error);
    try {
        guard_count_for_threshold(by_guard, -30.0, 0.25, 3);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotAchievable);
    }
}

TEST_CASE("OOB level falls as more edge subcarriers are nulled") {
    ExperimentConfig cfg;
    cfg.modem = desk_config();
    cfg.psd_trials = 30;
    for (Waveform w : {Waveform::Otfs, Waveform::DrUfmc}) {
        const double half_band = cfg.modem.subcarriers * cfg.modem.subcarrier_spacing_hz / 2.0;
        double prev = 1e9;
        for (int g = 0; g <= 6; ++g) {
            const double level = oob_level_db(waveform_psd(w, cfg.modem, g, cfg.psd_trials, 3), half_band);
            CHECK(level <= prev + 0.05);
            prev = level;
        }
    }
}

TEST_CASE("DR-UFMC spectrum decays faster than OTFS outside the band") {
    const ModemConfig cfg;
    const PsdEstimate otfs = waveform_psd(Waveform::Otfs, cfg, 0, 20, 1);
    const PsdEstimate ufmc = waveform_psd(Waveform::DrUfmc, cfg, 0, 20, 1);
    const double df = cfg.subcarrier_spacing_hz;
    const double edge = cfg.subcarriers * df / 2.0;
    // Close to the edge both sit inside the filter main lobe.
    bool ordered = true;
    double ufmc_far = -1e300, otfs_far = 1e300;
    for (std::size_t b = 0; b < otfs.freq_hz.size(); ++b) {
        const double f = std::abs(otfs.freq_hz[b]);
        if (f > edge + 15.0 * df && ufmc.power_db[b] >= otfs.power_db[b]) ordered = false;
        if (f > edge + 50.0 * df) {
            ufmc_far = std::max(ufmc_far, ufmc.power_db[b]);
            otfs_far = std::min(otfs_far, otfs.power_db[b]);
        }
    }
    CHECK(ordered);
    CHECK(ufmc_far < -60.0);
    CHECK(otfs_far > -50.0);
}

}
