#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "ddmod/channel.hpp"
#include "ddmod/error.hpp"
#include "helpers.hpp"

using namespace ddmod;
using namespace test;

namespace {

ModemConfig small_config() {
    ModemConfig cfg;
    cfg.subcarriers = 16;
    cfg.symbols = 4;
    cfg.oversampling = 2;
    cfg.subband_size = 4;
    cfg.filter_length = 5;
    return cfg;
}

// Tap value written out directly from the path sum with one-based
// delay, row and symbol indices and an ideal sampling pulse.
cplx tap_oracle(const PathSet& ps, double ts, int l1, int r1, int i1) {
    cplx acc = 0.0;
    for (const auto& p : ps.paths) {
        if (std::lround(p.delay_s / ts) != l1 - 1) continue;
        acc += p.gain * expj(2.0 * kPi * p.doppler_hz * ((l1 + r1 + i1 - 1) * ts - ts / 2.0));
    }
    return acc;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("EVA profile") {
    const auto& eva = eva_profile();
    REQUIRE(eva.delays_s.size() == 9);
    CHECK(eva.delays_s.back() == doctest::Approx(2510e-9));
    CHECK(std::is_sorted(eva.delays_s.begin(), eva.delays_s.end()));
    CHECK(eva.powers_db.front() == 0.0);
    CHECK(eva.powers_db.back() == doctest::Approx(-16.9));
}

TEST_CASE("sample_eva_paths basics") {
    const PathSet still = sample_eva_paths(5, 0.0, 28e9);
    for (const auto& p : still.paths) CHECK(p.doppler_hz == 0.0);

    const double nu_max = max_doppler_hz(kmh_to_mps(500.0), 28e9);
    CHECK(nu_max == doctest::Approx(12.96e3).epsilon(1e-3));
    const PathSet fast = sample_eva_paths(5, kmh_to_mps(500.0), 28e9);
    CHECK(fast.max_doppler_hz == doctest::Approx(nu_max));
    for (const auto& p : fast.paths) CHECK(std::abs(p.doppler_hz) <= nu_max);
    for (std::size_t i = 1; i < fast.paths.size(); ++i) CHECK(fast.paths[i].delay_s >= fast.paths[i - 1].delay_s);

    const PathSet again = sample_eva_paths(5, kmh_to_mps(500.0), 28e9);
    for (std::size_t i = 0; i < fast.paths.size(); ++i) {
        CHECK(fast.paths[i].gain == again.paths[i].gain);
        CHECK(fast.paths[i].doppler_hz == again.paths[i].doppler_hz);
    }

    CHECK_THROWS_AS(sample_eva_paths(1, -1.0, 28e9), Error);
    CHECK_THROWS_AS(sample_eva_paths(1, 1.0, 0.0), Error);
}

TEST_CASE("EVA energy normalisation over many draws") {
    double sum = 0.0;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        for (const auto& p : sample_eva_paths(1000 + s, 10.0, 28e9).paths) sum += std::norm(p.gain);
    }
    const double mean = sum / draws;
    CHECK(mean >= 0.97);
    CHECK(mean <= 1.03);
}

TEST_CASE("Doppler follows the arcsine law") {
    std::vector<double> u;
    for (int s = 0; s < 10000; ++s) {
        const PathSet ps = sample_eva_paths(50000 + s, 100.0, 28e9);
        u.push_back(ps.paths[s % ps.paths.size()].doppler_hz / ps.max_doppler_hz);
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    const double n = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double cdf = 1.0 - std::acos(std::clamp(u[i], -1.0, 1.0)) / kPi;
        ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    CHECK(ks < 0.02);
}

TEST_CASE("single-path taps") {
    const ModemConfig cfg = small_config();
    const int block = cfg.samples_per_symbol();
    const auto real = materialize_taps(ideal_paths(), cfg, block);
    REQUIRE(real.taps() == 1);
    for (int i = 0; i < real.symbols(); ++i)
        for (int r = 0; r < real.rows(); ++r) CHECK(std::abs(real.tap(i, r, 0) - 1.0) < 1e-15);

    PathSet moving;
    moving.paths.push_back(Path{cplx(0.6, 0.8), 0.0, 3000.0});
    const auto rot = materialize_taps(moving, cfg, block);
    for (int i = 0; i < rot.symbols(); ++i)
        for (int r = 0; r < rot.rows(); r += 7) CHECK(std::abs(rot.tap(i, r, 0)) == doctest::Approx(1.0));
}

TEST_CASE("tap values against a direct path sum") {
    const ModemConfig cfg = small_config();
    const double ts = cfg.sample_period_s();
    PathSet ps;
    ps.paths.push_back(Path{cplx(0.8, -0.1), 0.0, 2500.0});
    ps.paths.push_back(Path{cplx(-0.3, 0.4), 3.2 * ts, -7100.0});
    const int block = cfg.samples_per_symbol() + cfg.cp_samples();
    const auto real = materialize_taps(ps, cfg, block);
    REQUIRE(real.taps() == 5);

    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const int i = static_cast<int>(rng() % cfg.symbols);
        const int r = static_cast<int>(rng() % real.rows());
        const int l = static_cast<int>(rng() % real.taps());
        const cplx want = tap_oracle(ps, ts, l + 1, r + 1, i + 1);
        CHECK(std::abs(real.tap(i, r, l) - want) < 1e-12);
        CHECK(std::abs(tap_formula(ps, cfg, block, i, r, l) - want) < 1e-12);
    }
}

TEST_CASE("absolute time indexing advances the phase by whole blocks") {
    ModemConfig cfg = small_config();
    cfg.time_indexing = TimeIndexing::Absolute;
    const double ts = cfg.sample_period_s();
    PathSet ps;
    ps.paths.push_back(Path{cplx(1.0, 0.0), 0.0, 4000.0});
    const int block = cfg.samples_per_symbol();
    const auto real = materialize_taps(ps, cfg, block);
    for (int i = 0; i < cfg.symbols; ++i) {
        const cplx want = expj(2.0 * kPi * 4000.0 * ((1 + 1 + i * block) * ts - ts / 2.0));
        CHECK(std::abs(real.tap(i, 0, 0) - want) < 1e-12);
    }
}

TEST_CASE("shaped pulse") {
    CHECK(pulse_value(PulseShape::RaisedCosine, 0.0) == doctest::Approx(1.0));
    for (int t = 1; t <= 4; ++t) CHECK(std::abs(pulse_value(PulseShape::RaisedCosine, t)) < 1e-12);
    CHECK(pulse_value(PulseShape::RaisedCosine, 4.5) == 0.0);
    CHECK(pulse_half_support(PulseShape::RaisedCosine) == 4);

    ModemConfig cfg = small_config();
    cfg.pulse = PulseShape::RaisedCosine;
    const double ts = cfg.sample_period_s();
    PathSet ps;
    ps.paths.push_back(Path{cplx(1.0, 0.0), 2.5 * ts, 0.0});
    ps.span_delay_s = 2.5 * ts;
    const auto real = materialize_taps(ps, cfg, cfg.samples_per_symbol());
    CHECK(real.taps() == 3 + 8 + 1);
    for (int l = 0; l < real.taps(); ++l) {
        const double want = pulse_value(PulseShape::RaisedCosine, l - 4 - 2.5);
        CHECK(std::abs(real.tap(0, 0, l) - want) < 1e-14);
    }
}

TEST_CASE("delay beyond the tap span") {
    const ModemConfig cfg = small_config();
    PathSet ps;
    ps.paths.push_back(Path{cplx(1.0, 0.0), 10.0 * cfg.sample_period_s(), 0.0});
    CHECK_THROWS_AS(materialize_taps(ps, cfg, cfg.samples_per_symbol(), 4), Error);
    try {
        materialize_taps(ps, cfg, cfg.samples_per_symbol(), 4);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DelayExceedsSpan);
    }
}

TEST_CASE("channel matrices") {
    const ModemConfig cfg = small_config();
    const auto ideal = channel_matrices(ideal_paths(), cfg, true);
    const int block = cfg.samples_per_symbol() + cfg.cp_samples();
    CHECK(ideal.cols() == block);
    CHECK(max_abs(ideal.dense(0) - ComplexMatrix::Identity(ideal.rows(), block)) == 0.0);

    const PathSet ps = sample_eva_paths(3, kmh_to_mps(500.0), cfg.carrier_hz);
    const auto chan = channel_matrices(ps, cfg, false);
    CHECK(chan.taps() == channel_taps(ps, cfg));
    CHECK(chan.rows() == cfg.samples_per_symbol() + chan.taps() - 1);
    for (int i = 0; i < cfg.symbols; ++i) {
        const ComplexMatrix m = chan.dense(i);
        double outside = 0.0;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (r - c < 0 || r - c >= chan.taps()) outside = std::max(outside, std::abs(m(r, c)));
        CHECK(outside == 0.0);

        const ComplexVector x = random_matrix(chan.cols(), 1, 20 + i);
        ComplexVector conv = ComplexVector::Zero(chan.rows());
        for (int r = 0; r < chan.rows(); ++r)
            for (int l = 0; l < chan.taps(); ++l)
                if (r - l >= 0 && r - l < chan.cols()) conv(r) += chan.realization().tap(i, r, l) * x(r - l);
        CHECK(max_abs(chan.apply(i, x) - conv) < 1e-12);
        CHECK(max_abs(m * x - conv) < 1e-12);

        const ComplexMatrix a = random_matrix(3, chan.rows(), 40 + i);
        CHECK(max_abs(chan.left_multiply(a, i) - a * m) < 1e-12);
    }
    const ComplexVector s = random_matrix(chan.cols() * cfg.symbols, 1, 7);
    CHECK(max_abs(chan.apply_block_diagonal(s) - chan.block_diagonal() * s) < 1e-12);
}

TEST_CASE("apply_channel") {
    const ModemConfig cfg = small_config();
    const auto ideal = channel_matrices(ideal_paths(), cfg, false);
    const ComplexVector s = random_matrix(ideal.cols() * cfg.symbols, 1, 2);
    const ComplexVector r = apply_channel(s, ideal, 1.0, 0.0, 1);
    CHECK(max_abs(r - s) == 0.0);

    const auto chan = channel_matrices(sample_eva_paths(4, 30.0, 28e9), cfg, true);
    const ComplexVector s2 = random_matrix(chan.cols() * cfg.symbols, 1, 3);
    const ComplexVector r1 = apply_channel(s2, chan, 1.0, 0.0, 1);
    const ComplexVector r4 = apply_channel(s2, chan, 4.0, 0.0, 1);
    CHECK(r1.size() == static_cast<Eigen::Index>(chan.rows()) * cfg.symbols);
    CHECK(max_abs(r4 - 2.0 * r1) < 1e-12);

    const ComplexVector noisy = apply_channel(ComplexVector::Zero(s2.size()), chan, 1.0, 0.3, 11);
    CHECK(noisy.squaredNorm() / noisy.size() == doctest::Approx(0.3).epsilon(0.05));
    CHECK_THROWS_AS(apply_channel(s2.head(5), chan, 1.0, 0.0, 1), Error);
}

TEST_CASE("complex_gaussian variance") {
    const ComplexVector w = complex_gaussian(100000, 0.5, 77);
    CHECK(w.squaredNorm() / w.size() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(w.mean()) < 0.01);
    CHECK(max_abs(complex_gaussian(10, 0.5, 77).head(10) - w.head(10)) == 0.0);
}

TEST_CASE("text export") {
    const ModemConfig cfg = small_config();
    const auto real = materialize_taps(sample_eva_paths(2, 20.0, 28e9), cfg, cfg.samples_per_symbol());
    std::ostringstream os;
    real.write_text(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# ddmod ltv-channel v1");
    int data_lines = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++data_lines;
    CHECK(data_lines == real.symbols() * real.taps());
}

}
