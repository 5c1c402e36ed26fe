#include <doctest.h>

#include "ddmod/drufmc.hpp"
#include "ddmod/error.hpp"
#include "ddmod/harness.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/psd.hpp"
#include "helpers.hpp"

using namespace ddmod;
using namespace test;

namespace {

ModemConfig grid_config(int k, int os, int b, int len, int n) {
    ModemConfig cfg;
    cfg.subcarriers = k;
    cfg.oversampling = os;
    cfg.subband_size = k / b;
    cfg.filter_length = len;
    cfg.filter_attenuation_db = 50.0;
    cfg.symbols = n;
    return cfg;
}

ComplexMatrix drufmc_chain(const ComplexMatrix& x, const UfmcBasis& ub, const ChannelMatrixSet& chan) {
    return drufmc_demodulate(drufmc_apply_channel(drufmc_modulate(x, ub), chan, ub.config().tx_power, 0.0, 1),
                             ub.basis());
}

}  // namespace

TEST_SUITE("drufmc") {

TEST_CASE("basic transmitter properties") {
    const ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const UfmcBasis ub(cfg);
    CHECK(max_abs(drufmc_modulate(ComplexMatrix::Zero(16, 4), ub)) == 0.0);
    CHECK(drufmc_modulate(random_matrix(16, 4, 1), ub).size() == 16 * 2 * 4);

    // One symbol: no overlap, just the head of the filtered block.
    const ModemConfig one = grid_config(16, 2, 4, 5, 1);
    const UfmcBasis u1(one);
    const ComplexMatrix x = random_matrix(16, 1, 2);
    const ComplexVector filtered = u1.precoder() * dft_matrix(16) * x;
    CHECK(max_abs(drufmc_modulate(x, u1) - filtered.head(32)) < 1e-12);

    ModemConfig bad = cfg;
    bad.subband_size = 5;
    CHECK_THROWS_AS(UfmcBasis{bad}, Error);
}

TEST_CASE("overlap rule") {
    const ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const UfmcBasis ub(cfg);
    const ComplexMatrix x = random_matrix(16, 4, 3);
    const UfmcSymbolBlock blk = drufmc_symbol_block(x, ub);
    const int m = 32, tail = 4;
    REQUIRE(blk.filtered.rows() == m + tail);
    CHECK(max_abs(blk.filtered - ub.precoder() * isfft(x)) < 1e-12);
    for (int n = 0; n < 4; ++n)
        for (int k = 0; k < m; ++k) {
            cplx want = blk.filtered(k, n);
            if (n > 0 && k < tail) want += blk.filtered(k + m, n - 1);
            CHECK(std::abs(blk.overlapped(k, n) - want) < 1e-13);
        }
}

TEST_CASE("procedural and matrix transmitters agree across configurations") {
    int cases = 0;
    for (int k : {8, 16})
        for (int os : {1, 2})
            for (int b : {1, 2, 4})
                for (int len : {1, 3, 5})
                    for (int n : {1, 2, 4}) {
                        const ModemConfig cfg = grid_config(k, os, b, len, n);
                        const UfmcBasis ub(cfg);
                        const ComplexMatrix x = random_matrix(k, n, 100 + cases);
                        const double err = max_abs(drufmc_modulate(x, ub) - drufmc_modulate_matrix(x, ub));
                        CHECK_MESSAGE(err < 1e-12, "K=" << k << " O_s=" << os << " B=" << b << " L=" << len
                                                        << " N=" << n);
                        ++cases;
                    }
    CHECK(cases == 108);
}

TEST_CASE("stacked precoder shape") {
    const ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const UfmcBasis ub(cfg);
    const ComplexMatrix u = ufmc_stacked_precoder(ub);
    CHECK(u.rows() == 16 * 2 * 4);
    CHECK(u.cols() == 16 * 4);
}

TEST_CASE("drufmc_apply_channel") {
    const ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const UfmcBasis ub(cfg);
    const ComplexVector s = drufmc_modulate(random_matrix(16, 4, 4), ub);
    const auto ideal = channel_matrices(ideal_paths(), cfg, false);
    CHECK(max_abs(drufmc_apply_channel(s, ideal, 1.0, 0.0, 1) - s) == 0.0);

    const auto chan = channel_matrices(sample_eva_paths(5, 80.0, cfg.carrier_hz), cfg, false);
    const ComplexVector r = drufmc_apply_channel(s, chan, 2.0, 0.0, 1);
    const int m = cfg.samples_per_symbol();
    REQUIRE(r.size() == static_cast<Eigen::Index>(chan.rows()) * 4);
    for (int i = 0; i < 4; ++i) {
        const ComplexVector want = std::sqrt(2.0) * chan.dense(i) * s.segment(i * m, m);
        CHECK(max_abs(r.segment(i * chan.rows(), chan.rows()) - want) < 1e-12);
    }
    const ComplexVector s2 = drufmc_modulate(random_matrix(16, 4, 6), ub);
    CHECK(max_abs(drufmc_apply_channel(s + s2, chan, 1.0, 0.0, 1) - drufmc_apply_channel(s, chan, 1.0, 0.0, 1) -
                  drufmc_apply_channel(s2, chan, 1.0, 0.0, 1)) < 1e-12);
}

TEST_CASE("drufmc_demodulate") {
    const ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const UfmcBasis ub(cfg);
    const auto chan = channel_matrices(sample_eva_paths(5, 80.0, cfg.carrier_hz), cfg, false);
    CHECK(max_abs(drufmc_demodulate(ComplexVector::Zero(chan.rows() * 4), ub.basis())) == 0.0);
    CHECK_THROWS_AS(drufmc_demodulate(ComplexVector::Zero(13), ub.basis()), Error);
}

TEST_CASE("effective channel matches probing") {
    const ModemConfig cfg = desk_config();
    const UfmcBasis ub(cfg);
    const auto chan = channel_matrices(sample_eva_paths(33, kmh_to_mps(500.0), cfg.carrier_hz), cfg, false);
    const ComplexMatrix psi = drufmc_effective_channel(chan, ub).matrix;
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const int j = static_cast<int>(rng() % cfg.grid_size());
        const ComplexVector col = drufmc_chain(unit_grid(cfg.subcarriers, cfg.symbols, j), ub, chan).reshaped();
        CHECK((psi.col(j) - col).norm() < 1e-9 * col.norm());
    }
    const ComplexMatrix x = qpsk_grid(cfg.subcarriers, cfg.symbols, 2);
    const ComplexVector y = drufmc_chain(x, ub, chan).reshaped();
    CHECK((y - psi * x.reshaped()).norm() < 1e-10 * y.norm());
}

TEST_CASE("effective channel scaling and degenerate case") {
    ModemConfig cfg = grid_config(16, 2, 4, 5, 4);
    const auto chan = channel_matrices(sample_eva_paths(9, 80.0, cfg.carrier_hz), cfg, false);
    ModemConfig cfg4 = cfg;
    cfg4.tx_power = 4.0;
    const ComplexMatrix p1 = drufmc_effective_channel(chan, UfmcBasis(cfg)).matrix;
    const ComplexMatrix p4 = drufmc_effective_channel(chan, UfmcBasis(cfg4)).matrix;
    CHECK(max_abs(p4 - 2.0 * p1) < 1e-12);

    const ModemConfig plain = grid_config(16, 2, 1, 1, 4);
    const auto ideal = channel_matrices(ideal_paths(), plain, false);
    CHECK(max_abs(drufmc_effective_channel(ideal, UfmcBasis(plain)).matrix - ComplexMatrix::Identity(64, 64)) <
          1e-10);
}

TEST_CASE("ideal-channel loopback distortion is absorbed by MMSE") {
    // The noiseless loopback is not exact: filter roll-off and tail overlap
    // distort the grid. The MMSE stage recovers most bins.
    const ModemConfig cfg = desk_config();
    const UfmcBasis ub(cfg);
    const auto chan = channel_matrices(ideal_paths(), cfg, false);
    const ComplexMatrix x = qpsk_grid(cfg.subcarriers, cfg.symbols, 4);
    const ComplexMatrix y = drufmc_chain(x, ub, chan);
    CHECK(max_abs(y - x) > 1e-3);

    const ComplexMatrix psi = drufmc_effective_channel(chan, ub).matrix;
    const SinrMap map = sinr_map(psi, from_db(-60.0), cfg.subcarriers, cfg.symbols);
    CHECK(net_sinr_db(map, 0) > 44.0);
}

TEST_CASE("single active subband stays inside its band") {
    ModemConfig cfg = desk_config();
    cfg.symbols = 4;
    const UfmcBasis ub(cfg);
    const int k = cfg.subcarriers, os = cfg.oversampling, d = cfg.subband_size;
    const int active = 1;
    const SignalGenerator gen = [&](std::uint64_t seed) -> ComplexVector {
        ComplexMatrix ft = qpsk_grid(k, cfg.symbols, seed);
        for (int r = 0; r < k; ++r)
            if (r / d != active) ft.row(r).setZero();
        return drufmc_symbol_block_ft(ft, ub).overlapped.reshaped();
    };
    const double fs = cfg.sample_rate_hz();
    const double df = cfg.subcarrier_spacing_hz;
    const PsdEstimate psd = psd_estimate(gen, fs, 300, 5, WelchOptions{4 * k * os, 2 * k * os});

    // Transition width: main-lobe half width of the prototype, in subcarriers.
    const PrototypeFilter& g = ub.filter();
    const int grid = 8192;
    double prev = 1e300;
    int null_bin = 0;
    for (int f = 0; f < grid / 2; ++f) {
        cplx acc = 0.0;
        for (int t = 0; t < g.length(); ++t) acc += g.taps[t] * expj(-2.0 * kPi * f * t / grid);
        if (std::abs(acc) > prev) {
            null_bin = f - 1;
            break;
        }
        prev = std::abs(acc);
    }
    const double transition = static_cast<double>(null_bin) / grid * k * os;
    const double lo = (active * d - k / 2.0 - 0.5 - transition) * df;
    const double hi = ((active + 1) * d - k / 2.0 - 0.5 + transition) * df;
    double outside = -1e300;
    for (std::size_t b = 0; b < psd.freq_hz.size(); ++b)
        if (psd.freq_hz[b] < lo || psd.freq_hz[b] > hi) outside = std::max(outside, psd.power_db[b]);
    CHECK(outside < -(cfg.filter_attenuation_db - 10.0));
}

}

TEST_SUITE("slow") {

TEST_CASE("ideal-channel DR-UFMC reconstruction with the full filter") {
    const ModemConfig cfg;
    const UfmcBasis ub(cfg);
    const ComplexMatrix psi = drufmc_effective_channel(channel_matrices(ideal_paths(), cfg, false), ub).matrix;
    const SinrMap map = sinr_map(psi, from_db(-60.0), cfg.subcarriers, cfg.symbols);
    // Mean per-bin SINR; a few bins sit on near-null modes of the overlap.
    CHECK(net_sinr_db(map, 0) > 40.0);
}

}
