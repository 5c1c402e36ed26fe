#include <doctest.h>

#include "ddmod/harness.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/ofdm.hpp"
#include "ddmod/otfs.hpp"
#include "helpers.hpp"

using namespace ddmod;
using namespace test;

namespace {

ComplexMatrix ofdm_chain(const ComplexMatrix& x, const ModemBasis& basis, const ChannelMatrixSet& chan) {
    return ofdm_demodulate(apply_channel(ofdm_modulate(x, basis), chan, basis.config().tx_power, 0.0, 1), basis);
}

}  // namespace

TEST_SUITE("ofdm") {

TEST_CASE("ideal channel gives the identity") {
    const ModemConfig cfg = desk_config();
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(ideal_paths(), cfg, true);
    const auto c = ofdm_full_effective_channel(chan, basis);
    CHECK(max_abs(c.matrix - ComplexMatrix::Identity(cfg.grid_size(), cfg.grid_size())) < 1e-10);

    const ComplexMatrix coeffs = onetap_coefficients(chan, basis);
    const ComplexMatrix x = qpsk_grid(cfg.subcarriers, cfg.symbols, 1);
    const ComplexMatrix y = ofdm_chain(x, basis, chan);
    CHECK(max_abs(ofdm_onetap_fde(y, coeffs, 1e-14, 1.0) - x) < 1e-10);
    CHECK(max_abs(ofdm_onetap_fde(y, coeffs, 0.0, 1.0, OneTapMode::ZeroForcing) - x) < 1e-10);
}

TEST_CASE("full effective channel matches probing and is block diagonal") {
    ModemConfig cfg = desk_config();
    cfg.tx_power = 2.0;
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(sample_eva_paths(4, kmh_to_mps(500.0), cfg.carrier_hz), cfg, true);
    const ComplexMatrix c = ofdm_full_effective_channel(chan, basis).matrix;
    const int k = cfg.subcarriers, n = cfg.symbols;
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const int j = static_cast<int>(rng() % (k * n));
        const ComplexVector col = ofdm_chain(unit_grid(k, n, j), basis, chan).reshaped();
        CHECK((c.col(j) - col).norm() < 1e-9 * col.norm());
    }
    double off = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) off += c.block(a * k, b * k, k, k).squaredNorm();
    CHECK(off < 1e-20);

    // Same operator as OTFS up to the delay-Doppler transforms.
    const ComplexMatrix psi = otfs_effective_channel(chan, basis).matrix;
    CHECK(max_abs(basis.ft_to_dd(c) - psi) < 1e-10);
}

TEST_CASE("one-tap coefficients are the FT-domain diagonal") {
    const ModemConfig cfg = desk_config();
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(sample_eva_paths(8, 50.0, cfg.carrier_hz), cfg, true);
    const ComplexMatrix c = ofdm_full_effective_channel(chan, basis).matrix;
    const ComplexMatrix coeffs = onetap_coefficients(chan, basis);
    for (int j = 0; j < cfg.grid_size(); ++j) CHECK(std::abs(coeffs(j) - c(j, j)) < 1e-12);
}

TEST_CASE("one-tap estimates shrink to zero with huge noise") {
    const ModemConfig cfg = desk_config();
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(sample_eva_paths(8, 50.0, cfg.carrier_hz), cfg, true);
    const ComplexMatrix coeffs = onetap_coefficients(chan, basis);
    const ComplexMatrix y = random_matrix(cfg.subcarriers, cfg.symbols, 2);
    CHECK(max_abs(ofdm_onetap_fde(y, coeffs, 1e12, 1.0)) < 1e-9);

    // Scalar MMSE written out per bin.
    const double s2 = 0.2;
    const ComplexMatrix est = ofdm_onetap_fde(y, coeffs, s2, 1.0);
    for (int j = 0; j < y.size(); j += 11) {
        const cplx want = std::conj(coeffs(j)) * y(j) / (std::norm(coeffs(j)) + s2);
        CHECK(std::abs(est(j) - want) < 1e-12);
    }
}

TEST_CASE("one-tap SINR sits below full MMSE at high Doppler") {
    const ModemConfig cfg = desk_config();
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(sample_eva_paths(21, kmh_to_mps(500.0), cfg.carrier_hz), cfg, true);
    const auto c = ofdm_full_effective_channel(chan, basis);
    const double s2 = 1e-3;
    const SinrMap one = onetap_sinr_map(c, s2, cfg.subcarriers, cfg.symbols);
    const SinrMap full = sinr_map(c.matrix, s2, cfg.subcarriers, cfg.symbols);
    for (int j = 0; j < cfg.grid_size(); ++j) CHECK(one.values(j) < full.values(j));

    // Hand evaluation of the ICI-as-noise ratio for a few bins.
    for (int j = 0; j < cfg.grid_size(); j += 37) {
        const double sig = std::norm(c.matrix(j, j));
        const double ici = c.matrix.row(j).squaredNorm() - sig;
        CHECK(one.values(j) == doctest::Approx(sig / (ici + s2)).epsilon(1e-12));
    }
}

TEST_CASE("one-tap and full MMSE agree on a static channel within the CP") {
    ModemConfig cfg = desk_config();
    const ModemBasis basis(cfg);
    PathSet ps;
    ps.paths.push_back(Path{cplx(0.8, 0.3), 0.0, 0.0});
    ps.paths.push_back(Path{cplx(-0.2, 0.4), 5.0 * cfg.sample_period_s(), 0.0});
    const auto chan = channel_matrices(ps, cfg, true);
    REQUIRE(cfg.cp_samples() >= chan.taps() - 1);
    const auto c = ofdm_full_effective_channel(chan, basis);
    const SinrMap one = onetap_sinr_map(c, 0.05, cfg.subcarriers, cfg.symbols);
    const SinrMap full = sinr_map(c.matrix, 0.05, cfg.subcarriers, cfg.symbols);
    for (int j = 0; j < cfg.grid_size(); ++j)
        CHECK(std::abs(to_db(one.values(j)) - to_db(full.values(j))) < 0.1);
}

}
