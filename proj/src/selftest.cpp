#include "ddmod/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "ddmod/drufmc.hpp"
#include "ddmod/harness.hpp"
#include "ddmod/metrics.hpp"
#include "ddmod/otfs.hpp"

namespace ddmod {

namespace {

ModemConfig small_config() {
    ModemConfig cfg;
    cfg.subcarriers = 8;
    cfg.symbols = 4;
    cfg.oversampling = 2;
    cfg.subband_size = 4;
    cfg.filter_length = 4;
    cfg.filter_attenuation_db = 40.0;
    cfg.cp_duration_s = 3.0e-6;
    return cfg;
}

std::string fmt(const char* label, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
    return buf;
}

// Effective channel measured column by column through the sample-level chain.
ComplexMatrix probe(const std::function<ComplexMatrix(const ComplexMatrix&)>& chain, int k, int n) {
    ComplexMatrix out(k * n, k * n);
    for (int j = 0; j < k * n; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(k, n);
        e(j) = 1.0;
        out.col(j) = chain(e).reshaped();
    }
    return out;
}

SelftestCheck check_sfft_roundtrip() {
    const ModemBasis basis(small_config());
    const ComplexMatrix x = qpsk_grid(8, 4, 11);
    const double err = (basis.sfft(basis.isfft(x)) - x).norm();
    return {"sfft_roundtrip", err < 1e-12, fmt("error", err)};
}

SelftestCheck check_chebyshev() {
    const auto g = chebyshev_window(16, 60.0);
    const int grid = 4096;
    double main = 0.0;
    std::vector<double> mag(grid);
    for (int f = 0; f < grid; ++f) {
        cplx acc = 0.0;
        for (int t = 0; t < 16; ++t) acc += g.taps[t] * std::polar(1.0, -2.0 * kPi * f * t / grid);
        mag[f] = std::abs(acc);
        main = std::max(main, mag[f]);
    }
    // Walk down the main lobe to the first null, then take the largest side lobe.
    int f = 0;
    while (f + 1 < grid / 2 && mag[f + 1] < mag[f]) ++f;
    double side = 0.0;
    for (int i = f; i <= grid - f; ++i) side = std::max(side, mag[i % grid]);
    const double level = 20.0 * std::log10(side / main);
    return {"chebyshev_sidelobe", std::abs(level + 60.0) < 0.5, fmt("sidelobe dB", level)};
}

SelftestCheck check_otfs_ideal() {
    const ModemConfig cfg = small_config();
    const ModemBasis basis(cfg);
    const auto chan = channel_matrices(ideal_paths(), cfg, true);
    const ComplexMatrix x = qpsk_grid(8, 4, 5);
    const ComplexMatrix y = otfs_demodulate(otfs_apply_channel(otfs_modulate(x, basis), chan, 1.0, 0.0, 1), basis);
    const double err = (y - x).norm();
    return {"otfs_ideal_loopback", err < 1e-10, fmt("error", err)};
}

SelftestCheck check_otfs_psi() {
    const ModemConfig cfg = small_config();
    const ModemBasis basis(cfg);
    const auto paths = sample_eva_paths(7, kmh_to_mps(500.0), cfg.carrier_hz);
    const auto chan = channel_matrices(paths, cfg, true);
    const ComplexMatrix psi = otfs_effective_channel(chan, basis).matrix;
    const ComplexMatrix measured = probe(
        [&](const ComplexMatrix& x) {
            return otfs_demodulate(otfs_apply_channel(otfs_modulate(x, basis), chan, 1.0, 0.0, 1), basis);
        },
        8, 4);
    const double err = (psi - measured).norm() / measured.norm();
    return {"otfs_effective_channel", err < 1e-10, fmt("relative error", err)};
}

SelftestCheck check_drufmc_psi() {
    const ModemConfig cfg = small_config();
    const UfmcBasis ub(cfg);
    const auto paths = sample_eva_paths(9, kmh_to_mps(500.0), cfg.carrier_hz);
    const auto chan = channel_matrices(paths, cfg, false);
    const ComplexMatrix psi = drufmc_effective_channel(chan, ub).matrix;
    const ComplexMatrix measured = probe(
        [&](const ComplexMatrix& x) {
            return drufmc_demodulate(drufmc_apply_channel(drufmc_modulate(x, ub), chan, 1.0, 0.0, 1), ub.basis());
        },
        8, 4);
    const double err = (psi - measured).norm() / measured.norm();
    return {"drufmc_effective_channel", err < 1e-10, fmt("relative error", err)};
}

SelftestCheck check_drufmc_matrix_form() {
    const UfmcBasis ub(small_config());
    const ComplexMatrix x = qpsk_grid(8, 4, 3);
    const double err = (drufmc_modulate(x, ub) - drufmc_modulate_matrix(x, ub)).norm();
    return {"drufmc_matrix_transmitter", err < 1e-10, fmt("error", err)};
}

SelftestCheck check_mmse_sinr() {
    const ComplexMatrix c = qpsk_grid(8, 8, 21) + 0.5 * ComplexMatrix::Identity(8, 8);
    const double s2 = 0.1;
    const SinrMap map = sinr_map(c, s2, 4, 2);
    const ComplexMatrix r_inv = (c * c.adjoint() + s2 * ComplexMatrix::Identity(8, 8)).inverse();
    double worst = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double a = (c.col(j).adjoint() * r_inv * c.col(j))(0, 0).real();
        worst = std::max(worst, std::abs(map.values(j) - a / (1.0 - a)) / (a / (1.0 - a)));
    }
    return {"mmse_sinr", worst < 1e-9, fmt("relative error", worst)};
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
    const std::function<SelftestCheck()> checks[] = {
        check_sfft_roundtrip, check_chebyshev,           check_otfs_ideal, check_otfs_psi,
        check_drufmc_psi,     check_drufmc_matrix_form, check_mmse_sinr,
    };
    std::vector<SelftestCheck> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c());
        } catch (const std::exception& e) {
            out.push_back({"exception", false, e.what()});
        }
    }
    return out;
}

}  // namespace ddmod
