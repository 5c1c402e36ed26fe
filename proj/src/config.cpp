#include "ddmod/config.hpp"

#include <cmath>

#include "ddmod/error.hpp"

namespace ddmod {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSize: return "invalid-size";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::InvalidAttenuation: return "invalid-attenuation";
        case ErrorCode::IndexOutOfRange: return "index-out-of-range";
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::DelayExceedsSpan: return "delay-exceeds-span";
        case ErrorCode::IllConditioned: return "ill-conditioned";
        case ErrorCode::InvalidGuard: return "invalid-guard";
        case ErrorCode::ZeroReference: return "zero-reference";
        case ErrorCode::NotAchievable: return "not-achievable";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::ConstraintViolation: return "constraint-violation";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

const char* to_string(PulseShape p) noexcept {
    return p == PulseShape::Ideal ? "ideal" : "rrc";
}

const char* to_string(TimeIndexing t) noexcept {
    return t == TimeIndexing::AsWritten ? "as_written" : "absolute";
}

int ModemConfig::cp_samples() const {
    return static_cast<int>(std::lround(cp_duration_s / sample_period_s()));
}

double ModemConfig::sample_period_s() const {
    return 1.0 / (subcarriers * subcarrier_spacing_hz * oversampling);
}

void ModemConfig::validate() const {
    auto check = [](bool ok, const char* what) {
        if (!ok) fail(ErrorCode::ConstraintViolation, what);
    };
    check(subcarriers >= 2 && subcarriers % 2 == 0, "K must be even and >= 2");
    check(symbols >= 1, "N >= 1");
    check(oversampling >= 1, "O_s >= 1");
    check(subband_size >= 1, "D >= 1");
    check(subcarriers % subband_size == 0, "K = B·D");
    check(filter_length >= 1, "L >= 1");
    check(filter_attenuation_db > 0, "A_dB > 0");
    check(subcarrier_spacing_hz > 0, "subcarrier spacing > 0");
    check(carrier_hz > 0, "f_c > 0");
    check(tx_power > 0, "P_T > 0");
    check(cp_duration_s >= 0, "T_CP >= 0");
    check(cp_samples() <= samples_per_symbol(), "N_CP <= K·O_s");
}

ModemConfig desk_config() {
    ModemConfig c;
    c.subcarriers = 32;
    c.symbols = 8;
    c.oversampling = 4;
    c.subband_size = 8;
    c.filter_length = 16;
    return c;
}

}  // namespace ddmod
