#include "ddmod/metrics.hpp"

#include <cmath>
#include <limits>

#include "ddmod/error.hpp"

namespace ddmod {

namespace {

Eigen::LLT<ComplexMatrix> regularised_gram(const ComplexMatrix& c, double noise_var) {
    require(c.rows() == c.cols(), ErrorCode::DimensionMismatch, "mmse: C must be square");
    require(noise_var >= 0.0, ErrorCode::InvalidArgument, "mmse: noise variance must be >= 0");
    ComplexMatrix gram = ComplexMatrix::Identity(c.rows(), c.rows()) * noise_var;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(c);
    Eigen::LLT<ComplexMatrix> llt(gram);
    if (llt.info() != Eigen::Success) fail(ErrorCode::IllConditioned, "mmse: C C^H + s2 I is singular");
    if (gram.rows() > 0) {
        const auto pivots = llt.matrixLLT().diagonal().real().cwiseAbs2().eval();
        const double tiny = 64.0 * std::numeric_limits<double>::epsilon() * pivots.maxCoeff();
        if (!(pivots.minCoeff() > tiny)) fail(ErrorCode::IllConditioned, "mmse: C C^H + s2 I is numerically singular");
    }
    return llt;
}

}  // namespace

ComplexMatrix mmse_filters(const ComplexMatrix& c, double noise_var) {
    return regularised_gram(c, noise_var).solve(c);
}

ComplexVector mmse_detect(const ComplexMatrix& c, const ComplexVector& y, double noise_var) {
    require(y.size() == c.rows(), ErrorCode::DimensionMismatch, "mmse_detect: |y| must match C");
    const ComplexVector z = regularised_gram(c, noise_var).solve(y);
    return c.adjoint() * z;
}

SinrMap sinr_map(const ComplexMatrix& c, double noise_var, int subcarriers, int symbols) {
    require(c.cols() == static_cast<Eigen::Index>(subcarriers) * symbols, ErrorCode::DimensionMismatch,
            "sinr_map: C must have K N columns");
    const ComplexMatrix d = mmse_filters(c, noise_var);
    // Row j of G is d_j^H C.
    const ComplexMatrix g = d.adjoint() * c;
    const RealVector row_energy = g.cwiseAbs2().rowwise().sum();
    const RealVector d_norm = d.colwise().squaredNorm().transpose();

    SinrMap map;
    map.values.resize(subcarriers, symbols);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        const double signal = std::norm(g(j, j));
        const double denom = row_energy(j) - signal + noise_var * d_norm(j);
        map.values(j % subcarriers, j / subcarriers) =
            denom > 0.0 ? signal / denom : (signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    return map;
}

namespace {

void check_guard(const SinrMap& map, int guard) {
    require(guard >= 0 && 2 * guard < map.subcarriers(), ErrorCode::InvalidGuard,
            "guard count must satisfy 0 <= 2 N_G < K");
}

}  // namespace

double net_sinr(const SinrMap& map, int guard) {
    check_guard(map, guard);
    const int k = map.subcarriers();
    const auto inner = map.values.middleRows(guard, k - 2 * guard);
    return inner.sum() / static_cast<double>(inner.size());
}

double net_sinr_db(const SinrMap& map, int guard) {
    return to_db(net_sinr(map, guard));
}

double avg_spectral_efficiency(const SinrMap& map, double efficiency, int guard) {
    check_guard(map, guard);
    const int k = map.subcarriers();
    double acc = 0.0;
    for (int n = 0; n < map.symbols(); ++n) {
        for (int kk = guard; kk < k - guard; ++kk) acc += std::log2(1.0 + map.values(kk, n));
    }
    return efficiency * acc / (static_cast<double>(k) * map.symbols());
}

double normalized_mse(const ComplexVector& estimate, const ComplexVector& reference) {
    require(estimate.size() == reference.size(), ErrorCode::DimensionMismatch,
            "normalized_mse: lengths differ");
    const double ref = reference.squaredNorm();
    require(ref > 0.0, ErrorCode::ZeroReference, "normalized_mse: reference has zero energy");
    return (estimate - reference).squaredNorm() / ref;
}

double otfs_efficiency(const ModemConfig& cfg) {
    const double t = cfg.symbol_interval_s();
    return t / (t + cfg.cp_duration_s);
}

}  // namespace ddmod
