#include "smcm/gsc_core.hpp"

#include <cmath>
#include <string>

namespace smcm {

std::string_view to_string(BlockingKind kind) {
    return kind == BlockingKind::Css ? "css" : "nullspace";
}

BlockingKind blocking_kind_from_string(std::string_view name) {
    if (name == "css") return BlockingKind::Css;
    if (name == "nullspace") return BlockingKind::Nullspace;
    throw Error(ErrorKind::Config, "unknown blocking kind '" + std::string(name) + "'");
}

namespace {

void require_unit(const CVector& a0) {
    if (a0.size() < 1 || std::abs(a0.norm() - 1.0) > 1e-10) {
        throw Error(ErrorKind::InvalidSteering, "look-direction steering vector must have unit norm");
    }
}

}  // namespace

BlockingMatrix blocking_css(const CVector& a0) {
    require_unit(a0);
    const auto m = a0.size();
    return {CMatrix::Identity(m, m) - a0 * a0.adjoint(), BlockingKind::Css};
}

BlockingMatrix blocking_nullspace(const CVector& a0) {
    require_unit(a0);
    const auto m = a0.size();
    // Householder QR of a0: the trailing m-1 columns of Q are an orthonormal
    // basis of the complement of span{a0}.
    Eigen::HouseholderQR<CMatrix> qr{CMatrix(a0)};
    const CMatrix Q = qr.householderQ() * CMatrix::Identity(m, m);
    BlockingMatrix B;
    B.kind = BlockingKind::Nullspace;
    B.matrix = Q.rightCols(m - 1).adjoint();
    return B;
}

BlockingMatrix make_blocking(BlockingKind kind, const CVector& a0) {
    return kind == BlockingKind::Css ? blocking_css(a0) : blocking_nullspace(a0);
}

GscState GscState::with_unit_start(double v, const CVector& a0, BlockingMatrix blocking) {
    GscState s = with_zero_start(v, a0, std::move(blocking));
    s.w[0] = 1.0;
    return s;
}

GscState GscState::with_zero_start(double v, const CVector& a0, BlockingMatrix blocking) {
    GscState s;
    s.v = v;
    s.a0 = a0;
    s.w = CVector::Zero(blocking.rows());
    s.blocking = std::move(blocking);
    return s;
}

CVector effective_weights(const GscState& state) {
    const auto& B = state.blocking.matrix;
    if (B.cols() != state.a0.size() || B.rows() != state.w.size()) {
        throw Error(ErrorKind::InvalidState, "GSC dimensions are inconsistent");
    }
    return state.v * state.a0 - B.adjoint() * state.w;
}

Complex gsc_output(const CVector& w_tilde, const CVector& r) {
    if (w_tilde.size() != r.size()) throw Error(ErrorKind::InvalidState, "weight/snapshot length mismatch");
    return w_tilde.dot(r);  // Eigen's dot conjugates the left operand
}

}  // namespace smcm
