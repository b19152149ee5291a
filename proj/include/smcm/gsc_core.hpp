#pragma once

#include <string_view>

#include "smcm/common.hpp"

namespace smcm {

enum class BlockingKind { Css, Nullspace };

std::string_view to_string(BlockingKind kind);
BlockingKind blocking_kind_from_string(std::string_view name);

/// Signal blocking matrix with B a0 = 0.
///
/// The CSS form is the m x m projector I - a0 a0^H; the null-space form has
/// m-1 orthonormal rows spanning the complement of a0. Code that needs the
/// auxiliary dimension uses rows() rather than assuming m-1.
struct BlockingMatrix {
    CMatrix matrix;
    BlockingKind kind = BlockingKind::Css;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index cols() const { return matrix.cols(); }
};

BlockingMatrix blocking_css(const CVector& a0);
BlockingMatrix blocking_nullspace(const CVector& a0);
BlockingMatrix make_blocking(BlockingKind kind, const CVector& a0);

/// GSC weights: main branch v a0, auxiliary branch B^H w.
struct GscState {
    double v = 1.0;
    CVector a0;
    BlockingMatrix blocking;
    CVector w;

    /// w = [1, 0, ..., 0]^T, the usual starting point for the adaptive runs.
    static GscState with_unit_start(double v, const CVector& a0, BlockingMatrix blocking);
    static GscState with_zero_start(double v, const CVector& a0, BlockingMatrix blocking);
};

/// w~ = v a0 - B^H w. Satisfies w~^H a0 = v.
CVector effective_weights(const GscState& state);

/// y = w~^H r.
Complex gsc_output(const CVector& w_tilde, const CVector& r);

/// e = |y|^2 - 1.
inline double prediction_error(Complex y) { return std::norm(y) - 1.0; }

}  // namespace smcm
