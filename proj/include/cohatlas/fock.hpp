// fock.hpp - Truncated Fock space: mode specs, states, ladder and quadrature operators
//
// Conventions: hbar = 1, a = (Q + iP)/sqrt(2) so that [a, a^dag] = 1. Each mode is
// truncated to occupations 0..cutoff; multi-mode states are indexed with mode 0 as
// the slowest-varying digit.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cohatlas {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

struct ModeSpec {
    int n_modes = 1;
    int cutoff = 1;
    std::size_t dimension_cap = kDefaultDimensionCap;

    // Throws ValidationError on n_modes < 1, cutoff < 1 or (cutoff+1)^n_modes > cap.
    static ModeSpec make(int n_modes, int cutoff, std::size_t cap = kDefaultDimensionCap);
    void validate() const;

    int levels() const { return cutoff + 1; }
    std::size_t dimension() const;

    std::vector<int> occupations(std::size_t index) const;
    std::size_t index_of(std::span<const int> occupations) const;
    // True when every mode's occupation at `index` is <= max_level.
    bool within_levels(std::size_t index, int max_level) const;

    friend bool operator==(const ModeSpec& a, const ModeSpec& b) {
        return a.n_modes == b.n_modes && a.cutoff == b.cutoff;
    }
};

struct FockVector {
    Vector amplitudes;
    ModeSpec spec;
    bool normalized = false;

    double norm() const { return amplitudes.norm(); }
    Complex operator[](std::size_t i) const { return amplitudes(static_cast<Eigen::Index>(i)); }
};

struct OperatorMatrix {
    Matrix entries;
    ModeSpec spec;

    OperatorMatrix adjoint() const { return {entries.adjoint(), spec}; }
    FockVector apply(const FockVector& v) const;
};

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex s, const OperatorMatrix& a);

struct Ladder {
    OperatorMatrix a;
    OperatorMatrix a_dag;
};

struct Quadratures {
    OperatorMatrix q;
    OperatorMatrix p;
};

FockVector basis_state(const ModeSpec& spec, std::span<const int> occupations);
FockVector vacuum(const ModeSpec& spec);
OperatorMatrix identity(const ModeSpec& spec);

// Single-mode ladder block of size (cutoff+1): a|k> = sqrt(k)|k-1>.
Matrix single_mode_annihilator(int cutoff);

Ladder make_ladder(const ModeSpec& spec, int mode);
Quadratures make_quadratures(const ModeSpec& spec, int mode);

// AB - BA. Throws ValidationError on dimension mismatch.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

// Kronecker product of one (cutoff+1)-square block per mode, mode 0 slowest.
OperatorMatrix tensor_embed(const ModeSpec& spec, std::span<const Matrix> single_mode_ops);

// Sub-block on indices whose occupations are all <= max_level.
Matrix restrict_to_levels(const Matrix& m, const ModeSpec& spec, int max_level);

double max_abs(const Matrix& m);

} // namespace cohatlas
