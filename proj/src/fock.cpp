// fock.cpp - Truncated Fock-space operators

#include "cohatlas/fock.hpp"

#include "cohatlas/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace cohatlas {

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
    if (a.entries.rows() != b.entries.rows() || a.entries.cols() != b.entries.cols()) {
        throw ValidationError(std::string(what) + ": dimension mismatch");
    }
}

void require_mode(const ModeSpec& spec, int mode) {
    spec.validate();
    if (mode < 0 || mode >= spec.n_modes) {
        throw ValidationError("mode index " + std::to_string(mode) + " out of range [0, " +
                              std::to_string(spec.n_modes) + ")");
    }
}

} // namespace

ModeSpec ModeSpec::make(int n_modes, int cutoff, std::size_t cap) {
    ModeSpec spec{n_modes, cutoff, cap};
    spec.validate();
    return spec;
}

void ModeSpec::validate() const {
    if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
    if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
    std::size_t dim = 1;
    for (int l = 0; l < n_modes; ++l) {
        dim *= static_cast<std::size_t>(levels());
        if (dim > dimension_cap) {
            throw ValidationError("Fock dimension (" + std::to_string(cutoff) + "+1)^" +
                                  std::to_string(n_modes) + " exceeds cap " +
                                  std::to_string(dimension_cap));
        }
    }
}

std::size_t ModeSpec::dimension() const {
    std::size_t dim = 1;
    for (int l = 0; l < n_modes; ++l) dim *= static_cast<std::size_t>(levels());
    return dim;
}

std::vector<int> ModeSpec::occupations(std::size_t index) const {
    std::vector<int> occ(static_cast<std::size_t>(n_modes));
    for (int l = n_modes - 1; l >= 0; --l) {
        occ[static_cast<std::size_t>(l)] = static_cast<int>(index % static_cast<std::size_t>(levels()));
        index /= static_cast<std::size_t>(levels());
    }
    return occ;
}

std::size_t ModeSpec::index_of(std::span<const int> occ) const {
    if (occ.size() != static_cast<std::size_t>(n_modes)) {
        throw ValidationError("occupation list length does not match n_modes");
    }
    std::size_t index = 0;
    for (int k : occ) {
        if (k < 0 || k > cutoff) throw ValidationError("occupation out of range");
        index = index * static_cast<std::size_t>(levels()) + static_cast<std::size_t>(k);
    }
    return index;
}

bool ModeSpec::within_levels(std::size_t index, int max_level) const {
    for (int l = 0; l < n_modes; ++l) {
        if (static_cast<int>(index % static_cast<std::size_t>(levels())) > max_level) return false;
        index /= static_cast<std::size_t>(levels());
    }
    return true;
}

FockVector OperatorMatrix::apply(const FockVector& v) const {
    if (v.amplitudes.size() != entries.cols()) {
        throw ValidationError("apply: vector length does not match operator dimension");
    }
    return {entries * v.amplitudes, spec, false};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "operator product");
    return {a.entries * b.entries, a.spec};
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "operator sum");
    return {a.entries + b.entries, a.spec};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "operator difference");
    return {a.entries - b.entries, a.spec};
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
    return {s * a.entries, a.spec};
}

FockVector basis_state(const ModeSpec& spec, std::span<const int> occupations) {
    spec.validate();
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    FockVector v{Vector::Zero(dim), spec, true};
    v.amplitudes(static_cast<Eigen::Index>(spec.index_of(occupations))) = 1.0;
    return v;
}

FockVector vacuum(const ModeSpec& spec) {
    std::vector<int> zeros(static_cast<std::size_t>(spec.n_modes), 0);
    return basis_state(spec, zeros);
}

OperatorMatrix identity(const ModeSpec& spec) {
    spec.validate();
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    return {Matrix::Identity(dim, dim), spec};
}

Matrix single_mode_annihilator(int cutoff) {
    if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
    Matrix a = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int k = 1; k <= cutoff; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

Ladder make_ladder(const ModeSpec& spec, int mode) {
    require_mode(spec, mode);
    const Matrix one = Matrix::Identity(spec.levels(), spec.levels());
    std::vector<Matrix> factors(static_cast<std::size_t>(spec.n_modes), one);
    factors[static_cast<std::size_t>(mode)] = single_mode_annihilator(spec.cutoff);
    OperatorMatrix a = tensor_embed(spec, factors);
    OperatorMatrix a_dag = a.adjoint();
    return {std::move(a), std::move(a_dag)};
}

Quadratures make_quadratures(const ModeSpec& spec, int mode) {
    const Ladder ladder = make_ladder(spec, mode);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex minus_i{0.0, -1.0};
    OperatorMatrix q{(ladder.a.entries + ladder.a_dag.entries) * inv_sqrt2, spec};
    OperatorMatrix p{(ladder.a.entries - ladder.a_dag.entries) * (minus_i * inv_sqrt2), spec};
    return {std::move(q), std::move(p)};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "commutator");
    return {a.entries * b.entries - b.entries * a.entries, a.spec};
}

OperatorMatrix tensor_embed(const ModeSpec& spec, std::span<const Matrix> single_mode_ops) {
    spec.validate();
    if (single_mode_ops.size() != static_cast<std::size_t>(spec.n_modes)) {
        throw ValidationError("tensor_embed: expected " + std::to_string(spec.n_modes) +
                              " single-mode operators, got " +
                              std::to_string(single_mode_ops.size()));
    }
    for (const Matrix& op : single_mode_ops) {
        if (op.rows() != spec.levels() || op.cols() != spec.levels()) {
            throw ValidationError("tensor_embed: single-mode operator must be (cutoff+1)-square");
        }
    }
    Matrix result = single_mode_ops.front();
    for (std::size_t l = 1; l < single_mode_ops.size(); ++l) {
        Matrix next = Eigen::kroneckerProduct(result, single_mode_ops[l]).eval();
        result = std::move(next);
    }
    return {std::move(result), spec};
}

Matrix restrict_to_levels(const Matrix& m, const ModeSpec& spec, int max_level) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
        if (spec.within_levels(i, max_level)) keep.push_back(static_cast<Eigen::Index>(i));
    }
    const auto k = static_cast<Eigen::Index>(keep.size());
    Matrix out(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) out(r, c) = m(keep[r], keep[c]);
    }
    return out;
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace cohatlas
