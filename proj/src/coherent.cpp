// coherent.cpp - Coherent states and the resolution of unity

#include "cohatlas/coherent.hpp"

#include "cohatlas/errors.hpp"
#include "cohatlas/quadrature.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace cohatlas {

namespace {

void require_label_size(const CoherentLabel& label, const ModeSpec& spec) {
    if (label.z.size() != static_cast<std::size_t>(spec.n_modes)) {
        throw ValidationError("coherent label has " + std::to_string(label.z.size()) +
                              " components, mode spec has " + std::to_string(spec.n_modes));
    }
}

Vector to_vector(const std::vector<Complex>& v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

// z^k/sqrt(k!) scaled by exp(log_scale), k = 0..cutoff.
void scaled_powers(Complex z, int cutoff, double log_scale, Eigen::Ref<Vector> out) {
    Complex c = std::exp(log_scale);
    out(0) = c;
    for (int k = 1; k <= cutoff; ++k) {
        c *= z / std::sqrt(static_cast<double>(k));
        out(k) = c;
    }
}

// Gram matrix sum_i w_i v_i v_i^dag of one mode's family over the 2D grid.
Matrix single_mode_gram(const QuadratureGrid& grid, int cutoff, const PolyMap* map, int mode, int n_modes) {
    const int levels = cutoff + 1;
    const auto count = static_cast<Eigen::Index>(grid.node_count());
    Matrix columns(levels, count);
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::Index col = 0;
    std::vector<Complex> point(static_cast<std::size_t>(n_modes), 0.0);
    for (std::size_t i = 0; i < grid.radial_nodes.size(); ++i) {
        const double u = grid.radial_nodes[i];
        const double r = std::sqrt(u);
        const double log_w = 0.5 * std::log(grid.radial_weights[i] / grid.angular_count);
        for (int m = 0; m < grid.angular_count; ++m) {
            const Complex z = std::polar(r, two_pi * m / grid.angular_count);
            if (map == nullptr) {
                // Gaussian factor e^{-u} is carried by the radial weight.
                scaled_powers(z, cutoff, log_w, columns.col(col));
            } else {
                point[static_cast<std::size_t>(mode)] = z;
                const Complex g = map->evaluate(point)[static_cast<std::size_t>(mode)];
                scaled_powers(g, cutoff, log_w + 0.5 * (u - std::norm(g)), columns.col(col));
            }
            ++col;
        }
    }
    return columns * columns.adjoint();
}

Matrix product_grid_gram(const ModeSpec& spec, const QuadratureGrid& grid, const PolyMap& map) {
    const int n = spec.n_modes;
    const std::size_t per_mode = grid.node_count();
    std::size_t total = 1;
    for (int l = 0; l < n; ++l) {
        if (total > kMaxProductNodes / per_mode) {
            throw NumericalError("resolve_unity: product grid over " + std::to_string(n) +
                                 " non-separable modes exceeds " + std::to_string(kMaxProductNodes) + " nodes");
        }
        total *= per_mode;
    }
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    const double two_pi = 2.0 * std::numbers::pi;
    Matrix gram = Matrix::Zero(dim, dim);
    constexpr std::size_t kChunk = 4096;
    Matrix columns(dim, static_cast<Eigen::Index>(std::min(kChunk, total)));
    Eigen::Index filled = 0;
    std::vector<Complex> w(static_cast<std::size_t>(n));
    std::vector<Vector> factors(static_cast<std::size_t>(n), Vector(spec.levels()));
    for (std::size_t flat = 0; flat < total; ++flat) {
        double log_w = 0.0, u_sum = 0.0;
        std::size_t rest = flat;
        for (int l = n - 1; l >= 0; --l) {
            const std::size_t node = rest % per_mode;
            rest /= per_mode;
            const std::size_t ri = node / static_cast<std::size_t>(grid.angular_count);
            const auto ai = static_cast<int>(node % static_cast<std::size_t>(grid.angular_count));
            const double u = grid.radial_nodes[ri];
            u_sum += u;
            log_w += 0.5 * std::log(grid.radial_weights[ri] / grid.angular_count);
            w[static_cast<std::size_t>(l)] = std::polar(std::sqrt(u), two_pi * ai / grid.angular_count);
        }
        const auto g = map.evaluate(w);
        double g_sq = 0.0;
        for (const Complex& gl : g) g_sq += std::norm(gl);
        for (int l = 0; l < n; ++l) {
            const double scale = l == 0 ? log_w + 0.5 * (u_sum - g_sq) : 0.0;
            scaled_powers(g[static_cast<std::size_t>(l)], spec.cutoff, scale, factors[static_cast<std::size_t>(l)]);
        }
        Vector v = factors[0];
        for (int l = 1; l < n; ++l) v = Eigen::kroneckerProduct(v, factors[static_cast<std::size_t>(l)]).eval();
        columns.col(filled++) = v;
        if (filled == columns.cols() || flat + 1 == total) {
            gram.noalias() += columns.leftCols(filled) * columns.leftCols(filled).adjoint();
            filled = 0;
        }
    }
    return gram;
}

} // namespace

void validate_label(const CoherentLabel& label, const ModeSpec& spec, double radius_bound) {
    require_label_size(label, spec);
    for (const Complex& z : label.z) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ValidationError("coherent label has a non-finite component");
        }
        if (std::abs(z) > radius_bound) {
            throw ValidationError("coherent label |z| = " + std::to_string(std::abs(z)) +
                                  " exceeds radius bound " + std::to_string(radius_bound) +
                                  "; truncation tail not certifiable");
        }
    }
}

std::vector<Complex> coherent_amplitudes(Complex z, int cutoff) {
    std::vector<Complex> amps(static_cast<std::size_t>(cutoff) + 1);
    Complex c = std::exp(-0.5 * std::norm(z));
    amps[0] = c;
    for (int k = 1; k <= cutoff; ++k) {
        c *= z / std::sqrt(static_cast<double>(k));
        amps[static_cast<std::size_t>(k)] = c;
    }
    return amps;
}

double truncation_tail_bound(Complex z, int cutoff) {
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return std::exp((cutoff + 1) * std::log(r) - 0.5 * std::lgamma(cutoff + 1.0));
}

double poisson_mass(double modulus_sq, int lo, int hi) {
    double sum = 0.0;
    for (int k = std::max(lo, 0); k <= hi; ++k) {
        if (modulus_sq == 0.0) {
            sum += k == 0 ? 1.0 : 0.0;
            continue;
        }
        sum += std::exp(k * std::log(modulus_sq) - modulus_sq - std::lgamma(k + 1.0));
    }
    return sum;
}

CoherentState coherent_vector(const CoherentLabel& label, const ModeSpec& spec, double radius_bound) {
    spec.validate();
    validate_label(label, spec, radius_bound);
    Vector v = to_vector(coherent_amplitudes(label.z.front(), spec.cutoff));
    for (std::size_t l = 1; l < label.z.size(); ++l) {
        v = Eigen::kroneckerProduct(v, to_vector(coherent_amplitudes(label.z[l], spec.cutoff))).eval();
    }
    const double mass = v.squaredNorm();
    return {FockVector{std::move(v), spec, false}, mass};
}

std::vector<double> eigen_residual(const CoherentLabel& label, const ModeSpec& spec, double radius_bound) {
    spec.validate();
    validate_label(label, spec, radius_bound);
    // (a_l - z_l)|z> vanishes except on the top level of mode l, where it is -z_l c_N(z_l);
    // the remaining modes contribute their truncated norms.
    std::vector<double> mode_norm, top;
    for (const Complex& z : label.z) {
        const auto amps = coherent_amplitudes(z, spec.cutoff);
        mode_norm.push_back(std::sqrt(poisson_mass(std::norm(z), 0, spec.cutoff)));
        top.push_back(std::abs(z) * std::abs(amps.back()));
    }
    std::vector<double> out;
    for (std::size_t l = 0; l < label.z.size(); ++l) {
        double r = top[l];
        for (std::size_t m = 0; m < label.z.size(); ++m) {
            if (m != l) r *= mode_norm[m];
        }
        out.push_back(r);
    }
    return out;
}

Complex overlap(const CoherentLabel& z1, const CoherentLabel& z2, const ModeSpec& spec, double radius_bound) {
    spec.validate();
    validate_label(z1, spec, radius_bound);
    validate_label(z2, spec, radius_bound);
    Complex result = 1.0;
    for (std::size_t l = 0; l < z1.z.size(); ++l) {
        const auto a = coherent_amplitudes(z1.z[l], spec.cutoff);
        const auto b = coherent_amplitudes(z2.z[l], spec.cutoff);
        Complex s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
        result *= s;
    }
    return result;
}

Complex overlap_closed_form(const CoherentLabel& z1, const CoherentLabel& z2) {
    if (z1.z.size() != z2.z.size()) throw ValidationError("overlap_closed_form: label size mismatch");
    Complex exponent = 0.0;
    for (std::size_t l = 0; l < z1.z.size(); ++l) {
        exponent += std::conj(z1.z[l]) * z2.z[l] - 0.5 * std::norm(z1.z[l]) - 0.5 * std::norm(z2.z[l]);
    }
    return std::exp(exponent);
}

QuadratureGrid QuadratureGrid::make(int radial_order, int angular_count, double radius_cut) {
    if (radial_order < 1) throw ValidationError("quadrature grid: radial order must be >= 1");
    if (angular_count < 4) throw ValidationError("quadrature grid: angular count must be >= 4");
    if (!(radius_cut > 0.0) || !std::isfinite(radius_cut)) {
        throw ValidationError("quadrature grid: radius_cut must be positive");
    }
    const GaussRule rule = truncated_laguerre(radial_order, radius_cut * radius_cut);
    QuadratureGrid grid{rule.nodes, rule.weights, angular_count, radius_cut};
    grid.validate();
    return grid;
}

void QuadratureGrid::validate() const {
    if (radial_nodes.empty() || radial_nodes.size() != radial_weights.size()) {
        throw ValidationError("quadrature grid: radial nodes and weights must be nonempty and paired");
    }
    if (angular_count < 4) throw ValidationError("quadrature grid: angular count must be >= 4");
    if (!(radius_cut > 0.0)) throw ValidationError("quadrature grid: radius_cut must be positive");
    for (std::size_t i = 0; i < radial_nodes.size(); ++i) {
        if (!(radial_weights[i] > 0.0)) throw ValidationError("quadrature grid: weights must be positive");
        if (!(radial_nodes[i] >= 0.0 && radial_nodes[i] <= radius_cut * radius_cut)) {
            throw ValidationError("quadrature grid: node outside radius_cut");
        }
    }
}

UnityResidual resolve_unity(const ModeSpec& spec, const QuadratureGrid& grid, const StateFamily& family,
                            std::optional<double> tolerance) {
    spec.validate();
    grid.validate();
    const PolyMap* map = nullptr;
    if (family.kind == StateFamily::Kind::Transported) {
        if (!family.map) throw ValidationError("resolve_unity: transported family needs a map");
        if (family.map->n_modes() != spec.n_modes) throw ValidationError("resolve_unity: map n_modes mismatch");
        map = &*family.map;
    }

    Matrix s;
    if (map == nullptr || map->mode_separable()) {
        s = single_mode_gram(grid, spec.cutoff, map, 0, spec.n_modes);
        for (int l = 1; l < spec.n_modes; ++l) {
            s = Eigen::kroneckerProduct(s, single_mode_gram(grid, spec.cutoff, map, l, spec.n_modes)).eval();
        }
    } else {
        s = product_grid_gram(spec, grid, *map);
    }

    UnityResidual out;
    out.reliable_level = spec.cutoff / 2;
    out.nodes_evaluated = grid.node_count();
    const Matrix block = restrict_to_levels(s, spec, out.reliable_level);
    out.residual = block - Matrix::Identity(block.rows(), block.cols());
    out.max_norm = max_abs(out.residual);
    if (tolerance && family.kind == StateFamily::Kind::Coherent && !(out.max_norm <= *tolerance)) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "resolve_unity: residual %.6e exceeds tolerance %.6e (grid too coarse)",
                      out.max_norm, *tolerance);
        throw QuadratureError(msg, out.max_norm);
    }
    return out;
}

} // namespace cohatlas
