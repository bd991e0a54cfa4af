// coherent.hpp - Truncated coherent states, overlaps, eigen-residuals and the
// quadrature resolution of unity over disks in each complex coordinate plane.

#pragma once

#include "cohatlas/fock.hpp"
#include "cohatlas/phase_space.hpp"

#include <optional>
#include <vector>

namespace cohatlas {

inline constexpr double kDefaultRadiusBound = 6.0;

struct CoherentLabel {
    std::vector<Complex> z; // one entry per mode
};

// Throws ValidationError on size mismatch, non-finite entries or |z_l| > radius_bound.
void validate_label(const CoherentLabel& label, const ModeSpec& spec,
                    double radius_bound = kDefaultRadiusBound);

// e^{-|z|^2/2} z^k / sqrt(k!) for k = 0..cutoff.
std::vector<Complex> coherent_amplitudes(Complex z, int cutoff);

// Rigorous bound |z|^{N+1}/sqrt(N!) on ||(a - z)|z>_N||, the truncation residual.
double truncation_tail_bound(Complex z, int cutoff);

// Probability mass e^{-|z|^2} sum_{k=lo}^{hi} |z|^{2k}/k! of the Poisson tail window.
double poisson_mass(double modulus_sq, int lo, int hi);

struct CoherentState {
    FockVector vector;     // not renormalized: component k is the exact amplitude
    double truncated_mass; // squared norm of the truncated vector, <= 1
};

CoherentState coherent_vector(const CoherentLabel& label, const ModeSpec& spec,
                              double radius_bound = kDefaultRadiusBound);

// ||(a_l - z_l)|z>|| for every mode l.
std::vector<double> eigen_residual(const CoherentLabel& label, const ModeSpec& spec,
                                   double radius_bound = kDefaultRadiusBound);

Complex overlap(const CoherentLabel& z1, const CoherentLabel& z2, const ModeSpec& spec,
                double radius_bound = kDefaultRadiusBound);
// exp(sum_l conj(z1_l) z2_l - |z1_l|^2/2 - |z2_l|^2/2), the untruncated value.
Complex overlap_closed_form(const CoherentLabel& z1, const CoherentLabel& z2);

// Radial Gauss rule in u = r^2 for the weight e^{-u} on [0, radius_cut^2], times an
// M-point uniform angular rule. Integrates against d^2z/pi on the disk |z| <= radius_cut.
struct QuadratureGrid {
    std::vector<double> radial_nodes; // u = r^2
    std::vector<double> radial_weights;
    int angular_count = 0;
    double radius_cut = 0.0;

    static QuadratureGrid make(int radial_order, int angular_count, double radius_cut);
    void validate() const;
    int radial_order() const { return static_cast<int>(radial_nodes.size()); }
    std::size_t node_count() const { return radial_nodes.size() * static_cast<std::size_t>(angular_count); }
};

inline constexpr int kDefaultRadialOrder = 64;
inline constexpr int kDefaultAngularCount = 128;
inline constexpr double kDefaultRadiusCut = 6.0;

// The integrated family z -> |psi(z)>: either the coherent states themselves or the
// coherent states at transported labels, psi(z) = |g(z, zbar)>.
struct StateFamily {
    enum class Kind { Coherent, Transported };
    Kind kind = Kind::Coherent;
    std::optional<PolyMap> map;

    static StateFamily coherent() { return {}; }
    static StateFamily transported(PolyMap g) { return {Kind::Transported, std::move(g)}; }
};

struct UnityResidual {
    Matrix residual;       // S - 1 on the reliable block
    double max_norm = 0.0; // ||S - 1||_max on that block
    int reliable_level = 0; // floor(cutoff / 2)
    std::size_t nodes_evaluated = 0;
};

inline constexpr std::size_t kMaxProductNodes = 4'000'000;

// S = integral |psi(z)><psi(z)| dmu, dmu = prod_l d^2 z_l / pi over the grid's disks.
// When `tolerance` is set and the family is coherent, a residual above it throws
// QuadratureError carrying the measured defect.
UnityResidual resolve_unity(const ModeSpec& spec, const QuadratureGrid& grid, const StateFamily& family,
                            std::optional<double> tolerance = std::nullopt);

} // namespace cohatlas
