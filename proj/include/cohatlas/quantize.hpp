// quantize.hpp - Normal-ordered quantization of PolyMaps and vacuum/coherence diagnostics
//
// A classical monomial w^j wbar^k becomes (a^dag)^k a^j, creators left of annihilators.

#pragma once

#include "cohatlas/coherent.hpp"
#include "cohatlas/fock.hpp"
#include "cohatlas/phase_space.hpp"

#include <vector>

namespace cohatlas {

struct NormalOrderedTerm {
    Complex coefficient;
    std::vector<int> creators;     // power of a_l^dag per mode
    std::vector<int> annihilators; // power of a_l per mode

    int degree() const;
};

class NormalOrderedPoly {
public:
    NormalOrderedPoly() = default;
    NormalOrderedPoly(int n_modes, int max_degree);

    void add_term(int mode, Complex coefficient, std::vector<int> creators, std::vector<int> annihilators);

    int n_modes() const { return static_cast<int>(outputs_.size()); }
    int max_degree() const { return max_degree_; }
    int degree() const;
    const std::vector<NormalOrderedTerm>& terms(int mode) const { return outputs_.at(static_cast<std::size_t>(mode)); }

    friend bool operator==(const NormalOrderedPoly& a, const NormalOrderedPoly& b);

private:
    int max_degree_ = kDefaultMaxDegree;
    std::vector<std::vector<NormalOrderedTerm>> outputs_;
};

NormalOrderedPoly operator+(const NormalOrderedPoly& a, const NormalOrderedPoly& b);
NormalOrderedPoly operator*(Complex s, const NormalOrderedPoly& p);

NormalOrderedPoly normal_order_quantize(const PolyMap& map);

// One operator G_l per output mode. Exact on levels <= cutoff - degree.
// Throws DegreeError when degree > cutoff.
std::vector<OperatorMatrix> realize(const NormalOrderedPoly& nop, const ModeSpec& spec);
std::vector<OperatorMatrix> realize(const PolyMap& map, const ModeSpec& spec);

// ||G|0>|| with |0> the unprimed Fock vacuum.
double vacuum_residual(const OperatorMatrix& g);
// sqrt(sum_l ||G_l|0>||^2).
double vacuum_residual(const std::vector<OperatorMatrix>& g);

struct PrimedVacuum {
    FockVector state;            // unit vector, phase fixed so the largest component is real positive
    double defect = 0.0;         // sqrt(sum_l ||G_l v||^2)
    double vacuum_overlap = 0.0; // |<0|v>|
    bool degenerate = false;     // next admissible singular value within 1e-10
    int skipped_artifacts = 0;   // singular directions rejected as top-band truncation artifacts
};

// Smallest singular direction of the stacked operators, skipping directions with more
// than half their weight on levels above cutoff - band (pure truncation artifacts).
PrimedVacuum primed_vacuum(const std::vector<OperatorMatrix>& g, int band = 1);
PrimedVacuum primed_vacuum(const OperatorMatrix& g, int band = 1);

struct CoherenceMapReport {
    std::vector<Complex> classical_image; // w' = g(w, wbar)
    std::vector<double> residual;         // ||(G_l - w'_l)|w>|| per mode
    std::vector<double> transport_bound;  // truncation bound for the holomorphic part
    double max_residual = 0.0;
};

CoherenceMapReport coherence_map_test(const PolyMap& map, const CoherentLabel& label, const ModeSpec& spec,
                                      double radius_bound = kDefaultRadiusBound);

// ||(G_l - w'_l) D'(w')|0'>|| with D'(w') = exp(sum_l w'_l G_l^dag - conj(w'_l) G_l)
// and |0'> = primed_vacuum(G): the primed-family counterpart of coherence_map_test.
std::vector<double> primed_coherent_residual(const PolyMap& map, const CoherentLabel& label, const ModeSpec& spec,
                                             double radius_bound = kDefaultRadiusBound);

// Upper bound on ||(F_l(a) - f_l(z))|z>_N|| for the holomorphic part of the map:
// sum over terms |c| prod_m |z_m|^{j_m} * sum_m ||P_{> N - j_m}|z_m>||.
std::vector<double> holomorphic_transport_bound(const PolyMap& map, const CoherentLabel& label, int cutoff);

// max_{j,k} ||[G_j, G_k^dag] - delta_jk||_max on levels <= cutoff/2.
double commutator_diagnostic(const PolyMap& map, const ModeSpec& spec);

} // namespace cohatlas
