// quantize.cpp - Normal ordering, operator realization, primed vacua and coherence tests

#include "cohatlas/quantize.hpp"

#include "cohatlas/errors.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace cohatlas {

namespace {

bool nop_less(const NormalOrderedTerm& a, const NormalOrderedTerm& b) {
    return std::tie(a.creators, a.annihilators) < std::tie(b.creators, b.annihilators);
}

// Single-mode (a^dag)^k a^j, k and j <= cutoff.
class LadderPowers {
public:
    explicit LadderPowers(int cutoff) {
        const Matrix a = single_mode_annihilator(cutoff);
        const Matrix one = Matrix::Identity(cutoff + 1, cutoff + 1);
        down_.push_back(one);
        up_.push_back(one);
        for (int e = 1; e <= cutoff; ++e) {
            down_.push_back(down_.back() * a);
            up_.push_back(up_.back() * a.adjoint());
        }
    }
    Matrix ordered(int creators, int annihilators) const {
        return up_[static_cast<std::size_t>(creators)] * down_[static_cast<std::size_t>(annihilators)];
    }

private:
    std::vector<Matrix> down_, up_;
};

double top_band_weight(const Vector& v, const ModeSpec& spec, int band) {
    const int max_level = spec.cutoff - band;
    double weight = 0.0;
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
        if (!spec.within_levels(i, max_level)) weight += std::norm(v(static_cast<Eigen::Index>(i)));
    }
    return weight;
}

} // namespace

int NormalOrderedTerm::degree() const {
    return std::accumulate(creators.begin(), creators.end(), 0) +
           std::accumulate(annihilators.begin(), annihilators.end(), 0);
}

NormalOrderedPoly::NormalOrderedPoly(int n_modes, int max_degree)
    : max_degree_(max_degree), outputs_(static_cast<std::size_t>(n_modes)) {
    if (n_modes < 1) throw ValidationError("NormalOrderedPoly: n_modes must be >= 1");
}

void NormalOrderedPoly::add_term(int mode, Complex coefficient, std::vector<int> creators,
                                 std::vector<int> annihilators) {
    if (mode < 0 || mode >= n_modes()) throw ValidationError("NormalOrderedPoly: mode out of range");
    if (creators.size() != outputs_.size() || annihilators.size() != outputs_.size()) {
        throw ValidationError("NormalOrderedPoly: power list length must equal n_modes");
    }
    NormalOrderedTerm term{coefficient, std::move(creators), std::move(annihilators)};
    if (term.degree() > max_degree_) throw ValidationError("NormalOrderedPoly: degree exceeds cap");
    auto& terms = outputs_[static_cast<std::size_t>(mode)];
    auto it = std::lower_bound(terms.begin(), terms.end(), term, nop_less);
    if (it != terms.end() && !nop_less(term, *it)) {
        it->coefficient += term.coefficient;
        if (it->coefficient == Complex{0.0, 0.0}) terms.erase(it);
    } else if (term.coefficient != Complex{0.0, 0.0}) {
        terms.insert(it, std::move(term));
    }
}

int NormalOrderedPoly::degree() const {
    int d = 0;
    for (const auto& terms : outputs_) {
        for (const auto& t : terms) d = std::max(d, t.degree());
    }
    return d;
}

bool operator==(const NormalOrderedPoly& a, const NormalOrderedPoly& b) {
    if (a.outputs_.size() != b.outputs_.size()) return false;
    for (std::size_t l = 0; l < a.outputs_.size(); ++l) {
        const auto& ta = a.outputs_[l];
        const auto& tb = b.outputs_[l];
        if (ta.size() != tb.size()) return false;
        for (std::size_t i = 0; i < ta.size(); ++i) {
            if (ta[i].coefficient != tb[i].coefficient || ta[i].creators != tb[i].creators ||
                ta[i].annihilators != tb[i].annihilators) {
                return false;
            }
        }
    }
    return true;
}

NormalOrderedPoly operator+(const NormalOrderedPoly& a, const NormalOrderedPoly& b) {
    if (a.n_modes() != b.n_modes()) throw ValidationError("NormalOrderedPoly sum: n_modes mismatch");
    NormalOrderedPoly out(a.n_modes(), std::max(a.max_degree(), b.max_degree()));
    for (const NormalOrderedPoly* src : {&a, &b}) {
        for (int l = 0; l < src->n_modes(); ++l) {
            for (const auto& t : src->terms(l)) out.add_term(l, t.coefficient, t.creators, t.annihilators);
        }
    }
    return out;
}

NormalOrderedPoly operator*(Complex s, const NormalOrderedPoly& p) {
    NormalOrderedPoly out(p.n_modes(), p.max_degree());
    for (int l = 0; l < p.n_modes(); ++l) {
        for (const auto& t : p.terms(l)) out.add_term(l, s * t.coefficient, t.creators, t.annihilators);
    }
    return out;
}

NormalOrderedPoly normal_order_quantize(const PolyMap& map) {
    NormalOrderedPoly out(map.n_modes(), map.max_degree());
    for (int l = 0; l < map.n_modes(); ++l) {
        for (const Term& t : map.terms(l)) out.add_term(l, t.coefficient, t.wbar_powers, t.w_powers);
    }
    return out;
}

std::vector<OperatorMatrix> realize(const NormalOrderedPoly& nop, const ModeSpec& spec) {
    spec.validate();
    if (nop.n_modes() != spec.n_modes) throw ValidationError("realize: n_modes mismatch");
    if (nop.degree() > spec.cutoff) {
        throw DegreeError("realize: degree " + std::to_string(nop.degree()) + " exceeds cutoff " +
                          std::to_string(spec.cutoff));
    }
    const LadderPowers powers(spec.cutoff);
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    std::vector<OperatorMatrix> out;
    for (int l = 0; l < nop.n_modes(); ++l) {
        Matrix g = Matrix::Zero(dim, dim);
        for (const auto& t : nop.terms(l)) {
            std::vector<Matrix> factors;
            for (int m = 0; m < spec.n_modes; ++m) {
                factors.push_back(powers.ordered(t.creators[static_cast<std::size_t>(m)],
                                                 t.annihilators[static_cast<std::size_t>(m)]));
            }
            g += t.coefficient * tensor_embed(spec, factors).entries;
        }
        out.push_back({std::move(g), spec});
    }
    return out;
}

std::vector<OperatorMatrix> realize(const PolyMap& map, const ModeSpec& spec) {
    return realize(normal_order_quantize(map), spec);
}

double vacuum_residual(const OperatorMatrix& g) {
    return g.entries.col(0).norm();
}

double vacuum_residual(const std::vector<OperatorMatrix>& g) {
    double sq = 0.0;
    for (const auto& op : g) sq += op.entries.col(0).squaredNorm();
    return std::sqrt(sq);
}

PrimedVacuum primed_vacuum(const std::vector<OperatorMatrix>& g, int band) {
    if (g.empty()) throw ValidationError("primed_vacuum: no operators");
    const ModeSpec& spec = g.front().spec;
    const auto dim = g.front().entries.cols();
    Matrix stacked(dim * static_cast<Eigen::Index>(g.size()), dim);
    for (std::size_t l = 0; l < g.size(); ++l) {
        if (g[l].entries.rows() != dim || g[l].entries.cols() != dim) {
            throw ValidationError("primed_vacuum: operators must share one square dimension");
        }
        stacked.middleRows(static_cast<Eigen::Index>(l) * dim, dim) = g[l].entries;
    }
    Eigen::VectorXd sigma;
    Matrix v;
    if (dim <= 256) {
        Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
        sigma = svd.singularValues();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
        sigma = svd.singularValues();
        v = svd.matrixV();
    }

    PrimedVacuum out;
    Eigen::Index chosen = -1;
    for (Eigen::Index i = sigma.size() - 1; i >= 0; --i) {
        const bool artifact = top_band_weight(v.col(i), spec, band) > 0.5;
        if (chosen < 0) {
            if (artifact) {
                ++out.skipped_artifacts;
                continue;
            }
            chosen = i;
        } else if (!artifact) {
            out.degenerate = sigma(i) - sigma(chosen) <= 1e-10;
            break;
        }
    }
    if (chosen < 0) throw NumericalError("primed_vacuum: every singular direction is a truncation artifact");

    Vector state = v.col(chosen);
    Eigen::Index largest = 0;
    state.cwiseAbs().maxCoeff(&largest);
    state *= std::conj(state(largest)) / std::abs(state(largest));
    state.normalize();

    double defect_sq = 0.0;
    for (const auto& op : g) defect_sq += (op.entries * state).squaredNorm();
    out.defect = std::sqrt(defect_sq);
    out.vacuum_overlap = std::abs(state(0));
    out.state = FockVector{std::move(state), spec, true};
    return out;
}

PrimedVacuum primed_vacuum(const OperatorMatrix& g, int band) {
    return primed_vacuum(std::vector<OperatorMatrix>{g}, band);
}

std::vector<double> holomorphic_transport_bound(const PolyMap& map, const CoherentLabel& label, int cutoff) {
    std::vector<double> out;
    for (int l = 0; l < map.n_modes(); ++l) {
        double bound = 0.0;
        for (const Term& t : map.terms(l)) {
            if (std::any_of(t.wbar_powers.begin(), t.wbar_powers.end(), [](int e) { return e > 0; })) continue;
            double magnitude = std::abs(t.coefficient);
            double tails = 0.0;
            for (std::size_t m = 0; m < label.z.size(); ++m) {
                const int j = t.w_powers[m];
                if (j == 0) continue;
                magnitude *= std::pow(std::abs(label.z[m]), j);
                tails += std::sqrt(poisson_mass(std::norm(label.z[m]), cutoff - j + 1, cutoff));
            }
            bound += magnitude * tails;
        }
        out.push_back(bound);
    }
    return out;
}

CoherenceMapReport coherence_map_test(const PolyMap& map, const CoherentLabel& label, const ModeSpec& spec,
                                      double radius_bound) {
    const CoherentState state = coherent_vector(label, spec, radius_bound);
    const auto g = realize(map, spec);
    CoherenceMapReport report;
    report.classical_image = map.evaluate(label.z);
    for (std::size_t l = 0; l < g.size(); ++l) {
        const Vector r = g[l].entries * state.vector.amplitudes - report.classical_image[l] * state.vector.amplitudes;
        report.residual.push_back(r.norm());
        report.max_residual = std::max(report.max_residual, report.residual.back());
    }
    report.transport_bound = holomorphic_transport_bound(map, label, spec.cutoff);
    return report;
}

std::vector<double> primed_coherent_residual(const PolyMap& map, const CoherentLabel& label, const ModeSpec& spec,
                                             double radius_bound) {
    validate_label(label, spec, radius_bound);
    const auto g = realize(map, spec);
    const PrimedVacuum vac = primed_vacuum(g, std::max(map.degree(), 1));
    const auto image = map.evaluate(label.z);
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    Matrix generator = Matrix::Zero(dim, dim);
    for (std::size_t l = 0; l < g.size(); ++l) {
        generator += image[l] * g[l].entries.adjoint() - std::conj(image[l]) * g[l].entries;
    }
    const Matrix displacement = generator.exp();
    const Vector state = displacement * vac.state.amplitudes;
    std::vector<double> out;
    for (std::size_t l = 0; l < g.size(); ++l) out.push_back((g[l].entries * state - image[l] * state).norm());
    return out;
}

double commutator_diagnostic(const PolyMap& map, const ModeSpec& spec) {
    const auto g = realize(map, spec);
    const int reliable = spec.cutoff / 2;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            Matrix c = commutator(g[j], g[k].adjoint()).entries;
            if (j == k) c -= Matrix::Identity(c.rows(), c.cols());
            worst = std::max(worst, max_abs(restrict_to_levels(c, spec, reliable)));
        }
    }
    return worst;
}

} // namespace cohatlas
