// phase_space.cpp - PolyMap algebra, dbar classification, canonicity, almost complex structures

#include "cohatlas/phase_space.hpp"

#include "cohatlas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace cohatlas {

namespace {

bool term_less(const Term& a, const Term& b) {
    return std::tie(a.w_powers, a.wbar_powers) < std::tie(b.w_powers, b.wbar_powers);
}

Complex ipow(Complex x, int e) {
    Complex r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

Complex monomial_value(const Term& t, std::span<const Complex> w) {
    Complex v = t.coefficient;
    for (std::size_t m = 0; m < w.size(); ++m) {
        v *= ipow(w[m], t.w_powers[m]) * ipow(std::conj(w[m]), t.wbar_powers[m]);
    }
    return v;
}

// Sparse polynomial in (w_1..w_n, wbar_1..wbar_n); key is the concatenated exponent list.
using Exponents = std::vector<int>;
using Poly = std::map<Exponents, Complex>;

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

Poly multiply(const Poly& a, const Poly& b, int cap, double& discarded) {
    Poly out;
    for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
            Exponents e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            const Complex c = ca * cb;
            if (total_degree(e) > cap) {
                discarded += std::abs(c);
                continue;
            }
            out[e] += c;
        }
    }
    return out;
}

Poly unit_poly(int n_modes) { return Poly{{Exponents(2 * static_cast<std::size_t>(n_modes), 0), 1.0}}; }

Poly to_poly(const std::vector<Term>& terms, bool conjugated) {
    Poly p;
    for (const Term& t : terms) {
        Exponents e;
        if (conjugated) {
            e = t.wbar_powers;
            e.insert(e.end(), t.w_powers.begin(), t.w_powers.end());
            p[e] += std::conj(t.coefficient);
        } else {
            e = t.w_powers;
            e.insert(e.end(), t.wbar_powers.begin(), t.wbar_powers.end());
            p[e] += t.coefficient;
        }
    }
    return p;
}

} // namespace

int Term::degree() const {
    return std::accumulate(w_powers.begin(), w_powers.end(), 0) +
           std::accumulate(wbar_powers.begin(), wbar_powers.end(), 0);
}

PolyMap::PolyMap(int n_modes, int max_degree)
    : n_modes_(n_modes), max_degree_(max_degree), outputs_(static_cast<std::size_t>(n_modes)) {
    if (n_modes < 1) throw ValidationError("PolyMap: n_modes must be >= 1");
    if (max_degree < 1) throw ValidationError("PolyMap: max_degree must be >= 1");
}

PolyMap PolyMap::identity(int n_modes, int max_degree) {
    PolyMap map(n_modes, max_degree);
    for (int l = 0; l < n_modes; ++l) {
        std::vector<int> j(static_cast<std::size_t>(n_modes), 0);
        j[static_cast<std::size_t>(l)] = 1;
        map.add_term(l, 1.0, j, std::vector<int>(static_cast<std::size_t>(n_modes), 0));
    }
    return map;
}

PolyMap PolyMap::linear(Complex alpha, Complex beta, Complex shift, int max_degree) {
    PolyMap map(1, max_degree);
    map.add_term(0, alpha, {1}, {0});
    map.add_term(0, beta, {0}, {1});
    map.add_term(0, shift, {0}, {0});
    return map;
}

void PolyMap::check_mode(int mode) const {
    if (mode < 0 || mode >= n_modes_) {
        throw ValidationError("PolyMap: output mode " + std::to_string(mode) + " out of range");
    }
}

void PolyMap::add_term(int mode, Complex coefficient, std::vector<int> w_powers,
                       std::vector<int> wbar_powers) {
    check_mode(mode);
    const auto n = static_cast<std::size_t>(n_modes_);
    if (w_powers.size() != n || wbar_powers.size() != n) {
        throw ValidationError("PolyMap: exponent list length must equal n_modes");
    }
    for (int e : w_powers) {
        if (e < 0) throw ValidationError("PolyMap: negative exponent");
    }
    for (int e : wbar_powers) {
        if (e < 0) throw ValidationError("PolyMap: negative exponent");
    }
    if (!std::isfinite(coefficient.real()) || !std::isfinite(coefficient.imag())) {
        throw ValidationError("PolyMap: non-finite coefficient");
    }
    Term term{coefficient, std::move(w_powers), std::move(wbar_powers)};
    if (term.degree() > max_degree_) {
        throw ValidationError("PolyMap: term degree " + std::to_string(term.degree()) +
                              " exceeds cap " + std::to_string(max_degree_));
    }
    auto& terms = outputs_[static_cast<std::size_t>(mode)];
    auto it = std::lower_bound(terms.begin(), terms.end(), term, term_less);
    if (it != terms.end() && !term_less(term, *it)) {
        it->coefficient += term.coefficient;
        if (it->coefficient == Complex{0.0, 0.0}) terms.erase(it);
    } else if (term.coefficient != Complex{0.0, 0.0}) {
        terms.insert(it, std::move(term));
    }
}

int PolyMap::degree() const {
    int d = 0;
    for (const auto& terms : outputs_) {
        for (const Term& t : terms) d = std::max(d, t.degree());
    }
    return d;
}

const std::vector<Term>& PolyMap::terms(int mode) const {
    check_mode(mode);
    return outputs_[static_cast<std::size_t>(mode)];
}

Complex PolyMap::constant_term(int mode) const {
    for (const Term& t : terms(mode)) {
        if (t.is_constant()) return t.coefficient;
    }
    return 0.0;
}

bool PolyMap::empty() const {
    return std::all_of(outputs_.begin(), outputs_.end(), [](const auto& t) { return t.empty(); });
}

std::vector<Complex> PolyMap::evaluate(std::span<const Complex> w) const {
    if (w.size() != static_cast<std::size_t>(n_modes_)) {
        throw ValidationError("PolyMap::evaluate: point dimension mismatch");
    }
    std::vector<Complex> out(static_cast<std::size_t>(n_modes_), 0.0);
    for (std::size_t l = 0; l < outputs_.size(); ++l) {
        for (const Term& t : outputs_[l]) out[l] += monomial_value(t, w);
    }
    return out;
}

Matrix PolyMap::holomorphic_jacobian(std::span<const Complex> w) const {
    Matrix jac = Matrix::Zero(n_modes_, n_modes_);
    for (int l = 0; l < n_modes_; ++l) {
        for (const Term& t : outputs_[static_cast<std::size_t>(l)]) {
            for (int m = 0; m < n_modes_; ++m) {
                const int e = t.w_powers[static_cast<std::size_t>(m)];
                if (e == 0) continue;
                Term d = t;
                d.coefficient *= static_cast<double>(e);
                d.w_powers[static_cast<std::size_t>(m)] -= 1;
                jac(l, m) += monomial_value(d, w);
            }
        }
    }
    return jac;
}

Matrix PolyMap::antiholomorphic_jacobian(std::span<const Complex> w) const {
    Matrix jac = Matrix::Zero(n_modes_, n_modes_);
    for (int l = 0; l < n_modes_; ++l) {
        for (const Term& t : outputs_[static_cast<std::size_t>(l)]) {
            for (int m = 0; m < n_modes_; ++m) {
                const int e = t.wbar_powers[static_cast<std::size_t>(m)];
                if (e == 0) continue;
                Term d = t;
                d.coefficient *= static_cast<double>(e);
                d.wbar_powers[static_cast<std::size_t>(m)] -= 1;
                jac(l, m) += monomial_value(d, w);
            }
        }
    }
    return jac;
}

bool PolyMap::mode_separable() const {
    for (std::size_t l = 0; l < outputs_.size(); ++l) {
        for (const Term& t : outputs_[l]) {
            for (std::size_t m = 0; m < outputs_.size(); ++m) {
                if (m != l && (t.w_powers[m] != 0 || t.wbar_powers[m] != 0)) return false;
            }
        }
    }
    return true;
}

bool operator==(const PolyMap& a, const PolyMap& b) {
    if (a.n_modes_ != b.n_modes_ || a.max_degree_ != b.max_degree_) return false;
    for (std::size_t l = 0; l < a.outputs_.size(); ++l) {
        const auto& ta = a.outputs_[l];
        const auto& tb = b.outputs_[l];
        if (ta.size() != tb.size()) return false;
        for (std::size_t i = 0; i < ta.size(); ++i) {
            if (ta[i].coefficient != tb[i].coefficient || ta[i].w_powers != tb[i].w_powers ||
                ta[i].wbar_powers != tb[i].wbar_powers) {
                return false;
            }
        }
    }
    return true;
}

PolyMap conjugate(const PolyMap& map) {
    PolyMap out(map.n_modes(), map.max_degree());
    for (int l = 0; l < map.n_modes(); ++l) {
        for (const Term& t : map.terms(l)) {
            out.add_term(l, std::conj(t.coefficient), t.wbar_powers, t.w_powers);
        }
    }
    return out;
}

PolyMap operator+(const PolyMap& a, const PolyMap& b) {
    if (a.n_modes() != b.n_modes()) throw ValidationError("PolyMap sum: n_modes mismatch");
    PolyMap out(a.n_modes(), std::max(a.max_degree(), b.max_degree()));
    for (const PolyMap* src : {&a, &b}) {
        for (int l = 0; l < src->n_modes(); ++l) {
            for (const Term& t : src->terms(l)) out.add_term(l, t.coefficient, t.w_powers, t.wbar_powers);
        }
    }
    return out;
}

PolyMap operator*(Complex s, const PolyMap& map) {
    PolyMap out(map.n_modes(), map.max_degree());
    for (int l = 0; l < map.n_modes(); ++l) {
        for (const Term& t : map.terms(l)) out.add_term(l, s * t.coefficient, t.w_powers, t.wbar_powers);
    }
    return out;
}

double coefficient_distance(const PolyMap& a, const PolyMap& b) {
    if (a.n_modes() != b.n_modes()) return std::numeric_limits<double>::infinity();
    double dist = 0.0;
    for (int l = 0; l < a.n_modes(); ++l) {
        Poly diff = to_poly(a.terms(l), false);
        for (const auto& [e, c] : to_poly(b.terms(l), false)) diff[e] -= c;
        for (const auto& [e, c] : diff) dist = std::max(dist, std::abs(c));
    }
    return dist;
}

Composition compose(const PolyMap& outer, const PolyMap& inner) {
    if (outer.n_modes() != inner.n_modes()) {
        throw ValidationError("compose: n_modes mismatch");
    }
    const int n = outer.n_modes();
    const int cap = outer.max_degree();
    double discarded = 0.0;

    std::vector<Poly> h, hbar;
    for (int m = 0; m < n; ++m) {
        h.push_back(to_poly(inner.terms(m), false));
        hbar.push_back(to_poly(inner.terms(m), true));
    }

    PolyMap result(n, cap);
    for (int l = 0; l < n; ++l) {
        Poly acc;
        for (const Term& t : outer.terms(l)) {
            Poly prod = unit_poly(n);
            for (int m = 0; m < n; ++m) {
                for (int e = 0; e < t.w_powers[static_cast<std::size_t>(m)]; ++e) {
                    prod = multiply(prod, h[static_cast<std::size_t>(m)], cap, discarded);
                }
                for (int e = 0; e < t.wbar_powers[static_cast<std::size_t>(m)]; ++e) {
                    prod = multiply(prod, hbar[static_cast<std::size_t>(m)], cap, discarded);
                }
            }
            for (const auto& [e, c] : prod) acc[e] += t.coefficient * c;
        }
        for (const auto& [e, c] : acc) {
            if (c == Complex{0.0, 0.0}) continue;
            std::vector<int> j(e.begin(), e.begin() + n);
            std::vector<int> k(e.begin() + n, e.end());
            result.add_term(l, c, std::move(j), std::move(k));
        }
    }
    return {std::move(result), discarded};
}

DbarClassification dbar_classify(const PolyMap& map) {
    bool any_w = false;
    bool any_wbar = false;
    std::optional<Witness> witness;
    for (int l = 0; l < map.n_modes(); ++l) {
        for (const Term& t : map.terms(l)) {
            const bool has_w = std::any_of(t.w_powers.begin(), t.w_powers.end(), [](int e) { return e > 0; });
            const bool has_wbar =
                std::any_of(t.wbar_powers.begin(), t.wbar_powers.end(), [](int e) { return e > 0; });
            any_w = any_w || has_w;
            if (has_wbar && !witness) witness = Witness{l, t};
            any_wbar = any_wbar || has_wbar;
        }
    }
    DbarClassification out;
    if (!any_wbar) {
        out.kind = Holomorphy::Holomorphic;
        out.degenerate = !any_w;
        return out;
    }
    out.kind = any_w ? Holomorphy::Mixed : Holomorphy::Antiholomorphic;
    out.witness = witness;
    return out;
}

std::string to_string(Holomorphy h) {
    switch (h) {
    case Holomorphy::Holomorphic: return "Holomorphic";
    case Holomorphy::Antiholomorphic: return "Antiholomorphic";
    case Holomorphy::Mixed: return "Mixed";
    }
    return "Unknown";
}

std::string format_monomial(const Term& term) {
    const std::size_t n = term.w_powers.size();
    std::string out;
    auto factor = [&](const char* symbol, std::size_t m, int e) {
        if (e == 0) return;
        if (!out.empty()) out += ' ';
        out += symbol;
        if (n > 1) out += std::to_string(m + 1);
        if (e > 1) out += "^" + std::to_string(e);
    };
    for (std::size_t m = 0; m < n; ++m) factor("w", m, term.w_powers[m]);
    for (std::size_t m = 0; m < n; ++m) factor("w̄", m, term.wbar_powers[m]);
    return out.empty() ? "1" : out;
}

void SymplecticForm::validate() const {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0 || matrix.rows() % 2 != 0) {
        throw ValidationError("symplectic form must be a nonempty even-dimensional square matrix");
    }
    if ((matrix + matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("symplectic form is not antisymmetric");
    }
    if (std::abs(matrix.determinant()) < 1e-12) {
        throw ValidationError("symplectic form is degenerate");
    }
}

SymplecticForm SymplecticForm::canonical(int n_modes) {
    if (n_modes < 1) throw ValidationError("symplectic form needs n_modes >= 1");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int l = 0; l < n_modes; ++l) {
        omega(2 * l, 2 * l + 1) = 1.0;
        omega(2 * l + 1, 2 * l) = -1.0;
    }
    return {omega};
}

Eigen::MatrixXd real_jacobian(const PolyMap& map, std::span<const double> qp) {
    const int n = map.n_modes();
    if (qp.size() != 2 * static_cast<std::size_t>(n)) {
        throw ValidationError("real_jacobian: sample dimension must be 2 * n_modes");
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Complex> w(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        w[static_cast<std::size_t>(m)] = Complex{qp[2 * static_cast<std::size_t>(m)],
                                                 qp[2 * static_cast<std::size_t>(m) + 1]} * inv_sqrt2;
    }
    const Matrix a = map.holomorphic_jacobian(w);
    const Matrix b = map.antiholomorphic_jacobian(w);
    // dq' + i dp' = (A + B) dq + i (A - B) dp, independent of the sqrt(2) scaling.
    Eigen::MatrixXd jac(2 * n, 2 * n);
    for (int l = 0; l < n; ++l) {
        for (int m = 0; m < n; ++m) {
            const Complex plus = a(l, m) + b(l, m);
            const Complex minus = a(l, m) - b(l, m);
            jac(2 * l, 2 * m) = plus.real();
            jac(2 * l + 1, 2 * m) = plus.imag();
            jac(2 * l, 2 * m + 1) = -minus.imag();
            jac(2 * l + 1, 2 * m + 1) = minus.real();
        }
    }
    return jac;
}

std::vector<std::vector<double>> quasi_random_samples(int dimension, int count, double box) {
    static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dimension < 1 || dimension > static_cast<int>(std::size(kPrimes))) {
        throw ValidationError("quasi_random_samples: unsupported dimension");
    }
    std::vector<std::vector<double>> samples;
    for (int i = 1; i <= count; ++i) {
        std::vector<double> point(static_cast<std::size_t>(dimension));
        for (int d = 0; d < dimension; ++d) {
            double f = 1.0, r = 0.0;
            for (int k = i; k > 0; k /= kPrimes[d]) {
                f /= kPrimes[d];
                r += f * (k % kPrimes[d]);
            }
            point[static_cast<std::size_t>(d)] = -box + 2.0 * box * r;
        }
        samples.push_back(std::move(point));
    }
    return samples;
}

CanonicityReport canonicity_check(const PolyMap& map, const SymplecticForm& omega,
                                  const std::vector<std::vector<double>>& samples, double tol) {
    omega.validate();
    if (omega.dimension() != 2 * map.n_modes()) {
        throw ValidationError("canonicity_check: symplectic form dimension mismatch");
    }
    if (samples.empty()) throw ValidationError("canonicity_check: no samples");
    CanonicityReport report;
    for (const auto& s : samples) {
        const Eigen::MatrixXd m = real_jacobian(map, s);
        const Eigen::MatrixXd pulled = m.transpose() * omega.matrix * m;
        report.max_defect = std::max(report.max_defect, (pulled - omega.matrix).cwiseAbs().maxCoeff());
        report.max_anti_defect =
            std::max(report.max_anti_defect, (pulled + omega.matrix).cwiseAbs().maxCoeff());
    }
    report.canonical = report.max_defect <= tol;
    return report;
}

CanonicityReport canonicity_check(const PolyMap& map, const SymplecticForm& omega) {
    return canonicity_check(map, omega,
                            quasi_random_samples(2 * map.n_modes(), kDefaultCanonicitySamples),
                            kDefaultCanonicityTol);
}

AlmostComplexStructure j_standard(int n_modes) {
    if (n_modes < 1) throw ValidationError("j_standard: n_modes must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int l = 0; l < n_modes; ++l) {
        j(2 * l + 1, 2 * l) = 1.0;  // dq -> dp
        j(2 * l, 2 * l + 1) = -1.0; // dp -> -dq
    }
    return {j};
}

JCheck j_check(const AlmostComplexStructure& j, const SymplecticForm& omega) {
    const Eigen::MatrixXd& jm = j.matrix;
    const Eigen::MatrixXd& om = omega.matrix;
    if (jm.rows() != jm.cols() || jm.rows() != om.rows() || om.rows() != om.cols()) {
        throw ValidationError("j_check: dimension mismatch");
    }
    const auto dim = jm.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    JCheck out;
    out.square_ok = (jm * jm + id).cwiseAbs().maxCoeff() <= 1e-12;
    out.compatible = (jm.transpose() * om * jm - om).cwiseAbs().maxCoeff() <= 1e-12;
    out.tamed = true;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (!(om.row(i).dot(jm.col(i)) > 0.0)) out.tamed = false;
    }
    return out;
}

} // namespace cohatlas
