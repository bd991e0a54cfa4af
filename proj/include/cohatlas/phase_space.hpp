// phase_space.hpp - Polynomial coordinate maps on C^n, dbar classification,
// symplectic canonicity and constant almost complex structures.
//
// A PolyMap sends w to w' with w'_l = sum_t c_t prod_m w_m^{j_m} wbar_m^{k_m}.
// Real coordinates are ordered (q_1, p_1, q_2, p_2, ...) with w = (q + i p)/sqrt(2).

#pragma once

#include "cohatlas/fock.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cohatlas {

inline constexpr int kDefaultMaxDegree = 6;

struct Term {
    Complex coefficient;
    std::vector<int> w_powers;
    std::vector<int> wbar_powers;

    int degree() const;
    bool is_constant() const { return degree() == 0; }
};

class PolyMap {
public:
    PolyMap() = default;
    explicit PolyMap(int n_modes, int max_degree = kDefaultMaxDegree);

    static PolyMap identity(int n_modes, int max_degree = kDefaultMaxDegree);
    // Single-mode w' = alpha w + beta wbar + shift.
    static PolyMap linear(Complex alpha, Complex beta, Complex shift = 0.0,
                          int max_degree = kDefaultMaxDegree);

    // Adds (merging like exponents) c * w^j wbar^k to output `mode`.
    // Throws ValidationError on bad exponents or total degree > max_degree.
    void add_term(int mode, Complex coefficient, std::vector<int> w_powers,
                  std::vector<int> wbar_powers);

    int n_modes() const { return n_modes_; }
    int max_degree() const { return max_degree_; }
    // Highest total degree present (0 for an all-constant or empty map).
    int degree() const;
    const std::vector<Term>& terms(int mode) const;
    Complex constant_term(int mode) const;
    bool empty() const;

    std::vector<Complex> evaluate(std::span<const Complex> w) const;

    // d w'_l / d w_m and d w'_l / d wbar_m evaluated at w.
    Matrix holomorphic_jacobian(std::span<const Complex> w) const;
    Matrix antiholomorphic_jacobian(std::span<const Complex> w) const;

    // True when output l depends only on (w_l, wbar_l).
    bool mode_separable() const;

    friend bool operator==(const PolyMap& a, const PolyMap& b);

private:
    void check_mode(int mode) const;

    int n_modes_ = 0;
    int max_degree_ = kDefaultMaxDegree;
    std::vector<std::vector<Term>> outputs_;
};

PolyMap conjugate(const PolyMap& map);
PolyMap operator+(const PolyMap& a, const PolyMap& b);
PolyMap operator*(Complex s, const PolyMap& map);

// Largest coefficient difference over the union of exponents.
double coefficient_distance(const PolyMap& a, const PolyMap& b);

struct Composition {
    PolyMap map;
    // Sum of |coefficient| over terms dropped for exceeding the degree cap.
    double discarded_mass = 0.0;
    bool exact() const { return discarded_mass == 0.0; }
};

// outer(inner(w)); the result carries outer's degree cap.
Composition compose(const PolyMap& outer, const PolyMap& inner);

enum class Holomorphy { Holomorphic, Antiholomorphic, Mixed };

struct Witness {
    int output_mode = 0;
    Term term;
};

struct DbarClassification {
    Holomorphy kind = Holomorphy::Holomorphic;
    bool degenerate = false; // every term constant
    std::optional<Witness> witness; // a term with a nonzero wbar exponent
};

DbarClassification dbar_classify(const PolyMap& map);

std::string to_string(Holomorphy h);
// Monomial without coefficient: "w", "wbar" rendered as w̄, "w1^2 w̄2", "1".
std::string format_monomial(const Term& term);

// Text format: optional "polymap <n_modes> <max_degree>" header, "mode <l>" separators,
// and one "re im : j1 .. jn : k1 .. kn" line per term; '#' starts a comment.
std::string serialize(const PolyMap& map);
PolyMap parse_polymap(std::string_view text);

struct SymplecticForm {
    Eigen::MatrixXd matrix;

    // Block-diagonal [[0, 1], [-1, 0]] per mode, so Omega(e_q, e_p) = +1.
    static SymplecticForm canonical(int n_modes);
    int dimension() const { return static_cast<int>(matrix.rows()); }
    void validate() const;
};

struct AlmostComplexStructure {
    Eigen::MatrixXd matrix;
};

// Real Jacobian d(q', p')/d(q, p) at the point qp = (q_1, p_1, ...).
Eigen::MatrixXd real_jacobian(const PolyMap& map, std::span<const double> qp);

struct CanonicityReport {
    bool canonical = false;
    double max_defect = 0.0;      // max over samples of ||M^T Omega M - Omega||_max
    double max_anti_defect = 0.0; // max over samples of ||M^T Omega M + Omega||_max
};

inline constexpr int kDefaultCanonicitySamples = 25;
inline constexpr double kDefaultCanonicityBox = 2.0;
inline constexpr double kDefaultCanonicityTol = 1e-9;

// Halton points in [-box, box]^dimension, deterministic.
std::vector<std::vector<double>> quasi_random_samples(int dimension, int count,
                                                      double box = kDefaultCanonicityBox);

CanonicityReport canonicity_check(const PolyMap& map, const SymplecticForm& omega,
                                  const std::vector<std::vector<double>>& samples,
                                  double tol = kDefaultCanonicityTol);
CanonicityReport canonicity_check(const PolyMap& map, const SymplecticForm& omega);

AlmostComplexStructure j_standard(int n_modes);

struct JCheck {
    bool square_ok = false;
    bool compatible = false;
    bool tamed = false;
};

JCheck j_check(const AlmostComplexStructure& j, const SymplecticForm& omega);

} // namespace cohatlas
