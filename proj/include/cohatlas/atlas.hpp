// atlas.hpp - Phase space as charts glued by polynomial transitions: holomorphic-atlas
// classification, global/local coherence verdicts, and duality-group filtering.

#pragma once

#include "cohatlas/coherent.hpp"
#include "cohatlas/phase_space.hpp"
#include "cohatlas/quantize.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cohatlas {

// Informational box in (q, p); transition maps are assumed valid on the probe box.
struct ChartDomain {
    double q_min = -2.0, q_max = 2.0;
    double p_min = -2.0, p_max = 2.0;

    friend bool operator==(const ChartDomain&, const ChartDomain&) = default;
};

struct Chart {
    std::string name;
    ChartDomain domain;

    friend bool operator==(const Chart&, const Chart&) = default;
};

using ChartPair = std::pair<std::string, std::string>;

inline constexpr double kInverseTolerance = 1e-8;

class Atlas {
public:
    Atlas() = default;
    explicit Atlas(int n_modes);

    void add_chart(Chart chart);
    void add_transition(const std::string& from, const std::string& to, PolyMap map);

    int n_modes() const { return n_modes_; }
    const std::vector<Chart>& charts() const { return charts_; }
    // Ordered by (from, to).
    const std::map<ChartPair, PolyMap>& transitions() const { return transitions_; }

    bool connected() const;
    // Max over samples of |inverse(forward(w)) - w| for every pair stored in both directions.
    std::map<ChartPair, double> inverse_defects() const;
    // Throws ValidationError if disconnected or an inverse pair fails kInverseTolerance.
    void validate() const;

    friend bool operator==(const Atlas&, const Atlas&) = default;

private:
    bool has_chart(const std::string& name) const;

    int n_modes_ = 1;
    std::vector<Chart> charts_;
    std::map<ChartPair, PolyMap> transitions_;
};

// "atlas 1 <n_modes>", "chart <name> q_min q_max p_min p_max", then
// "transition <from> <to>" blocks holding a polymap and closed by "end".
std::string serialize(const Atlas& atlas);
Atlas parse_atlas(std::string_view text);

enum class StructureVerdict { ComplexStructure, AlmostComplexOnly };

struct TransitionClass {
    ChartPair pair;
    DbarClassification classification;
};

struct AtlasClassification {
    StructureVerdict verdict = StructureVerdict::ComplexStructure;
    std::vector<TransitionClass> transitions;
    std::vector<TransitionClass> witnesses; // non-holomorphic transitions
};

AtlasClassification classify_atlas(const Atlas& atlas);

enum class CoherenceVerdict { Global, GlobalUpToDisplacement, Local };

struct ProbeResult {
    CoherentLabel probe;
    std::vector<Complex> classical_image;
    std::vector<double> residual;
    std::vector<double> bound; // transport bound plus round-off allowance
    std::vector<double> primed_family_residual;
    bool within_bounds = false;
};

struct TransitionCoherence {
    ChartPair pair;
    DbarClassification classification;
    double vacuum_residual = 0.0;
    double vacuum_overlap = 0.0; // |<0|0'>|
    double primed_vacuum_defect = 0.0;
    bool primed_vacuum_degenerate = false;
    std::vector<Complex> origin_offset; // g(0)
    std::vector<ProbeResult> probes;
    CoherenceVerdict verdict = CoherenceVerdict::Local;
};

struct CoherenceReport {
    CoherenceVerdict verdict = CoherenceVerdict::Global;
    std::vector<TransitionCoherence> transitions;
    std::vector<ChartPair> disagreeing_observers;
};

CoherenceReport coherence_report(const Atlas& atlas, const ModeSpec& spec, const std::vector<CoherentLabel>& probes,
                                 double radius_bound = kDefaultRadiusBound);

struct NamedMap {
    std::string name;
    PolyMap map;
};

struct DualityCandidateSet {
    std::vector<NamedMap> generators;
    int composition_depth = 1;

    void validate() const;
};

enum class DualityCategory { HolomorphicCanonical, NonholomorphicCanonical, NonCanonical };

struct GeneratorVerdict {
    std::string name;
    DbarClassification classification;
    CanonicityReport canonicity;
    bool anticanonical = false; // M^T Omega M = -Omega within tolerance
    DualityCategory category = DualityCategory::NonCanonical;
};

struct ProductVerdict {
    std::vector<std::string> word; // applied right to left
    PolyMap product;
    bool exact = true;
    double discarded_mass = 0.0;
    std::string matches; // generator name, empty when the product leaves the set
};

struct DualityReport {
    std::vector<GeneratorVerdict> generators;
    std::vector<ProductVerdict> products;
    bool closed = true;
};

inline constexpr double kClosureTolerance = 1e-9;
inline constexpr std::size_t kMaxDualityProducts = 20000;

DualityReport duality_filter(const DualityCandidateSet& candidates, const SymplecticForm& omega,
                             double tol = kDefaultCanonicityTol);

std::string to_string(StructureVerdict v);
std::string to_string(CoherenceVerdict v);
std::string to_string(DualityCategory c);

} // namespace cohatlas
