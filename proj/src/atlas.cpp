// atlas.cpp - Chart atlases, coherence verdicts and duality filtering

#include "cohatlas/atlas.hpp"

#include "cohatlas/errors.hpp"
#include "cohatlas/text_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>

namespace cohatlas {

namespace {

bool valid_identifier(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

std::string pair_label(const ChartPair& p) { return p.first + "->" + p.second; }

// Round-off allowance for ||(G - w')|z>||: entries of a^j scale like (N+1)^{j/2}.
double roundoff_allowance(const PolyMap& map, int mode, int cutoff, Complex image) {
    double scale = 1.0 + std::abs(image);
    for (const Term& t : map.terms(mode)) scale += std::abs(t.coefficient) * std::pow(cutoff + 1.0, 0.5 * t.degree());
    return 1e-11 * scale;
}

} // namespace

Atlas::Atlas(int n_modes) : n_modes_(n_modes) {
    if (n_modes < 1) throw ValidationError("atlas: n_modes must be >= 1");
}

bool Atlas::has_chart(const std::string& name) const {
    return std::any_of(charts_.begin(), charts_.end(), [&](const Chart& c) { return c.name == name; });
}

void Atlas::add_chart(Chart chart) {
    if (!valid_identifier(chart.name)) throw ValidationError("atlas: invalid chart name '" + chart.name + "'");
    if (has_chart(chart.name)) throw ValidationError("atlas: duplicate chart name '" + chart.name + "'");
    charts_.push_back(std::move(chart));
}

void Atlas::add_transition(const std::string& from, const std::string& to, PolyMap map) {
    if (!has_chart(from) || !has_chart(to)) {
        throw ValidationError("atlas: transition " + from + "->" + to + " references an unknown chart");
    }
    if (from == to) throw ValidationError("atlas: transition from a chart to itself");
    if (map.n_modes() != n_modes_) throw ValidationError("atlas: transition n_modes mismatch");
    if (!transitions_.emplace(ChartPair{from, to}, std::move(map)).second) {
        throw ValidationError("atlas: duplicate transition " + from + "->" + to);
    }
}

bool Atlas::connected() const {
    if (charts_.empty()) return true;
    std::set<std::string> seen{charts_.front().name};
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [pair, map] : transitions_) {
            const bool a = seen.count(pair.first) > 0, b = seen.count(pair.second) > 0;
            if (a != b) {
                seen.insert(a ? pair.second : pair.first);
                grew = true;
            }
        }
    }
    return seen.size() == charts_.size();
}

std::map<ChartPair, double> Atlas::inverse_defects() const {
    std::map<ChartPair, double> out;
    const auto samples = quasi_random_samples(2 * n_modes_, kDefaultCanonicitySamples);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& [pair, forward] : transitions_) {
        const auto back = transitions_.find({pair.second, pair.first});
        if (back == transitions_.end()) continue;
        double worst = 0.0;
        for (const auto& s : samples) {
            std::vector<Complex> w(static_cast<std::size_t>(n_modes_));
            for (std::size_t m = 0; m < w.size(); ++m) w[m] = Complex{s[2 * m], s[2 * m + 1]} * inv_sqrt2;
            const auto round_trip = back->second.evaluate(forward.evaluate(w));
            for (std::size_t m = 0; m < w.size(); ++m) worst = std::max(worst, std::abs(round_trip[m] - w[m]));
        }
        out[pair] = worst;
    }
    return out;
}

void Atlas::validate() const {
    if (charts_.empty()) throw ValidationError("atlas: no charts");
    if (!connected()) throw ValidationError("atlas: chart graph is not connected (missing transition)");
    for (const auto& [pair, defect] : inverse_defects()) {
        if (!(defect <= kInverseTolerance)) {
            throw ValidationError("atlas: transitions " + pair_label(pair) + " and its reverse are not inverse (defect " +
                                  text::format_double(defect) + ")");
        }
    }
}

std::string serialize(const Atlas& atlas) {
    std::string out = "atlas 1 " + std::to_string(atlas.n_modes()) + "\n";
    for (const Chart& c : atlas.charts()) {
        out += "chart " + c.name + " " + text::format_double(c.domain.q_min) + " " + text::format_double(c.domain.q_max) +
               " " + text::format_double(c.domain.p_min) + " " + text::format_double(c.domain.p_max) + "\n";
    }
    for (const auto& [pair, map] : atlas.transitions()) {
        out += "transition " + pair.first + " " + pair.second + "\n";
        out += serialize(map);
        out += "end\n";
    }
    return out;
}

Atlas parse_atlas(std::string_view source) {
    const auto lines = text::content_lines(source);
    if (lines.empty()) throw ValidationError("atlas: empty file");
    const auto header = text::split_ws(lines.front().second);
    if (header.size() != 3 || header[0] != "atlas" || header[1] != "1") {
        throw ValidationError("atlas line " + std::to_string(lines.front().first) + ": expected 'atlas 1 <n_modes>'");
    }
    Atlas atlas(text::parse_int(header[2]));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [number, content] = lines[i];
        const auto where = "atlas line " + std::to_string(number) + ": ";
        const auto tokens = text::split_ws(content);
        try {
            if (tokens[0] == "chart") {
                if (tokens.size() != 6) throw ValidationError("expected 'chart <name> q_min q_max p_min p_max'");
                atlas.add_chart({std::string(tokens[1]),
                                 {text::parse_double(tokens[2]), text::parse_double(tokens[3]),
                                  text::parse_double(tokens[4]), text::parse_double(tokens[5])}});
            } else if (tokens[0] == "transition") {
                if (tokens.size() != 3) throw ValidationError("expected 'transition <from> <to>'");
                std::string block;
                std::size_t j = i + 1;
                for (; j < lines.size() && lines[j].second != "end"; ++j) {
                    block += std::string(lines[j].second) + "\n";
                }
                if (j == lines.size()) throw ValidationError("transition block without 'end'");
                atlas.add_transition(std::string(tokens[1]), std::string(tokens[2]), parse_polymap(block));
                i = j;
            } else {
                throw ValidationError("unknown directive '" + std::string(tokens[0]) + "'");
            }
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
    return atlas;
}

AtlasClassification classify_atlas(const Atlas& atlas) {
    atlas.validate();
    AtlasClassification out;
    for (const auto& [pair, map] : atlas.transitions()) {
        TransitionClass tc{pair, dbar_classify(map)};
        if (tc.classification.kind != Holomorphy::Holomorphic) {
            out.verdict = StructureVerdict::AlmostComplexOnly;
            out.witnesses.push_back(tc);
        }
        out.transitions.push_back(std::move(tc));
    }
    return out;
}

CoherenceReport coherence_report(const Atlas& atlas, const ModeSpec& spec, const std::vector<CoherentLabel>& probes,
                                 double radius_bound) {
    atlas.validate();
    spec.validate();
    if (spec.n_modes != atlas.n_modes()) throw ValidationError("coherence_report: mode spec does not match atlas");
    for (const auto& p : probes) validate_label(p, spec, radius_bound);

    CoherenceReport report;
    for (const auto& [pair, map] : atlas.transitions()) {
        TransitionCoherence tc;
        tc.pair = pair;
        tc.classification = dbar_classify(map);
        const auto g = realize(map, spec);
        tc.vacuum_residual = vacuum_residual(g);
        const PrimedVacuum vac = primed_vacuum(g, std::max(map.degree(), 1));
        tc.vacuum_overlap = vac.vacuum_overlap;
        tc.primed_vacuum_defect = vac.defect;
        tc.primed_vacuum_degenerate = vac.degenerate;
        bool preserves_origin = true;
        for (int l = 0; l < map.n_modes(); ++l) {
            tc.origin_offset.push_back(map.constant_term(l));
            preserves_origin = preserves_origin && tc.origin_offset.back() == Complex{0.0, 0.0};
        }

        bool coherent_everywhere = true;
        for (const auto& probe : probes) {
            const CoherenceMapReport cm = coherence_map_test(map, probe, spec, radius_bound);
            ProbeResult pr{probe, cm.classical_image, cm.residual, {}, {}, true};
            for (int l = 0; l < map.n_modes(); ++l) {
                const auto ls = static_cast<std::size_t>(l);
                pr.bound.push_back(cm.transport_bound[ls] + roundoff_allowance(map, l, spec.cutoff, cm.classical_image[ls]));
                pr.within_bounds = pr.within_bounds && cm.residual[ls] <= pr.bound.back();
            }
            pr.primed_family_residual = primed_coherent_residual(map, probe, spec, radius_bound);
            coherent_everywhere = coherent_everywhere && pr.within_bounds;
            tc.probes.push_back(std::move(pr));
        }

        const double vacuum_allowance = roundoff_allowance(map, 0, spec.cutoff, 0.0);
        if (!coherent_everywhere) {
            tc.verdict = CoherenceVerdict::Local;
        } else if (tc.vacuum_residual <= vacuum_allowance) {
            tc.verdict = CoherenceVerdict::Global;
        } else if (!preserves_origin && tc.classification.kind == Holomorphy::Holomorphic) {
            tc.verdict = CoherenceVerdict::GlobalUpToDisplacement;
        } else {
            tc.verdict = CoherenceVerdict::Local;
        }

        if (tc.verdict == CoherenceVerdict::Local) {
            report.verdict = CoherenceVerdict::Local;
            report.disagreeing_observers.push_back(pair);
        } else if (tc.verdict == CoherenceVerdict::GlobalUpToDisplacement && report.verdict == CoherenceVerdict::Global) {
            report.verdict = CoherenceVerdict::GlobalUpToDisplacement;
        }
        report.transitions.push_back(std::move(tc));
    }
    return report;
}

void DualityCandidateSet::validate() const {
    if (composition_depth < 1) throw ValidationError("duality candidates: composition depth must be >= 1");
    if (generators.empty()) throw ValidationError("duality candidates: no generators");
    std::set<std::string> names;
    for (const auto& g : generators) {
        if (!names.insert(g.name).second) throw ValidationError("duality candidates: duplicate name '" + g.name + "'");
        if (g.map.n_modes() != generators.front().map.n_modes()) {
            throw ValidationError("duality candidates: generators disagree on n_modes");
        }
    }
}

DualityReport duality_filter(const DualityCandidateSet& candidates, const SymplecticForm& omega, double tol) {
    candidates.validate();
    const int n = candidates.generators.front().map.n_modes();
    if (omega.dimension() != 2 * n) throw ValidationError("duality_filter: symplectic form dimension mismatch");
    const auto samples = quasi_random_samples(2 * n, kDefaultCanonicitySamples);

    DualityReport report;
    std::vector<const NamedMap*> duals;
    for (const auto& g : candidates.generators) {
        GeneratorVerdict v{g.name, dbar_classify(g.map), canonicity_check(g.map, omega, samples, tol)};
        v.anticanonical = v.canonicity.max_anti_defect <= tol;
        if (!v.canonicity.canonical) {
            v.category = DualityCategory::NonCanonical;
        } else if (v.classification.kind == Holomorphy::Holomorphic) {
            v.category = DualityCategory::HolomorphicCanonical;
        } else {
            v.category = DualityCategory::NonholomorphicCanonical;
            duals.push_back(&g);
        }
        report.generators.push_back(std::move(v));
    }

    std::size_t words = 0, power = 1;
    for (int len = 2; len <= candidates.composition_depth && !duals.empty(); ++len) {
        power *= duals.size();
        words += power;
        if (words > kMaxDualityProducts) {
            throw ValidationError("duality_filter: composition depth produces more than " +
                                  std::to_string(kMaxDualityProducts) + " products");
        }
    }

    std::vector<std::size_t> word;
    std::function<void(const PolyMap&, double)> extend = [&](const PolyMap& current, double discarded) {
        if (word.size() >= 2) {
            ProductVerdict pv;
            for (std::size_t idx : word) pv.word.push_back(duals[idx]->name);
            pv.product = current;
            pv.discarded_mass = discarded;
            pv.exact = discarded == 0.0;
            for (const auto& g : candidates.generators) {
                if (coefficient_distance(g.map, current) <= kClosureTolerance) {
                    pv.matches = g.name;
                    break;
                }
            }
            report.closed = report.closed && !pv.matches.empty() && pv.exact;
            report.products.push_back(std::move(pv));
        }
        if (static_cast<int>(word.size()) == candidates.composition_depth) return;
        for (std::size_t i = 0; i < duals.size(); ++i) {
            word.push_back(i);
            if (word.size() == 1) {
                extend(duals[i]->map, 0.0);
            } else {
                // Word (g1, ..., gk) denotes g1 o ... o gk.
                const Composition c = compose(current, duals[i]->map);
                extend(c.map, discarded + c.discarded_mass);
            }
            word.pop_back();
        }
    };
    if (!duals.empty()) extend(PolyMap::identity(n), 0.0);
    return report;
}

std::string to_string(StructureVerdict v) {
    return v == StructureVerdict::ComplexStructure ? "ComplexStructure" : "AlmostComplexOnly";
}

std::string to_string(CoherenceVerdict v) {
    switch (v) {
    case CoherenceVerdict::Global: return "GLOBAL";
    case CoherenceVerdict::GlobalUpToDisplacement: return "GLOBAL-UP-TO-DISPLACEMENT";
    case CoherenceVerdict::Local: return "LOCAL";
    }
    return "UNKNOWN";
}

std::string to_string(DualityCategory c) {
    switch (c) {
    case DualityCategory::HolomorphicCanonical: return "holomorphic-canonical";
    case DualityCategory::NonholomorphicCanonical: return "nonholomorphic-canonical";
    case DualityCategory::NonCanonical: return "non-canonical";
    }
    return "unknown";
}

} // namespace cohatlas
