// tests/test_atlas.cpp
#include "cohatlas/atlas.hpp"
#include "cohatlas/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

using namespace cohatlas;

namespace {

PolyMap bogoliubov(double t) { return PolyMap::linear(std::cosh(t), std::sinh(t)); }

Atlas two_charts(const PolyMap& forward) {
    Atlas atlas(forward.n_modes());
    atlas.add_chart({"A", {}});
    atlas.add_chart({"B", {}});
    atlas.add_transition("A", "B", forward);
    return atlas;
}

std::vector<CoherentLabel> probes() { return {{{Complex(0.3, 0.1)}}, {{Complex(-0.5, 0.4)}}, {{Complex(0.8)}}}; }

PolyMap random_holomorphic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    PolyMap f(1);
    f.add_term(0, std::polar(1.0, 3 * u(rng)), {1}, {0});
    for (int j = 2; j <= 3; ++j) f.add_term(0, {u(rng), u(rng)}, {j}, {0});
    return f;
}

} // namespace

TEST(Atlas, Validation) {
    Atlas atlas(1);
    atlas.add_chart({"A", {}});
    EXPECT_THROW(atlas.add_chart({"A", {}}), ValidationError);
    EXPECT_THROW(atlas.add_chart({"bad name", {}}), ValidationError);
    EXPECT_THROW(atlas.add_transition("A", "Z", PolyMap::identity(1)), ValidationError);
    atlas.add_chart({"B", {}});
    atlas.add_chart({"C", {}});
    atlas.add_transition("A", "B", PolyMap::identity(1));
    EXPECT_FALSE(atlas.connected());
    EXPECT_THROW(classify_atlas(atlas), ValidationError);
    atlas.add_transition("C", "B", PolyMap::linear(1.0, 0.0, 1.0));
    EXPECT_TRUE(atlas.connected());
    EXPECT_NO_THROW(atlas.validate());
    EXPECT_THROW(atlas.add_transition("A", "B", PolyMap::identity(1)), ValidationError);
    EXPECT_THROW(atlas.add_transition("A", "C", PolyMap::identity(2)), ValidationError);
}

TEST(Atlas, InversePairsChecked) {
    Atlas atlas = two_charts(bogoliubov(0.5));
    atlas.add_transition("B", "A", bogoliubov(-0.5));
    EXPECT_LE(atlas.inverse_defects().at({"A", "B"}), 1e-12);
    EXPECT_NO_THROW(atlas.validate());

    Atlas wrong = two_charts(bogoliubov(0.5));
    wrong.add_transition("B", "A", bogoliubov(0.5));
    EXPECT_THROW(wrong.validate(), ValidationError);
}

TEST(Atlas, TextRoundTrip) {
    Atlas atlas(2);
    atlas.add_chart({"north", {-1.0, 1.0, -0.5, 0.1}});
    atlas.add_chart({"south", {}});
    atlas.add_chart({"east", {0.1, 0.30000000000000004, -2.0, 2.0}});
    PolyMap f(2);
    f.add_term(0, Complex(0.1, 1.0 / 3.0), {1, 0}, {0, 1});
    f.add_term(1, std::exp(1.0), {0, 1}, {0, 0});
    atlas.add_transition("north", "south", f);
    atlas.add_transition("east", "south", PolyMap::identity(2));
    const std::string text = serialize(atlas);
    const Atlas back = parse_atlas(text);
    EXPECT_EQ(back, atlas);
    EXPECT_EQ(serialize(back), text);
}

TEST(Atlas, ParseErrors) {
    EXPECT_THROW(parse_atlas(""), ValidationError);
    EXPECT_THROW(parse_atlas("atlas 2 1\n"), ValidationError);
    EXPECT_THROW(parse_atlas("atlas 1 1\nchart A 0 1 0\n"), ValidationError);
    EXPECT_THROW(parse_atlas("atlas 1 1\nchart A -1 1 -1 1\nchart B -1 1 -1 1\ntransition A B\n1 0 : 1 : 0\n"),
                 ValidationError);
    EXPECT_THROW(parse_atlas("atlas 1 1\nwidget\n"), ValidationError);
}

TEST(Classify, Examples) {
    Atlas single(1);
    single.add_chart({"only", {}});
    EXPECT_EQ(classify_atlas(single).verdict, StructureVerdict::ComplexStructure);

    EXPECT_EQ(classify_atlas(two_charts(PolyMap::linear(1.0, 0.0, 1.0))).verdict, StructureVerdict::ComplexStructure);

    const auto b = classify_atlas(two_charts(bogoliubov(0.5)));
    EXPECT_EQ(b.verdict, StructureVerdict::AlmostComplexOnly);
    ASSERT_EQ(b.witnesses.size(), 1u);
    EXPECT_EQ(b.witnesses[0].pair, (ChartPair{"A", "B"}));
    EXPECT_EQ(b.witnesses[0].classification.kind, Holomorphy::Mixed);
}

TEST(Classify, OrderIndependent) {
    std::mt19937_64 rng(41);
    std::vector<std::string> names{"c0", "c1", "c2", "c3", "c4"};
    std::vector<std::pair<int, PolyMap>> maps;
    for (int i = 1; i < 5; ++i) {
        maps.emplace_back(i, i == 3 ? bogoliubov(0.2) : random_holomorphic(rng));
    }
    const auto build = [&](std::vector<std::string> order, std::vector<std::pair<int, PolyMap>> links) {
        Atlas a(1);
        for (const auto& n : order) a.add_chart({n, {}});
        for (const auto& [i, m] : links) a.add_transition(names[static_cast<std::size_t>(i - 1)], names[static_cast<std::size_t>(i)], m);
        return classify_atlas(a);
    };
    const auto reference = build(names, maps);
    EXPECT_EQ(reference.verdict, StructureVerdict::AlmostComplexOnly);
    for (int trial = 0; trial < 10; ++trial) {
        auto order = names;
        auto links = maps;
        std::shuffle(order.begin(), order.end(), rng);
        std::shuffle(links.begin(), links.end(), rng);
        const auto c = build(order, links);
        EXPECT_EQ(c.verdict, reference.verdict);
        ASSERT_EQ(c.witnesses.size(), 1u);
        EXPECT_EQ(c.witnesses[0].pair, reference.witnesses[0].pair);
    }
}

TEST(Coherence, RotationsAreGlobal) {
    Atlas atlas(1);
    for (const char* n : {"A", "B", "C"}) atlas.add_chart({n, {}});
    atlas.add_transition("A", "B", PolyMap::linear(std::polar(1.0, 0.7), 0.0));
    atlas.add_transition("B", "C", PolyMap::linear(std::polar(1.0, -2.1), 0.0));
    atlas.add_transition("B", "A", PolyMap::linear(std::polar(1.0, -0.7), 0.0));
    const auto rep = coherence_report(atlas, ModeSpec::make(1, 32), probes());
    EXPECT_EQ(rep.verdict, CoherenceVerdict::Global);
    EXPECT_TRUE(rep.disagreeing_observers.empty());
    for (const auto& t : rep.transitions) {
        EXPECT_EQ(t.vacuum_residual, 0.0);
        EXPECT_NEAR(t.vacuum_overlap, 1.0, 1e-15);
    }
}

TEST(Coherence, BogoliubovIsLocal) {
    const auto rep = coherence_report(two_charts(bogoliubov(0.5)), ModeSpec::make(1, 48), probes());
    EXPECT_EQ(rep.verdict, CoherenceVerdict::Local);
    ASSERT_EQ(rep.disagreeing_observers.size(), 1u);
    EXPECT_EQ(rep.disagreeing_observers[0], (ChartPair{"A", "B"}));
    EXPECT_NEAR(rep.transitions[0].vacuum_overlap, 1.0 / std::sqrt(std::cosh(0.5)), 1e-6);
    EXPECT_NEAR(rep.transitions[0].vacuum_overlap, 0.94171, 5e-6);
    EXPECT_NEAR(rep.transitions[0].vacuum_residual, std::sinh(0.5), 1e-14);
    // The primed family built on |0'> does carry the classical eigenvalue.
    for (const auto& p : rep.transitions[0].probes) EXPECT_LE(p.primed_family_residual[0], 1e-6);
}

TEST(Coherence, MixedSumIsLocal) {
    const auto rep = coherence_report(two_charts(PolyMap::linear(1.0, 1.0)), ModeSpec::make(1, 32), probes());
    EXPECT_EQ(rep.verdict, CoherenceVerdict::Local);
    EXPECT_NEAR(rep.transitions[0].vacuum_residual, 1.0, 1e-15);
    for (const auto& p : rep.transitions[0].probes) EXPECT_FALSE(p.within_bounds);
}

TEST(Coherence, ShiftedHolomorphicIsGlobalUpToDisplacement) {
    const auto rep = coherence_report(two_charts(PolyMap::linear(1.0, 0.0, Complex(0.25, -0.5))), ModeSpec::make(1, 32),
                                      probes());
    EXPECT_EQ(rep.verdict, CoherenceVerdict::GlobalUpToDisplacement);
    EXPECT_EQ(rep.transitions[0].origin_offset[0], Complex(0.25, -0.5));
    EXPECT_TRUE(rep.disagreeing_observers.empty());
}

TEST(Coherence, HolomorphicAtlasesAreGlobal) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        Atlas atlas(1);
        const int charts = 2 + trial % 3;
        for (int c = 0; c < charts; ++c) atlas.add_chart({"c" + std::to_string(c), {}});
        for (int c = 1; c < charts; ++c) atlas.add_transition("c0", "c" + std::to_string(c), random_holomorphic(rng));
        ASSERT_EQ(classify_atlas(atlas).verdict, StructureVerdict::ComplexStructure);
        const auto rep = coherence_report(atlas, ModeSpec::make(1, 40), probes());
        EXPECT_EQ(rep.verdict, CoherenceVerdict::Global) << trial;
    }
}

TEST(Coherence, AntiholomorphicLinearTermForcesLocal) {
    for (double beta : {1e-3, 1e-6}) {
        const auto rep = coherence_report(two_charts(PolyMap::linear(1.0, beta)), ModeSpec::make(1, 40), probes());
        EXPECT_EQ(rep.verdict, CoherenceVerdict::Local) << beta;
    }
}

TEST(Coherence, TwoModeAtlas) {
    PolyMap swap(2);
    swap.add_term(0, 1.0, {0, 1}, {0, 0});
    swap.add_term(1, Complex(0, 1), {1, 0}, {0, 0});
    const std::vector<CoherentLabel> p{{{Complex(0.2, 0.1), Complex(-0.3)}}};
    const auto rep = coherence_report(two_charts(swap), ModeSpec::make(2, 12), p);
    EXPECT_EQ(rep.verdict, CoherenceVerdict::Global);
}

TEST(Duality, IdentityOnly) {
    const auto rep = duality_filter({{{"id", PolyMap::identity(1)}}, 2}, SymplecticForm::canonical(1));
    ASSERT_EQ(rep.generators.size(), 1u);
    EXPECT_EQ(rep.generators[0].category, DualityCategory::HolomorphicCanonical);
    EXPECT_TRUE(rep.closed);
    EXPECT_TRUE(rep.products.empty());
}

TEST(Duality, ConjugationIsAnticanonical) {
    PolyMap conj(1);
    conj.add_term(0, 1.0, {0}, {1});
    const auto rep = duality_filter({{{"conj", conj}}, 1}, SymplecticForm::canonical(1));
    EXPECT_EQ(rep.generators[0].category, DualityCategory::NonCanonical);
    EXPECT_TRUE(rep.generators[0].anticanonical);
    EXPECT_EQ(rep.generators[0].classification.kind, Holomorphy::Antiholomorphic);
}

TEST(Duality, BogoliubovGroupLaw) {
    DualityCandidateSet set{{{"B0.3", bogoliubov(0.3)}, {"B0.5", bogoliubov(0.5)}}, 2};
    const auto rep = duality_filter(set, SymplecticForm::canonical(1));
    for (const auto& g : rep.generators) EXPECT_EQ(g.category, DualityCategory::NonholomorphicCanonical);
    EXPECT_FALSE(rep.closed);
    ASSERT_EQ(rep.products.size(), 4u);
    // Products B(s)B(t) = B(s + t): 0.6, 0.8, 0.8, 1.0.
    const std::vector<double> sums{0.6, 0.8, 0.8, 1.0};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_TRUE(rep.products[i].exact);
        EXPECT_LE(coefficient_distance(rep.products[i].product, bogoliubov(sums[i])), 1e-15);
        EXPECT_TRUE(rep.products[i].matches.empty());
    }

    // With the sums added, the depth-2 products of the original pair land inside the set.
    DualityCandidateSet bigger = set;
    bigger.generators.push_back({"B0.6", bogoliubov(0.6)});
    bigger.generators.push_back({"B0.8", bogoliubov(0.8)});
    bigger.generators.push_back({"B1.0", bogoliubov(1.0)});
    const auto rep2 = duality_filter(bigger, SymplecticForm::canonical(1));
    for (const auto& p : rep2.products) {
        const bool original = std::all_of(p.word.begin(), p.word.end(),
                                          [](const std::string& w) { return w == "B0.3" || w == "B0.5"; });
        if (original) EXPECT_FALSE(p.matches.empty());
    }
}

TEST(Duality, QuarterTurnTimesConjugationIsAnticanonical) {
    DualityCandidateSet set{{{"id", PolyMap::identity(1)}, {"R", PolyMap::linear(0.0, Complex(0, 1))}}, 3};
    const auto rep = duality_filter(set, SymplecticForm::canonical(1));
    EXPECT_EQ(rep.generators[1].category, DualityCategory::NonCanonical);
    EXPECT_TRUE(rep.generators[1].anticanonical);
    EXPECT_TRUE(rep.products.empty());
    EXPECT_TRUE(rep.closed);
}

TEST(Duality, PartitionInvariantUnderRelabeling) {
    std::vector<NamedMap> gens{{"a", bogoliubov(0.3)}, {"b", PolyMap::identity(1)}, {"c", PolyMap::linear(2.0, 0.0)},
                               {"d", PolyMap::linear(0.0, 1.0)}, {"e", PolyMap::linear(std::polar(1.0, 0.4), 0.0)}};
    const auto reference = duality_filter({gens, 1}, SymplecticForm::canonical(1));
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<NamedMap> relabeled;
        for (std::size_t i = 0; i < gens.size(); ++i) relabeled.push_back({"g" + std::to_string(perm[i]), gens[i].map});
        std::shuffle(relabeled.begin(), relabeled.end(), rng);
        const auto rep = duality_filter({relabeled, 1}, SymplecticForm::canonical(1));
        for (const auto& g : rep.generators) {
            const auto idx = static_cast<std::size_t>(std::find(perm.begin(), perm.end(), std::stoul(g.name.substr(1))) - perm.begin());
            EXPECT_EQ(g.category, reference.generators[idx].category);
        }
    }
}

TEST(Duality, DegreeOverflowMarksInexact) {
    // Shears p' = p + q^2 and q' = q + p^2 are canonical; alternating them raises the degree.
    const double r = 1.0 / (2.0 * std::sqrt(2.0));
    PolyMap s1 = PolyMap::identity(1), s2 = PolyMap::identity(1);
    for (const auto& [j, k, m] : std::vector<std::tuple<int, int, double>>{{2, 0, 1.0}, {1, 1, 2.0}, {0, 2, 1.0}}) {
        s1.add_term(0, Complex(0.0, r * m), {j}, {k});
        s2.add_term(0, -r * m * (k == 1 ? -1.0 : 1.0), {j}, {k});
    }
    const auto rep = duality_filter({{{"s1", s1}, {"s2", s2}}, 3}, SymplecticForm::canonical(1));
    ASSERT_EQ(rep.generators[0].category, DualityCategory::NonholomorphicCanonical);
    ASSERT_EQ(rep.generators[1].category, DualityCategory::NonholomorphicCanonical);
    ASSERT_EQ(rep.products.size(), 12u);
    int inexact = 0;
    for (const auto& p : rep.products) {
        if (p.word.size() == 2) EXPECT_TRUE(p.exact);
        if (!p.exact) {
            ++inexact;
            EXPECT_GT(p.discarded_mass, 0.0);
        }
        // s_i o s_i stays a shear of degree 2.
        if (p.word.size() == 2 && p.word[0] == p.word[1]) EXPECT_EQ(p.product.degree(), 2);
    }
    EXPECT_GT(inexact, 0);
    EXPECT_FALSE(rep.closed);
}

TEST(Duality, Validation) {
    EXPECT_THROW(duality_filter({{}, 1}, SymplecticForm::canonical(1)), ValidationError);
    EXPECT_THROW(duality_filter({{{"x", PolyMap::identity(1)}}, 0}, SymplecticForm::canonical(1)), ValidationError);
    EXPECT_THROW(duality_filter({{{"x", PolyMap::identity(1)}, {"x", PolyMap::identity(1)}}, 1},
                                SymplecticForm::canonical(1)),
                 ValidationError);
    EXPECT_THROW(duality_filter({{{"x", PolyMap::identity(1)}}, 1}, SymplecticForm::canonical(2)), ValidationError);
}

TEST(Verdicts, Strings) {
    EXPECT_EQ(to_string(CoherenceVerdict::Global), "GLOBAL");
    EXPECT_EQ(to_string(CoherenceVerdict::GlobalUpToDisplacement), "GLOBAL-UP-TO-DISPLACEMENT");
    EXPECT_EQ(to_string(CoherenceVerdict::Local), "LOCAL");
}
