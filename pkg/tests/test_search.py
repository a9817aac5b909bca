"""Search engine: dominance queries, heuristics, oracle, witnesses."""

import random
from dataclasses import replace

import pytest

from cpnet import (
    BUDGET_EXHAUSTED,
    DOMINATES,
    NOT_DOMINATED,
    CPNetError,
    Flip,
    FlipSequence,
    SearchConfig,
    dominates,
    extend_suffix,
    fixed_suffix,
    legal_flips,
    oracle_closure,
    oracle_dominates,
    order_flips,
    parse_cpnet,
    validate,
    verify_witness,
)
from helpers import all_pairs, outcome, random_net

RAW = SearchConfig(
    direction="improving",
    suffix_fixing=False,
    suffix_extension=False,
    rightmost=False,
    least_improving=False,
    visited_dedup=True,
)


class TestDominatesExamples:
    def test_two_variable_positive(self, chain2):
        verdict = dominates(chain2, outcome(chain2, "A=a,B=bbar"), outcome(chain2, "A=abar,B=bbar"))
        assert verdict.kind == DOMINATES
        assert verdict.witness is not None
        assert verify_witness(
            chain2,
            outcome(chain2, "A=a,B=bbar"),
            outcome(chain2, "A=abar,B=bbar"),
            verdict.witness,
        )

    def test_incomparable_pair_both_ways(self, chain3):
        a = outcome(chain3, "A=a,B=bbar,C=c")
        b = outcome(chain3, "A=abar,B=bbar,C=cbar")
        for direction in ("improving", "worsening", "bidirectional"):
            cfg = SearchConfig(direction=direction)
            assert dominates(chain3, a, b, cfg).kind == NOT_DOMINATED
            assert dominates(chain3, b, a, cfg).kind == NOT_DOMINATED

    def test_worsening_witness_is_the_straight_line(self, chain3):
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        verdict = dominates(chain3, x, y, SearchConfig(direction="worsening"))
        assert verdict.kind == DOMINATES
        seq = verdict.witness
        assert seq.start == x
        assert [(f.variable, f.from_value, f.to_value) for f in seq.flips] == [
            ("B", "bbar", "b"),
            ("C", "c", "cbar"),
        ]
        assert verify_witness(chain3, x, y, seq)

    def test_irreflexive(self, chain3):
        for z, _ in all_pairs(chain3)[:8]:
            assert dominates(chain3, z, z).kind == NOT_DOMINATED

    def test_rightmost_reaches_target_in_two_expansions(self, chain3):
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        cfg = SearchConfig(direction="improving")
        verdict = dominates(chain3, x, y, cfg)
        assert verdict.kind == DOMINATES
        assert verdict.stats.expansions == 2
        assert verdict.stats.backtracks == 0

    def test_outcome_from_wrong_net_rejected(self, chain2, chain3):
        with pytest.raises(CPNetError):
            dominates(chain3, outcome(chain2, "A=a,B=b"), outcome(chain2, "A=a,B=bbar"))


class TestOracle:
    def test_two_variable_total_order(self, chain2):
        closure = oracle_closure(chain2)
        order = [
            outcome(chain2, "A=a,B=b"),
            outcome(chain2, "A=a,B=bbar"),
            outcome(chain2, "A=abar,B=bbar"),
            outcome(chain2, "A=abar,B=b"),
        ]
        expected_pairs = {
            (hi, lo) for i, hi in enumerate(order) for lo in order[i + 1:]
        }
        got_pairs = {(hi, lo) for lo, better in closure.items() for hi in better}
        assert got_pairs == expected_pairs
        assert len(got_pairs) == 6

    def test_chain_orders_all_but_one_pair(self, chain3):
        closure = oracle_closure(chain3)
        outcomes = list(closure)
        unordered = [
            frozenset((a, b))
            for i, a in enumerate(outcomes)
            for b in outcomes[i + 1:]
            if a not in closure[b] and b not in closure[a]
        ]
        assert unordered == [
            frozenset(
                (
                    outcome(chain3, "A=a,B=bbar,C=c"),
                    outcome(chain3, "A=abar,B=bbar,C=cbar"),
                )
            )
        ]

    def test_best_and_worst_extremes(self, indep3):
        best = outcome(indep3, "A=a,B=b,C=c")
        worst = outcome(indep3, "A=abar,B=bbar,C=cbar")
        others = [o for o, _ in all_pairs(indep3)]
        for other in set(others):
            if other != best:
                assert oracle_dominates(indep3, best, other)
            if other != worst:
                assert not oracle_dominates(indep3, worst, other)

    def test_cap(self, polytree8):
        with pytest.raises(CPNetError):
            oracle_dominates(
                polytree8,
                outcome(polytree8, "A=a,B=b,C=c,D=d,E=e,F=f,G=g,H=h"),
                outcome(polytree8, "A=abar,B=b,C=c,D=d,E=e,F=f,G=g,H=h"),
                cap=10,
            )


class TestSuffixRules:
    def test_fixed_suffix_on_polytree(self, polytree8):
        z = outcome(polytree8, "A=abar,B=b,C=cbar,D=dbar,E=ebar,F=f,G=g,H=h")
        x = outcome(polytree8, "A=a,B=b,C=c,D=d,E=ebar,F=fbar,G=g,H=h")
        suffix = fixed_suffix(polytree8, z, x)
        assert suffix.variables == frozenset({"E", "G", "H"})

    def test_full_match(self, chain3):
        z = outcome(chain3, "A=a,B=b,C=c")
        assert fixed_suffix(chain3, z, z).variables == frozenset({"A", "B", "C"})

    def test_matching_root_excluded_when_children_differ(self, chain3):
        z = outcome(chain3, "A=abar,B=b,C=cbar")
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        assert fixed_suffix(chain3, z, x).variables == frozenset()

    def test_extension_commits_the_enabled_flip(self, polytree8):
        z = outcome(polytree8, "A=abar,B=b,C=cbar,D=dbar,E=ebar,F=f,G=g,H=h")
        x = outcome(polytree8, "A=a,B=b,C=c,D=d,E=ebar,F=fbar,G=g,H=h")
        suffix = fixed_suffix(polytree8, z, x)
        flip = extend_suffix(polytree8, z, x, suffix, "improving")
        assert flip == Flip("F", "f", "fbar", "improving")

    def test_extension_stops_when_no_legal_move(self, polytree8):
        z = outcome(polytree8, "A=abar,B=b,C=cbar,D=dbar,E=ebar,F=fbar,G=g,H=h")
        x = outcome(polytree8, "A=a,B=b,C=c,D=d,E=ebar,F=fbar,G=g,H=h")
        suffix = fixed_suffix(polytree8, z, x)
        assert suffix.variables == frozenset({"E", "F", "G", "H"})
        assert extend_suffix(polytree8, z, x, suffix, "improving") is None

    def test_extension_trivial_when_equal(self, chain3):
        z = outcome(chain3, "A=a,B=b,C=c")
        suffix = fixed_suffix(chain3, z, z)
        assert extend_suffix(chain3, z, z, suffix, "improving") is None


class TestOrderFlips:
    def test_rightmost_first(self, chain3):
        z = outcome(chain3, "A=abar,B=b,C=cbar")
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        candidates = legal_flips(chain3, z, "improving")
        ordered = order_flips(chain3, z, candidates, x, SearchConfig())
        assert [f.variable for f in ordered] == ["C", "B", "A"]

    def test_least_improving_prefers_small_steps(self, ternary_root):
        z = outcome(ternary_root, "A=a3,B=b")
        x = outcome(ternary_root, "A=a1,B=bbar")
        candidates = legal_flips(ternary_root, z, "improving")
        ordered = order_flips(ternary_root, z, candidates, x, SearchConfig())
        assert [f.to_value for f in ordered] == ["a2", "a1"]
        greedy = order_flips(
            ternary_root, z, candidates, x, SearchConfig(least_improving=False)
        )
        assert [f.to_value for f in greedy] == ["a1", "a2"]

    def test_single_candidate_unchanged(self, chain3):
        z = outcome(chain3, "A=abar,B=bbar,C=cbar")
        x = outcome(chain3, "A=a,B=bbar,C=cbar")
        candidates = legal_flips(chain3, z, "improving")
        assert len(candidates) == 1
        assert order_flips(chain3, z, candidates, x, SearchConfig()) == candidates


class TestVerifyWitness:
    def test_worsening_chain_accepted(self, chain3):
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        seq = FlipSequence(
            x,
            (
                Flip("B", "bbar", "b", "worsening"),
                Flip("C", "c", "cbar", "worsening"),
            ),
        )
        assert verify_witness(chain3, x, y, seq)

    def test_transposed_flips_rejected(self, chain3):
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        seq = FlipSequence(
            x,
            (
                Flip("C", "c", "cbar", "worsening"),
                Flip("B", "bbar", "b", "worsening"),
            ),
        )
        assert not verify_witness(chain3, x, y, seq)

    def test_empty_sequence_rejected(self, chain3):
        z = outcome(chain3, "A=a,B=b,C=c")
        assert not verify_witness(chain3, z, z, FlipSequence(z, ()))


class TestHeuristicNecessity:
    def test_greedy_jump_backtracks(self, ternary_root):
        x = outcome(ternary_root, "A=a1,B=bbar")
        y = outcome(ternary_root, "A=a3,B=b")
        adversarial = SearchConfig(direction="improving", least_improving=False)
        verdict = dominates(ternary_root, x, y, adversarial)
        assert verdict.kind == DOMINATES
        assert verdict.stats.backtracks >= 1

    def test_least_improving_is_backtrack_free_here(self, ternary_root):
        x = outcome(ternary_root, "A=a1,B=bbar")
        y = outcome(ternary_root, "A=a3,B=b")
        verdict = dominates(ternary_root, x, y, SearchConfig(direction="improving"))
        assert verdict.kind == DOMINATES
        assert verdict.stats.backtracks == 0

    def test_ternary_chain_positive(self, ternary_mid):
        x = outcome(ternary_mid, "A=a,B=b3,C=cbar")
        y = outcome(ternary_mid, "A=abar,B=b1,C=c")
        for direction in ("improving", "worsening", "bidirectional"):
            verdict = dominates(ternary_mid, x, y, SearchConfig(direction=direction))
            assert verdict.kind == DOMINATES
            if verdict.witness is not None:
                assert verify_witness(ternary_mid, x, y, verdict.witness)


class TestDirectionAsymmetry:
    def test_branching_side_is_slower(self, chain3):
        x = outcome(chain3, "A=abar,B=bbar,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        improving = dominates(chain3, x, y, RAW)
        worsening = dominates(chain3, x, y, replace(RAW, direction="worsening"))
        assert improving.kind == worsening.kind == DOMINATES
        assert worsening.stats.expansions < improving.stats.expansions

    def test_asymmetry_reverses_on_the_mirror_query(self, chain3):
        x = outcome(chain3, "A=a,B=b,C=c")
        y = outcome(chain3, "A=abar,B=bbar,C=cbar")
        improving = dominates(chain3, x, y, RAW)
        worsening = dominates(chain3, x, y, replace(RAW, direction="worsening"))
        assert improving.kind == worsening.kind == DOMINATES
        assert improving.stats.expansions < worsening.stats.expansions


POLY3_TEXT = """
var A: a, abar
var B: b, bbar
var C: c, cbar
parents C: A, B
cpt A: a > abar
cpt B: b > bbar
cpt C | A=a,B=b: c > cbar
cpt C | A=a,B=bbar: cbar > c
cpt C | A=abar,B=b: cbar > c
cpt C | A=abar,B=bbar: c > cbar
"""


@pytest.fixture(scope="module")
def poly3():
    net = parse_cpnet(POLY3_TEXT).net
    assert validate(net).ok
    return net


class TestPolytreeBacktracking:
    def test_leftmost_order_backtracks_on_parent_choice(self, poly3):
        x = outcome(poly3, "A=a,B=bbar,C=c")
        y = outcome(poly3, "A=abar,B=bbar,C=cbar")
        cfg = SearchConfig(
            direction="improving",
            suffix_fixing=False,
            suffix_extension=False,
            rightmost=False,
        )
        verdict = dominates(poly3, x, y, cfg)
        assert verdict.kind == DOMINATES
        assert verdict.stats.backtracks >= 1

    def test_full_heuristics_avoid_it_here(self, poly3):
        x = outcome(poly3, "A=a,B=bbar,C=c")
        y = outcome(poly3, "A=abar,B=bbar,C=cbar")
        verdict = dominates(poly3, x, y, SearchConfig(direction="improving"))
        assert verdict.kind == DOMINATES
        assert verdict.stats.backtracks == 0


class TestBudget:
    def test_budget_reports_exhaustion_not_failure(self, chain3):
        x = outcome(chain3, "A=a,B=b,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        verdict = dominates(chain3, x, y, SearchConfig(direction="improving", budget=1))
        assert verdict.kind == BUDGET_EXHAUSTED

    def test_budget_never_fakes_a_negative(self, chain3):
        x = outcome(chain3, "A=a,B=b,C=c")
        y = outcome(chain3, "A=abar,B=b,C=cbar")
        assert oracle_dominates(chain3, x, y)
        for budget in range(1, 12):
            verdict = dominates(
                chain3, x, y, SearchConfig(direction="improving", budget=budget)
            )
            assert verdict.kind in (DOMINATES, BUDGET_EXHAUSTED)

    def test_zero_budget_rejected(self):
        with pytest.raises(CPNetError):
            SearchConfig(budget=0)


class TestWitnessComposition:
    def test_concatenation_verifies(self, chain2):
        top = outcome(chain2, "A=a,B=b")
        mid = outcome(chain2, "A=abar,B=bbar")
        low = outcome(chain2, "A=abar,B=b")
        cfg = SearchConfig(direction="improving")
        w1 = dominates(chain2, top, mid, cfg).witness
        w2 = dominates(chain2, mid, low, cfg).witness
        combined = FlipSequence(w2.start, w2.flips + w1.flips)
        assert verify_witness(chain2, top, low, combined)


class TestOracleEquivalenceSmoke:
    """A fast cross-check; the acceptance suite runs the full sweep."""

    def test_random_nets_match_oracle(self):
        rng = random.Random(123)
        for _ in range(12):
            net = random_net(rng, rng.randint(1, 4))
            closure = oracle_closure(net)
            for x, y in all_pairs(net):
                expected = x in closure[y]
                for direction in ("improving", "worsening", "bidirectional"):
                    verdict = dominates(net, x, y, SearchConfig(direction=direction))
                    assert (verdict.kind == DOMINATES) == expected, (
                        net.names,
                        x,
                        y,
                        direction,
                    )
                    if verdict.kind == DOMINATES:
                        assert verify_witness(net, x, y, verdict.witness)

    def test_never_both_directions_dominate(self):
        rng = random.Random(321)
        for _ in range(10):
            net = random_net(rng, rng.randint(2, 4))
            for x, y in all_pairs(net)[:40]:
                forward = dominates(net, x, y).kind == DOMINATES
                backward = dominates(net, y, x).kind == DOMINATES
                assert not (forward and backward)
