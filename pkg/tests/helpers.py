"""Shared test machinery: fixture loading, random net generators, oracles."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from cpnet import (
    CPNet,
    Outcome,
    Variable,
    dsl,
    model,
)
from cpnet.model import validate

FIXTURES = Path(__file__).parent / "fixtures"


def load_net(name: str) -> CPNet:
    result = dsl.parse_cpnet((FIXTURES / f"{name}.cpnet").read_text())
    assert result.ok, [str(d) for d in result.diagnostics]
    report = validate(result.net)
    assert report.ok, report.problems
    return result.net


def outcome(net: CPNet, text: str) -> Outcome:
    """Shorthand: build an outcome from 'A=a,B=b' text."""
    return dsl.parse_outcome(net, text)


def o_values(net: CPNet, *values: str) -> Outcome:
    """Build an outcome positionally, in variable declaration order."""
    return Outcome(tuple(values))


def make_net(spec: list[tuple[str, list[str], list[str]]], rows: dict) -> CPNet:
    """Construct a net from (name, domain, parents) triples and a
    {name: {parent-values-tuple: ranking-tuple}} table map."""
    variables = [Variable(n, tuple(d), tuple(p)) for n, d, p in spec]
    net = CPNet(variables, rows)
    report = validate(net)
    assert report.ok, report.problems
    return net


# -- random generators -------------------------------------------------------


def _random_tables(
    rng: random.Random, variables: list[Variable]
) -> dict[str, dict[tuple[str, ...], tuple[str, ...]]]:
    domains = {v.name: v.domain for v in variables}
    tables: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for v in variables:
        rows: dict[tuple[str, ...], tuple[str, ...]] = {}
        parent_domains = [domains[p] for p in v.parents]
        for cond in itertools.product(*parent_domains) if v.parents else [()]:
            ranking = list(v.domain)
            rng.shuffle(ranking)
            rows[cond] = tuple(ranking)
        tables[v.name] = rows
    return tables


def _finish(rng: random.Random, variables: list[Variable]) -> CPNet:
    net = CPNet(variables, _random_tables(rng, variables))
    report = validate(net)
    assert report.ok, report.problems
    return net


def random_net(
    rng: random.Random,
    n_vars: int,
    domain_sizes: tuple[int, ...] = (2,),
    max_parents: int = 3,
) -> CPNet:
    """A random acyclic net: each variable picks parents among earlier ones."""
    variables: list[Variable] = []
    for i in range(n_vars):
        size = rng.choice(domain_sizes)
        domain = tuple(f"v{i}_{k}" for k in range(size))
        k = rng.randint(0, min(max_parents, i))
        parents = tuple(v.name for v in rng.sample(variables, k)) if k else ()
        variables.append(Variable(f"X{i}", domain, parents))
    return _finish(rng, variables)


def random_chain(rng: random.Random, n_vars: int) -> CPNet:
    """A binary chain X0 -> X1 -> ... -> Xn-1 with random rankings."""
    variables = [
        Variable(
            f"X{i}",
            (f"v{i}_0", f"v{i}_1"),
            (f"X{i-1}",) if i else (),
        )
        for i in range(n_vars)
    ]
    return _finish(rng, variables)


def random_tree(rng: random.Random, n_vars: int) -> CPNet:
    """A binary net where every variable has at most one (earlier) parent."""
    variables: list[Variable] = []
    for i in range(n_vars):
        parents: tuple[str, ...] = ()
        if i and rng.random() < 0.9:
            parents = (f"X{rng.randrange(i)}",)
        variables.append(Variable(f"X{i}", (f"v{i}_0", f"v{i}_1"), parents))
    return _finish(rng, variables)


def all_pairs(net: CPNet) -> list[tuple[Outcome, Outcome]]:
    outcomes = [
        Outcome(values)
        for values in itertools.product(*(v.domain for v in net.variables))
    ]
    return [(a, b) for a in outcomes for b in outcomes if a != b]


def brute_force_improving_flips(net: CPNet, z: Outcome) -> set[tuple[str, str, str]]:
    """Independent route: read each variable's row and list every strictly
    better value, without going through legal_flips."""
    found: set[tuple[str, str, str]] = set()
    for v in net.variables:
        cond = tuple(z.values[net.index(p)] for p in v.parents)
        ranking = net.tables[v.name][cond]
        current = z.values[net.index(v.name)]
        for candidate in ranking:
            if candidate == current:
                break
            found.add((v.name, current, candidate))
    return found
