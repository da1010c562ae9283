"""Command-line verification harness with machine-readable reports.

Commands run the verification pipelines (verify-fan2, verify-fan3,
bordism-table) or the measure-partition solver (solve, explore-3fan) and
emit either human-readable text or JSON.  Exit codes: 0 all checks pass /
converged, 1 a mathematical check failed (with witness), 2 usage or
validation error, 3 search budget exhausted without convergence.
"""
from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import click

from . import __version__
from .arrangement import (
    AlphaVector,
    RepSpec,
    build_arrangement,
    check_conditions,
    verify_prop_two,
)
from .bordism import classify
from .eqmap import (
    EquivarianceError,
    TransversalityError,
    build_map_fan2,
    build_map_fan3,
    check_equivariance,
    find_good_triangles,
    label_invariants,
    trace_components,
)
from .fanmeasure import load_measure, sector_masses
from .joinsphere import CONTRA, COROT, build_complex
from .qgroup import GroupSpec, QElement, abelianize, q_neg_one
from .solver import SolveRequest, explore_3fan_2measures, solve_2fan_3measures

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def rat(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


@dataclass
class Check:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class Report:
    command: str
    parameters: dict
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    version: str = __version__
    notes: list = field(default_factory=list)

    def add(self, name, passed, **witness):
        self.checks.append(Check(name, bool(passed), witness))

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "checks": [c.to_dict() for c in self.checks],
            "notes": self.notes,
            "timings": self.timings,
            "version": self.version,
            "all_pass": self.all_pass,
        }

    def render(self) -> str:
        lines = [f"{self.command} {self.parameters}"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            extra = f"  {c.witness}" if c.witness else ""
            lines.append(f"  [{mark}] {c.name}{extra}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append(f"  all checks pass: {self.all_pass}")
        return "\n".join(lines)


def _factors_name(factors) -> str:
    return " + ".join(f"Z/{f}" for f in factors) or "0"


def _stab_names(stab) -> list:
    return [str(g) for g in stab]


def cmd_verify_fan2(n: int, p: int = 1) -> Report:
    """Full 2-fan pipeline: arrangement conditions through bordism class."""
    if n % 2 == 0 or n < 3:
        raise click.UsageError("verify-fan2 requires odd n >= 3")
    if not (1 <= p <= n - 1):
        raise click.UsageError("require 1 <= p <= n-1")
    report = Report("verify-fan2", {"n": n, "p": p})
    t0 = time.perf_counter()

    if p > 1:
        pt = verify_prop_two(n, p)
        report.add(
            "reduction-identities",
            pt.identities_hold and pt.nonsingular,
            det_c=rat(pt.det_c),
        )
        report.notes.append(
            f"p={p} reduced to p=1 via the window-sum intertwiner"
        )

    spec = RepSpec(n, 3)
    alpha = AlphaVector((1, n - 1), n)
    arr = build_arrangement(alpha, spec)
    cond = check_conditions(arr)
    report.add("condition-a1", cond.a1, witnesses=list(cond.witnesses))
    report.add("condition-a2", cond.a2)
    report.add("condition-a3", cond.a3)

    cx = build_complex(n, CONTRA)
    report.add("free-action", cx.check_free_action())
    vmap = build_map_fan2(n)
    report.add("equivariance", check_equivariance(vmap, cx))

    try:
        crossings = find_good_triangles(vmap, cx, arr)
    except TransversalityError as exc:
        report.add("transversality", False, error=str(exc))
        report.timings["total_s"] = time.perf_counter() - t0
        return report
    report.add(
        "transversality", len(crossings) == 8 * n * n, crossings=len(crossings)
    )

    try:
        singular = trace_components(crossings, cx, vmap, arr)
    except EquivarianceError as exc:
        report.add("component-tracing", False, error=str(exc))
        report.timings["total_s"] = time.perf_counter() - t0
        return report

    o_comps = singular.components_of_subspace(0)
    report.add("o-components", len(o_comps) == 2, count=len(o_comps))
    report.add(
        "delta-components",
        len(singular.components) == 2 * n,
        count=len(singular.components),
    )

    labels = label_invariants(singular, n)
    report.add(
        "label-structure",
        labels.structure_ok and labels.counts_ok and labels.gamma_separates,
        constants=list(labels.constants),
    )

    gspec = GroupSpec(n)
    minus_one = q_neg_one(gspec)
    expected_stab = {QElement(0, 0), minus_one}
    stab_ok = all(set(s) == expected_stab for s in singular.stabilizers)
    report.add(
        "component-stabilizers",
        stab_ok,
        expected=_stab_names(sorted(expected_stab, key=str)),
        observed=_stab_names(singular.stabilizers[0]),
        observed_order=len(singular.stabilizers[0]),
    )

    cls = classify(singular, gspec)
    report.add(
        "bordism-class",
        cls.value == (2,),
        expected=[2],
        observed=list(cls.value),
        group=_factors_name(cls.structure.invariant_factors),
    )
    report.timings["total_s"] = time.perf_counter() - t0
    return report


def cmd_verify_fan3(n: int, a) -> Report:
    """3-fan pipeline: equivariance, transversality, stabilizers, class."""
    a = tuple(int(x) for x in a)
    if n % 2 == 0 or n < 3:
        raise click.UsageError("verify-fan3 requires odd n >= 3")
    if len(a) != 3 or any(x < 1 for x in a) or sum(a) != n:
        raise click.UsageError("alpha must be three positive integers summing to n")
    report = Report("verify-fan3", {"n": n, "alpha": list(a)})
    t0 = time.perf_counter()
    distinct = len(set(a)) == 3

    spec = RepSpec(n, 2)
    alpha = AlphaVector(a, n)
    arr = build_arrangement(alpha, spec)

    cx = build_complex(n, COROT)
    report.add("free-action", cx.check_free_action())
    vmap = build_map_fan3(n)
    report.add("equivariance", check_equivariance(vmap, cx))

    try:
        crossings = find_good_triangles(vmap, cx, arr)
        singular = trace_components(crossings, cx, vmap, arr)
    except (TransversalityError, EquivarianceError) as exc:
        report.add("transversality", False, error=str(exc))
        report.timings["total_s"] = time.perf_counter() - t0
        return report
    report.add("transversality", True, crossings=len(crossings))

    o_comps = singular.components_of_subspace(0)
    report.add("o-components", len(o_comps) == 2, count=len(o_comps))

    # arrangement-level stabilizer H_alpha of the base subspace; for three
    # equal entries the symmetric-group structure lives at the quotient
    # (dihedral) level, so report the stabilizer there
    if len(set(a)) == 1:
        h_alpha = arr.stabilizers_d[0]
        expected_order = 6
    else:
        h_alpha = arr.stabilizers_q[0]
        expected_order = 2 if distinct else 4
    report.add(
        "arrangement-stabilizer",
        len(h_alpha) == expected_order,
        expected_order=expected_order,
        observed_order=len(h_alpha),
        elements=_stab_names(h_alpha),
    )

    if distinct:
        gspec = GroupSpec(n)
        minus_one = q_neg_one(gspec)
        stab_ok = all(set(s) == {QElement(0, 0)} for s in singular.stabilizers)
        report.add(
            "component-stabilizers-trivial",
            stab_ok,
            observed=_stab_names(singular.stabilizers[0]),
            observed_order=len(singular.stabilizers[0]),
        )
        cls = classify(singular, gspec)
        report.add(
            "bordism-class",
            cls.value == (0,),
            expected=[0],
            observed=list(cls.value),
            group=_factors_name(cls.structure.invariant_factors),
        )
    else:
        report.notes.append(
            "repeated alpha entries: the singular set is not freely and "
            "orientably acted on, so the class computation is skipped; "
            "structure checks only"
        )
        report.add(
            "orientation-equivariance-absent",
            not singular.orientation_equivariant,
            orientation_equivariant=singular.orientation_equivariant,
        )
    report.timings["total_s"] = time.perf_counter() - t0
    return report


def cmd_bordism_table(max_n: int) -> Report:
    if max_n < 1:
        raise click.UsageError("--max-n must be >= 1")
    report = Report("bordism-table", {"max_n": max_n})
    rows = []
    for n in range(1, max_n + 1):
        st = abelianize(GroupSpec(n), "Q")
        rows.append(
            {
                "n": n,
                "group": f"Q_{4 * n}",
                "abelianization": _factors_name(st.invariant_factors),
                "parity": "odd" if n % 2 else "even",
                "in_scope": n % 2 == 1,
            }
        )
    expected = lambda n: (4,) if (n % 2 or n == 1) else (2, 2)
    ok = all(
        abelianize(GroupSpec(r["n"]), "Q").invariant_factors == expected(r["n"])
        for r in rows
    )
    report.add("table", ok, rows=rows)
    return report


def _parse_alpha(text: str, count: int):
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise click.UsageError(f"alpha must be {count} comma-separated numbers")
    if len(parts) != count:
        raise click.UsageError(f"alpha must have {count} entries")
    return parts


def _solve_report(command, req, result, params) -> Report:
    report = Report(command, params)
    fan = result.fan
    report.checks.append(
        Check(
            "converged",
            result.converged,
            {
                "objective": result.objective,
                "residuals": list(result.residuals),
                "evaluations": result.evaluations,
                "tolerance": req.tolerance,
            },
        )
    )
    report.notes.append(
        json.dumps(
            {
                "center": [float(x) for x in fan.center],
                "frame": [float(x) for x in fan.frame],
                "azimuths": list(fan.azimuths),
                "exploratory": result.exploratory,
            }
        )
    )
    return report


def _emit(report: Report, as_json: bool):
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        click.echo(report.render())


@click.group()
@click.version_option(__version__)
def main():
    """Verification pipelines and fan-partition solver."""


@main.command("verify-fan2")
@click.option("--n", type=int, required=True)
@click.option("--p", type=int, default=1, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def verify_fan2_cmd(n, p, as_json):
    """Run the 2-fan verification pipeline."""
    report = cmd_verify_fan2(n, p)
    _emit(report, as_json)
    sys.exit(EXIT_OK if report.all_pass else EXIT_CHECK_FAILED)


@main.command("verify-fan3")
@click.option("--n", type=int, required=True)
@click.option("--alpha", type=str, required=True, help="p,q,r integers summing to n")
@click.option("--json", "as_json", is_flag=True)
def verify_fan3_cmd(n, alpha, as_json):
    """Run the 3-fan verification pipeline."""
    try:
        parts = tuple(int(x) for x in alpha.split(","))
    except ValueError:
        raise click.UsageError("alpha must be three comma-separated integers")
    report = cmd_verify_fan3(n, parts)
    _emit(report, as_json)
    sys.exit(EXIT_OK if report.all_pass else EXIT_CHECK_FAILED)


@main.command("bordism-table")
@click.option("--max-n", type=int, required=True)
@click.option("--json", "as_json", is_flag=True)
def bordism_table_cmd(max_n, as_json):
    """Tabulate the bordism group for n up to max-n."""
    report = cmd_bordism_table(max_n)
    _emit(report, as_json)
    sys.exit(EXIT_OK if report.all_pass else EXIT_CHECK_FAILED)


@main.command("solve")
@click.option("--mu1", type=click.Path(exists=True), required=True)
@click.option("--mu2", type=click.Path(exists=True), required=True)
@click.option("--mu3", type=click.Path(exists=True), required=True)
@click.option("--alpha", type=str, required=True, help="s,t with s+t=1")
@click.option("--tol", type=float, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=200_000, show_default=True)
@click.option("--threads", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def solve_cmd(mu1, mu2, mu3, alpha, tol, seed, budget, threads, as_json):
    """Find a 2-fan simultaneously alpha-partitioning three measures."""
    a = _parse_alpha(alpha, 2)
    try:
        measures = tuple(load_measure(f) for f in (mu1, mu2, mu3))
        req = SolveRequest(
            measures=measures,
            alpha=a,
            tolerance=tol,
            seed=seed,
            budget=budget,
            threads=threads,
        )
    except (ValueError, OSError, KeyError) as exc:
        raise click.UsageError(str(exc))
    result = solve_2fan_3measures(req)
    report = _solve_report(
        "solve", req, result, {"alpha": list(a), "seed": seed, "budget": budget}
    )
    _emit(report, as_json)
    sys.exit(EXIT_OK if result.converged else EXIT_BUDGET)


@main.command("explore-3fan")
@click.option("--mu1", type=click.Path(exists=True), required=True)
@click.option("--mu2", type=click.Path(exists=True), required=True)
@click.option("--alpha", type=str, required=True, help="a1,a2,a3 summing to 1")
@click.option("--tol", type=float, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=200_000, show_default=True)
@click.option("--threads", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def explore_3fan_cmd(mu1, mu2, alpha, tol, seed, budget, threads, as_json):
    """Exploratory search for a 3-fan partition of two measures.

    No existence theorem backs this search; non-convergence is a
    legitimate outcome (exit code 3, not an error).
    """
    a = _parse_alpha(alpha, 3)
    try:
        measures = tuple(load_measure(f) for f in (mu1, mu2))
        req = SolveRequest(
            measures=measures,
            alpha=a,
            tolerance=tol,
            seed=seed,
            budget=budget,
            threads=threads,
        )
    except (ValueError, OSError, KeyError) as exc:
        raise click.UsageError(str(exc))
    result = explore_3fan_2measures(req)
    report = _solve_report(
        "explore-3fan", req, result, {"alpha": list(a), "seed": seed, "budget": budget}
    )
    report.notes.append("exploratory: no existence guarantee")
    _emit(report, as_json)
    sys.exit(EXIT_OK if result.converged else EXIT_BUDGET)


if __name__ == "__main__":
    main()
