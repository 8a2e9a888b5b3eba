"""Command-line front end: ``momap <command> --scenario <path or bundled name>``.

Exit codes: 0 when every check holds, 1 when a mathematical check fails,
2 on malformed input (YAML, schema, expression syntax, degrees, flags).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction

from .cartan import CartanFamily, cartan_cocycle_check, isotopy_to_cartan_equiv, moment_from_cartan
from .complex import TotalCochain, invariance_check, morphism_check
from .equivalence import (EquivalenceWitness, MomentFamily, build_homotopy_from_inner, check_homotopy,
                          extract_eta_from_homotopy, fixomega_certificate, isotopy_to_equivalence,
                          verify_equivalence, verify_inner_equivalence)
from .forms import DifferentialForm, exterior_d
from .lie import CEScalarCochain, format_ce
from .momentmap import (MomentMapCandidate, cross_check, equivariance_of_components, existence_hypotheses,
                        f_from_phi, monomial_ansatz, phi_from_f,
                        solve_primitive)
from .parser import ParseError
from .scalars import Point
from .scenario import Scenario, ScenarioError, bundled_names, load
from .verdict import PreconditionError, Verdict

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Report:
    """Everything a command produced; serializes deterministically."""

    def __init__(self, command: str, scenario: Scenario | None = None):
        self.command = command
        self.scenario = scenario
        self.checks: list = []
        self.info: list = []
        self.certificates: dict = {}
        self.results: dict = {}
        self.error: str | None = None
        self.error_kind: str | None = None
        self.timing: float | None = None

    def add(self, verdict: Verdict, gating: bool = True) -> Verdict:
        (self.checks if gating else self.info).append(verdict)
        for key, value in verdict.certificates.items():
            self.certificates[f"{verdict.name}: {key}"] = value
        return verdict

    @property
    def exit_code(self) -> int:
        if self.error_kind == "input":
            return EXIT_INPUT
        if self.error_kind == "precondition" or any(not v.ok for v in self.checks):
            return EXIT_FAIL
        return EXIT_OK

    @property
    def status(self) -> str:
        return {EXIT_OK: "ok", EXIT_FAIL: "fail", EXIT_INPUT: "error"}[self.exit_code]

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "scenario": self.scenario.id if self.scenario else None,
            "source": self.scenario.source if self.scenario else None,
            "status": self.status,
            "exit_code": self.exit_code,
            "checks": [_verdict_dict(v) for v in self.checks],
            "info": [_verdict_dict(v) for v in self.info],
            "certificates": _plain(self.certificates),
            "results": _plain(self.results),
        }
        if self.error is not None:
            out["error"] = self.error
        if self.timing is not None:
            out["timing_seconds"] = round(self.timing, 3)
        return out

    def render(self, fmt: str) -> str:
        if fmt == "machine":
            return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"
        return self._text()

    def _text(self) -> str:
        name = self.scenario.id if self.scenario else "-"
        lines = [f"{self.command} {name}: {self.status}"]
        if self.error is not None:
            lines.append(f"  error: {self.error}")
        for label, group in (("", self.checks), ("info: ", self.info)):
            for v in group:
                lines.append(f"  [{'ok' if v.ok else 'FAIL'}] {label}{v.name}")
                lines.extend(f"      {f.describe()}" for f in v.failures)
        for key, value in sorted(self.certificates.items()):
            lines.extend(_text_item(f"certificate {key}", value))
        for key, value in sorted(self.results.items()):
            lines.extend(_text_item(key, value))
        if self.timing is not None:
            lines.append(f"  time: {self.timing:.3f} s")
        return "\n".join(lines) + "\n"


def _text_item(key: str, value) -> list:
    value = _plain(value)
    if not isinstance(value, dict):
        return [f"  {key}: {value}"]
    return [f"  {key}:"] + [f"    {k}: {v}" for k, v in sorted(value.items())]


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, CEScalarCochain):
        return format_ce(value)
    if isinstance(value, TotalCochain):
        return entries(value)
    return str(value)


def _where(where):
    if isinstance(where, tuple):
        return [i + 1 for i in where]
    return str(where)


def _verdict_dict(v: Verdict) -> dict:
    return {
        "name": v.name,
        "ok": v.ok,
        "failures": [{"check": f.check, "where": _where(f.where), "residual": _plain(f.residual),
                      "detail": f.detail} for f in v.failures],
    }


def entries(c: TotalCochain) -> dict:
    """Cochain entries keyed like scenario files: "1", "1,2", ..."""
    return {",".join(str(i + 1) for i in key): str(form)
            for key, form in sorted(c.values.items(), key=lambda kv: (len(kv[0]), kv[0]))}


# -- flag parsing -------------------------------------------------------------------

class FlagError(ValueError):
    pass


def parse_ansatz(spec: str | None) -> dict:
    out = {"poly": 2, "freq": 0}
    if not spec:
        return out
    for part in spec.split(","):
        m = re.fullmatch(r"\s*(poly|freq)\s*=\s*(\d+)\s*", part)
        if not m:
            raise FlagError(f"bad --ansatz item {part!r}; expected poly=<int> or freq=<int>")
        out[m.group(1)] = int(m.group(2))
    return out


def parse_point(spec: str | None, sc: Scenario) -> Point:
    base = sc.base_point()
    if not spec:
        return base
    theta, z = list(base.theta), list(base.z)
    for part in spec.split(","):
        m = re.fullmatch(r"\s*(theta|z)([1-9]\d*)\s*=\s*(-?\d+(?:/\d+)?)\s*", part)
        if not m:
            raise FlagError(f"bad --point item {part!r}; expected theta<i>=<q> or z<j>=<q>")
        target = theta if m.group(1) == "theta" else z
        i = int(m.group(2)) - 1
        if i >= len(target):
            raise FlagError(f"--point: {m.group(1)}{i + 1} does not exist on {sc.manifold}")
        target[i] = Fraction(m.group(3))
    return Point(tuple(theta), tuple(z))


# -- commands -----------------------------------------------------------------------

def _omega(sc: Scenario) -> DifferentialForm:
    return sc.forms["omega"]


def _require_action(sc: Scenario) -> None:
    v = morphism_check(sc.action)
    if not v.ok:
        raise PreconditionError("the action is not a Lie algebra morphism: " + v.summary())


def cmd_validate(sc: Scenario, report: Report, args) -> None:
    report.add(morphism_check(sc.action))
    report.results["manifold"] = str(sc.manifold)
    report.results["algebra dimension"] = sc.dim
    report.results["entries"] = sorted(list(sc.forms) + list(sc.maps) + list(sc.family))


def cmd_check_action(sc: Scenario, report: Report, args) -> None:
    report.add(morphism_check(sc.action))
    closed = Verdict("omega closed")
    r = exterior_d(_omega(sc))
    if r:
        closed.fail("closed", (), r, "d omega")
    report.add(closed)
    report.add(invariance_check(_omega(sc), sc.action))


def cmd_check_momentmap(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    f = sc.moment_map("f")
    report.add(cross_check(f, _omega(sc), sc.action))
    report.add(equivariance_of_components(f, sc.action), gating=False)
    report.results["f"] = entries(f.components)


def cmd_from_cartan(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("mu")
    cocycle = report.add(cartan_cocycle_check(_omega(sc), sc.maps["mu"], sc.action))
    if not cocycle.ok:
        return
    f = moment_from_cartan(_omega(sc), sc.maps["mu"], sc.action)
    report.add(cross_check(f, _omega(sc), sc.action))
    report.results["induced f"] = entries(f.components)


def cmd_obstruction(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    p = parse_point(args.point, sc)
    ex = existence_hypotheses(_omega(sc), sc.action, p)
    ob = ex.obstruction
    verdict = Verdict("obstruction class")
    if not ob.vanishes:
        verdict.fail("class nonzero", (), format_ce(ob.cochain), "restricted top contraction")
        verdict.certificates["nonzero class"] = {
            "cochain": format_ce(ob.cochain),
            "pairs to": str(ob.certificate.pairing),
            "against cycle": format_ce(ob.certificate.functional),
        }
    else:
        verdict.certificates["primitive"] = format_ce(ob.primitive) if ob.primitive is not None else "0"
    report.add(verdict)
    report.results["point"] = {"theta (x pi)": [str(v) for v in p.theta], "z": [str(v) for v in p.z]}
    report.results["restricted cochain"] = format_ce(ob.cochain)
    report.results["CE Betti numbers"] = ex.ce_betti
    report.results["de Rham Betti numbers"] = ex.de_rham_betti
    report.results["Kunneth products"] = ex.products
    report.results["conclusion"] = ex.conclusion


def cmd_solve(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    spec = parse_ansatz(args.ansatz)
    ansatz = monomial_ansatz(sc.manifold, sc.dim, sc.n, spec["poly"], spec["freq"])
    result = solve_primitive(_omega(sc), sc.action, ansatz)
    verdict = Verdict("solve")
    report.results["ansatz"] = f"poly={spec['poly']},freq={spec['freq']}"
    report.results["ansatz size"] = result.ansatz_size
    if not result.found:
        verdict.fail("no primitive in ansatz", (), None, report.results["ansatz"])
        report.add(verdict)
        return
    report.add(verdict)
    f = f_from_phi(result.phi, sc.n)
    report.add(cross_check(f, _omega(sc), sc.action))
    report.results["f"] = entries(f.components)


def _witness(sc: Scenario) -> EquivalenceWitness:
    eta = sc.maps.get("eta", TotalCochain.zero(sc.manifold, sc.dim, sc.n - 1))
    alpha = sc.forms.get("alpha", DifferentialForm.zero(sc.manifold, sc.n))
    return EquivalenceWitness(eta, alpha)


def cmd_check_equivalence(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("f", "f_prime")
    omega_p = sc.forms.get("omega_prime", _omega(sc))
    report.add(verify_equivalence(_omega(sc), phi_from_f(sc.moment_map("f")), omega_p,
                                  phi_from_f(sc.moment_map("f_prime")), _witness(sc), sc.action))


def cmd_check_inner(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("f", "f_prime")
    result = verify_inner_equivalence(_omega(sc), phi_from_f(sc.moment_map("f")),
                                      phi_from_f(sc.moment_map("f_prime")), _witness(sc).eta, sc.action)
    report.add(result.verdict)


def cmd_isotopy_witness(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("X_s", "omega_s")
    fam = sc.family
    if "mu_s" in fam:
        r = isotopy_to_cartan_equiv(CartanFamily(fam["X_s"], fam["omega_s"], fam["mu_s"]), sc.action)
        report.add(r.consistency)
        report.add(_renamed(r.equivalence, "Cartan equivalence"))
        report.results["Cartan alpha"] = str(r.alpha)
        report.results["Cartan F"] = {str(i + 1): str(v) for i, v in enumerate(r.F)}
    if "f_s" in fam:
        f = MomentMapCandidate(sc.n, fam["f_s"])
        w = isotopy_to_equivalence(MomentFamily(fam["X_s"], fam["omega_s"], f), sc.action)
        report.add(_renamed(w.consistency, "moment isotopy consistency"))
        report.add(w.equivalence)
        report.results["alpha"] = str(w.witness.alpha)
        report.results["eta"] = entries(w.witness.eta)


def _renamed(v: Verdict, name: str) -> Verdict:
    return Verdict(name, list(v.failures), dict(v.certificates))


def cmd_build_homotopy(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("f", "f_prime", "eta")
    omega, A = _omega(sc), sc.action
    phi, phi_p = phi_from_f(sc.moment_map("f")), phi_from_f(sc.moment_map("f_prime"))
    inner = report.add(verify_inner_equivalence(omega, phi, phi_p, sc.maps["eta"], A).verdict)
    if not inner.ok:
        return
    H = build_homotopy_from_inner(omega, phi, phi_p, sc.maps["eta"], A)
    report.add(check_homotopy(H, omega, A, phi, phi_p))
    eta = extract_eta_from_homotopy(H, omega, A)
    roundtrip = Verdict("extracted eta")
    if eta != sc.maps["eta"]:
        roundtrip.fail("round trip", (), None, "extracted eta differs from the scenario eta")
    report.add(roundtrip)
    report.results["h0"] = entries(H.h0)
    report.results["h1"] = entries(H.h1)
    report.results["extracted eta"] = entries(eta)


def cmd_fixomega(sc: Scenario, report: Report, args) -> None:
    _require_action(sc)
    sc.require("f")
    if sc.fixomega_x is None:
        raise ScenarioError(f"scenario {sc.id!r} lacks fixomega.x")
    cert = fixomega_certificate(_omega(sc), sc.moment_map("f"), sc.fixomega_x, sc.action)
    report.add(cert.verdict)
    report.results["x"] = [str(c) for c in sc.fixomega_x]
    report.results["circle coordinate"] = cert.coordinate
    report.results["iota(v_x) f_1(x)"] = str(cert.contraction)
    report.results["issued"] = cert.issued
    if cert.issued:
        report.results["conclusion"] = cert.conclusion


COMMANDS = {
    "validate": cmd_validate,
    "check-action": cmd_check_action,
    "check-momentmap": cmd_check_momentmap,
    "from-cartan": cmd_from_cartan,
    "obstruction": cmd_obstruction,
    "solve": cmd_solve,
    "check-equivalence": cmd_check_equivalence,
    "check-inner": cmd_check_inner,
    "isotopy-witness": cmd_isotopy_witness,
    "build-homotopy": cmd_build_homotopy,
    "fixomega": cmd_fixomega,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momap", description="Exact checks for homotopy moment maps.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--scenario", required=True,
                   help="scenario file, or the name of a bundled scenario: " + ", ".join(bundled_names()))
    p.add_argument("--ansatz", help="solve: search space, e.g. poly=3,freq=1 (default poly=2,freq=0)")
    p.add_argument("--point", help="obstruction: base point, e.g. theta1=1/2,z1=0 (theta in multiples of pi)")
    p.add_argument("--report", help="also write the report to this path")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identity)")
    return p


def run(command: str, scenario: str, *, ansatz=None, point=None, timing=False) -> Report:
    """Load a scenario and execute one command; never raises for bad input."""
    start = time.perf_counter()
    report = Report(command)
    args = argparse.Namespace(ansatz=ansatz, point=point)
    try:
        report.scenario = load(scenario)
        COMMANDS[command](report.scenario, report, args)
    except (ScenarioError, ParseError, FlagError) as e:
        report.error, report.error_kind = str(e), "input"
    except PreconditionError as e:
        report.error, report.error_kind = f"precondition failed: {e}", "precondition"
    if timing:
        report.timing = time.perf_counter() - start
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = run(args.command, args.scenario, ansatz=args.ansatz, point=args.point, timing=args.timing)
    text = report.render(args.format)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
