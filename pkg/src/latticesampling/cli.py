"""Command line front-end: parse problem files, decide, optionally verify, report.

Problem files are JSON. Rationals are strings ``"p/q"`` (or integers); floats
are only accepted in ``numeric_shift`` and demote the verdict to numeric::

    {
      "name": "shannon-union",
      "dimension": 1,
      "question": "tight",
      "E": [{"lower": ["-1/2"], "upper": ["1/2"]}],
      "A": [{"matrix": [["2"]], "shift": ["0"]},
            {"matrix": [["2"]], "shift": ["1"]}],
      "oracle": {"radius": 1000, "trials": 8, "seed": 42, "tol": 0.01}
    }

Orthogonality questions add ``"F"`` and ``"B"``.

Exit codes: 0 property holds, 1 property fails, 2 input error,
3 analytic verdict and oracle disagree.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from . import __version__
from .criteria import (CriterionError, TightnessVerdict, Witness, check_orthogonal, check_tight,
                       witness_violates)
from .cyclotomic import DEFAULT_TOL
from .lattice_core import LatticeSystem, ShiftedLattice
from .oracle import SamplingConfig, verify_orthogonal, verify_tight
from .rational_geometry import Band, Box, GeometryError, RatMatrix, as_rational

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3
QUESTIONS = ("tight", "orthogonal")
ORACLE_KEYS = {"radius": int, "trials": int, "seed": int, "tol": float, "resolution": int}


class SpecError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class ProblemSpec:
    dimension: int
    question: str
    E: Band
    A: LatticeSystem
    F: Band | None = None
    B: LatticeSystem | None = None
    oracle: dict = field(default_factory=dict)
    name: str = ""
    note: str = ""


def _rational(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise SpecError(where, f"float {value!r} not allowed in the exact path; use a \"p/q\" string")
    try:
        return as_rational(value)
    except ZeroDivisionError:
        raise SpecError(where, f"zero denominator in {value!r}") from None
    except (TypeError, ValueError):
        raise SpecError(where, f"malformed rational {value!r}") from None


def _rvector(values, dim: int, where: str) -> tuple[Fraction, ...]:
    if not isinstance(values, list) or len(values) != dim:
        raise SpecError(where, f"expected a list of {dim} rationals")
    return tuple(_rational(v, f"{where}[{i}]") for i, v in enumerate(values))


def _band(data, dim: int, where: str) -> Band:
    if not isinstance(data, list) or not data:
        raise SpecError(where, "band must be a nonempty list of boxes")
    boxes = []
    for i, b in enumerate(data):
        w = f"{where}[{i}]"
        if not isinstance(b, dict) or set(b) != {"lower", "upper"}:
            raise SpecError(w, "box needs exactly 'lower' and 'upper'")
        lo = _rvector(b["lower"], dim, f"{w}.lower")
        hi = _rvector(b["upper"], dim, f"{w}.upper")
        try:
            boxes.append(Box(lo, hi))
        except GeometryError as e:
            raise SpecError(w, str(e)) from None
    return Band(boxes, dim)


def _system(data, dim: int, where: str) -> LatticeSystem:
    if not isinstance(data, list) or not data:
        raise SpecError(where, "system must be a nonempty list of lattices")
    lats = []
    for i, entry in enumerate(data):
        w = f"{where}[{i}]"
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise SpecError(w, "lattice needs a 'matrix'")
        rows = entry["matrix"]
        if not isinstance(rows, list) or len(rows) != dim:
            raise SpecError(f"{w}.matrix", f"expected {dim} rows")
        M = RatMatrix(tuple(_rvector(r, dim, f"{w}.matrix[{k}]") for k, r in enumerate(rows)))
        if M.det == 0:
            raise SpecError(f"{w}.matrix", "singular matrix")
        if "shift" in entry and "numeric_shift" in entry:
            raise SpecError(w, "give either 'shift' or 'numeric_shift', not both")
        if "numeric_shift" in entry:
            ns = entry["numeric_shift"]
            if not isinstance(ns, list) or len(ns) != dim or not all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in ns):
                raise SpecError(f"{w}.numeric_shift", f"expected {dim} numbers")
            shift = tuple(float(x) for x in ns)
        else:
            shift = _rvector(entry.get("shift", [0] * dim), dim, f"{w}.shift")
        lats.append(ShiftedLattice(M, shift))
    return LatticeSystem(lats)


def parse_spec_data(data: Any) -> ProblemSpec:
    if not isinstance(data, dict):
        raise SpecError("<root>", "expected a JSON object")
    dim = data.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecError("dimension", "must be a positive integer")
    q = data.get("question")
    if q not in QUESTIONS:
        raise SpecError("question", f"must be one of {QUESTIONS}")
    for key in ("E", "A"):
        if key not in data:
            raise SpecError(key, "missing")
    E = _band(data["E"], dim, "E")
    A = _system(data["A"], dim, "A")
    F = B = None
    if q == "orthogonal":
        for key in ("F", "B"):
            if key not in data:
                raise SpecError(key, "missing (required for orthogonality)")
        F = _band(data["F"], dim, "F")
        B = _system(data["B"], dim, "B")
        if len(B) != len(A):
            raise SpecError("B", f"has {len(B)} lattices, A has {len(A)}")
    oracle = data.get("oracle", {})
    if not isinstance(oracle, dict):
        raise SpecError("oracle", "must be an object")
    for k, v in oracle.items():
        if k not in ORACLE_KEYS:
            raise SpecError(f"oracle.{k}", "unknown key")
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SpecError(f"oracle.{k}", "must be a number")
    return ProblemSpec(dim, q, E, A, F, B, dict(oracle), str(data.get("name", "")),
                       str(data.get("note", "")))


def parse_spec(path) -> ProblemSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecError(str(path), f"cannot read: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    try:
        return parse_spec_data(data)
    except SpecError as e:
        raise SpecError(f"{path}: {e.where}", str(e).split(": ", 1)[-1]) from None


def _emit_band(band: Band) -> list:
    return [{"lower": [str(x) for x in b.lower], "upper": [str(x) for x in b.upper]}
            for b in band.boxes]


def _emit_system(sys: LatticeSystem) -> list:
    out = []
    for lat in sys:
        entry: dict = {"matrix": [[str(x) for x in r] for r in lat.A.rows]}
        if all(isinstance(x, Fraction) for x in lat.beta):
            entry["shift"] = [str(x) for x in lat.beta]
        else:
            entry["numeric_shift"] = [float(x) for x in lat.beta]
        out.append(entry)
    return out


def emit_spec(spec: ProblemSpec) -> dict:
    data: dict = {"name": spec.name, "dimension": spec.dimension, "question": spec.question,
                  "E": _emit_band(spec.E), "A": _emit_system(spec.A)}
    if spec.F is not None:
        data["F"] = _emit_band(spec.F)
        data["B"] = _emit_system(spec.B)
    if spec.oracle:
        data["oracle"] = dict(spec.oracle)
    if spec.note:
        data["note"] = spec.note
    return data


# -- running -----------------------------------------------------------------

def make_config(spec: ProblemSpec, overrides: dict | None = None) -> SamplingConfig:
    merged = dict(spec.oracle)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "tol" in merged:
        merged["tolerance"] = merged.pop("tol")
    return replace(SamplingConfig(), **merged)


def run(spec: ProblemSpec, verify: bool = False, overrides: dict | None = None,
        zero_tol: float = DEFAULT_TOL) -> dict:
    """Analytic verdict, plus oracle statistics when ``verify`` is set."""
    cfg = make_config(spec, overrides)
    report: dict = {"name": spec.name, "question": spec.question, "dimension": spec.dimension,
                    "n": len(spec.A),
                    "config": {"radius": cfg.radius, "trials": cfg.trials, "seed": cfg.seed,
                               "tol": cfg.tolerance, "resolution": cfg.resolution,
                               "zero_tol": zero_tol, "verify": verify}}
    if spec.note:
        report["note"] = spec.note
    try:
        if spec.question == "tight":
            verdict = check_tight(spec.E, spec.A, zero_tol)
        else:
            verdict = check_orthogonal(spec.E, spec.F, spec.A, spec.B, zero_tol)
    except CriterionError as e:
        report.update(verdict="unsupported", error=str(e), mode=None, K=None, witness=None)
        return report

    report["mode"] = verdict.mode
    report["criterion"] = verdict.criterion
    report["holds"] = verdict.holds
    report["witness"] = verdict.witness.as_dict() if verdict.witness else None
    if isinstance(verdict, TightnessVerdict):
        report["verdict"] = "tight" if verdict.tight else "not tight"
        report["K"] = str(verdict.K) if verdict.K is not None else None
        report["per_lattice"] = [{"index": p.index, "K": str(p.K), "tight": p.tight}
                                 for p in verdict.per_lattice]
    else:
        report["verdict"] = "orthogonal" if verdict.orthogonal else "not orthogonal"
        report["K"] = None
        if verdict.per_index is not None:
            report["per_index"] = verdict.per_index

    if verify:
        report["oracle"] = _oracle(spec, verdict, cfg)
        report["agreement"] = report["oracle"]["holds"] == verdict.holds
    return report


def _oracle(spec: ProblemSpec, verdict, cfg: SamplingConfig) -> dict:
    w = verdict.witness
    if isinstance(verdict, TightnessVerdict):
        alpha = None
        if w is not None:
            alpha = spec.A[w.index].dual @ w.shift if w.kind == "z" else w.shift
        r = verify_tight(spec.E, spec.A, cfg, alpha=alpha)
        return {"holds": r.tight, "K_hat": r.estimates, "deviation": r.max_deviation,
                "spread": r.spread, "magnitude": None, "probes": r.probes}
    alpha = w.shift if w is not None and w.kind == "alpha" else None
    r = verify_orthogonal(spec.E, spec.F, spec.A, spec.B, cfg, alpha=alpha)
    return {"holds": r.orthogonal, "magnitude": r.indicator_magnitude,
            "max_magnitude": r.max_magnitude, "deviation": None,
            "indicator_value": [r.indicator_value.real, r.indicator_value.imag],
            "probes": r.probes}


def _parse_entry(x: str):
    return float(x) if any(c in x for c in ".eEn") else Fraction(x)


def witness_from_dict(data: dict) -> Witness:
    """Rebuild a witness from its report form so it can be re-checked."""
    kind = data["kind"]
    q = tuple(_parse_entry(x) for x in data["q"]) if "q" in data else None
    return Witness(kind, data.get("index"), tuple(Fraction(x) for x in data[kind]), q,
                   tuple(data.get("members", ())))


def revalidate(report: dict, spec: ProblemSpec, zero_tol: float = DEFAULT_TOL) -> bool:
    """True when the report's witness (if any) violates the condition it cites."""
    if not report.get("witness"):
        return True
    w = witness_from_dict(report["witness"])
    if spec.question == "tight":
        return witness_violates(w, spec.E, spec.A, tol=zero_tol)
    return witness_violates(w, spec.E, spec.A, spec.F, spec.B, zero_tol)


def exit_code(report: dict) -> int:
    if report.get("error"):
        return EXIT_INPUT
    if report.get("agreement") is False:
        return EXIT_DISAGREE
    return EXIT_HOLDS if report.get("holds") else EXIT_FAILS


def format_text(report: dict) -> str:
    lines = [f"problem: {report.get('name') or '(unnamed)'}  "
             f"[{report['question']}, d={report['dimension']}, n={report['n']}]"]
    if report.get("error"):
        lines.append(f"error: {report['error']}")
        return "\n".join(lines)
    lines.append(f"verdict: {report['verdict']}  (mode {report['mode']}, {report['criterion']})")
    if report.get("K") is not None:
        lines.append(f"frame constant K = {report['K']}")
    for p in report.get("per_lattice", []):
        lines.append(f"  lattice {p['index']}: K_j = {p['K']}, tight alone: {p['tight']}")
    if "per_index" in report:
        lines.append("  per-index orthogonal: " + ", ".join(str(x) for x in report["per_index"]))
    w = report.get("witness")
    if w:
        parts = [f"{k}={v}" for k, v in w.items() if k not in ("sum",)]
        if "sum" in w:
            re, im = w["sum"]["value"]
            parts.append(f"sum={w['sum']['expr']} = {re:.6g}{im:+.6g}i")
        lines.append("witness: " + ", ".join(parts))
    o = report.get("oracle")
    if o:
        if o.get("deviation") is not None:
            lines.append(f"oracle: max |K_hat - K|/K = {o['deviation']:.3e}, "
                         f"spread = {o['spread']:.3e}, probes = {o['probes']}")
        else:
            lines.append(f"oracle: indicator magnitude = {o['magnitude']:.6f}, "
                         f"max normalized magnitude = {o['max_magnitude']:.3e}, "
                         f"probes = {o['probes']}")
        c = report["config"]
        lines.append(f"oracle config: R={c['radius']} trials={c['trials']} seed={c['seed']} "
                     f"tol={c['tol']}")
        lines.append("agreement: " + ("yes" if report["agreement"] else "NO"))
    if report.get("note"):
        lines.append(f"note: {report['note']}")
    return "\n".join(lines)


def format_machine(reports: list[dict]) -> str:
    payload = reports[0] if len(reports) == 1 else reports
    return json.dumps(payload, indent=2, sort_keys=True)


def corpus_paths() -> list[Path]:
    root = resources.files("latticesampling") / "corpus"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latticesampling",
                                description="Tightness and orthogonality of sampling on "
                                            "unions of shifted lattices.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("specs", nargs="*", help="problem files (JSON)")
    common.add_argument("--corpus", action="store_true", help="run the bundled example corpus")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--zero-tol", type=float, default=DEFAULT_TOL,
                        help="tolerance for exponential sums with irrational phases")
    common.add_argument("--radius", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="oracle tolerance")
    sub.add_parser("check", parents=[common], help="analytic verdict only")
    sub.add_parser("verify", parents=[common], help="analytic verdict plus numeric oracle")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    paths = [Path(s) for s in args.specs] + (corpus_paths() if args.corpus else [])
    if not paths:
        print("no problem files given", file=sys.stderr)
        return EXIT_INPUT
    overrides = {"radius": args.radius, "trials": args.trials, "seed": args.seed, "tol": args.tol}
    reports, codes = [], []
    for path in paths:
        try:
            spec = parse_spec(path)
            report = run(spec, args.command == "verify", overrides, args.zero_tol)
        except (SpecError, ValueError) as e:
            report = {"name": str(path), "question": None, "dimension": None, "n": None,
                      "verdict": "input error", "error": str(e)}
        report["source"] = str(path)
        reports.append(report)
        codes.append(exit_code(report))
    if args.format == "machine":
        print(format_machine(reports))
    else:
        for r in reports:
            if r.get("question") is None:
                print(f"{r['source']}: error: {r['error']}")
            else:
                print(format_text(r))
            print()
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
