"""Command-line front end: ``kcube validate | pipeline | matrix | preset``.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fixtures
from .complex import build_one_vertex_complex, digraph_from_complex, enumerate_cubes
from .covers import (
    cover_from_hom,
    double_cover,
    load_assignment,
    project_squares,
    solve_abelian_quotient,
    verify_hom,
)
from .digraph import ColoredDigraph, check_rigidity, strongly_connected, validate_f1, validate_f2
from .kgraph import check_unique_factorization, coordinate_matrices, structure_report
from .spectra import (
    factor_type_lambda,
    find_isomorphism,
    period_lattice,
    power_entries,
    ramanujan_check,
    spectral_radius_vector,
    symmetric_eigenvalues,
)
from .structures import KCubeStructure, structure_from_dict, validate_structure
from .validation import InconsistencyError, KCubeError, ValidationReport

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
AXIOMS = ("vh", "f1", "f2", "rigidity", "cubes", "connected", "factorization")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    input: Path | None = None
    out: Path | None = None
    cover: str | None = None
    axioms: list[str] = field(default_factory=lambda: ["vh", "f1", "f2"])
    spectra: str | None = None
    reports: list[str] = field(default_factory=list)
    tol: float = 1e-9
    max_degree_sum: int = 4
    seed: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        preset = getattr(args, "preset", None)
        inp = getattr(args, "input", None)
        if args.command in ("validate", "pipeline", "matrix") and (preset is None) == (inp is None):
            raise InputError("give exactly one of --preset or --in")
        axioms = _csv(getattr(args, "axioms", None)) or ["vh", "f1", "f2"]
        unknown = [a for a in axioms if a not in AXIOMS]
        if unknown:
            raise InputError(f"unknown axioms {unknown}; choose from {','.join(AXIOMS)}")
        return cls(
            command=args.command,
            preset=preset,
            input=Path(inp) if inp else None,
            out=Path(args.out) if getattr(args, "out", None) else None,
            cover=getattr(args, "cover", None),
            axioms=axioms,
            spectra=getattr(args, "spectra", None) or getattr(args, "mode", None),
            reports=_csv(getattr(args, "report", None)),
            tol=args.tol,
            max_degree_sum=args.max_degree_sum,
            seed=args.seed,
        )


def _csv(text: str | None) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _load_input(cfg: RunConfig):
    """Structure, digraph or matrix, from a preset or a file."""
    if cfg.preset is not None:
        return fixtures.preset(cfg.preset)
    path = cfg.input
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if cfg.command == "matrix":
        return fixtures.parse_matrix(text, str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "phi" in data:
        return ColoredDigraph.from_dict(data)
    return structure_from_dict(data)


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=1, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    return str(obj)


# validate

def cmd_validate(cfg: RunConfig) -> int:
    obj = _load_input(cfg)
    if isinstance(obj, np.ndarray):
        raise InputError("validate expects a structure or digraph, not a matrix")
    results: dict[str, dict] = {}
    structure = obj if isinstance(obj, KCubeStructure) else None
    dg = obj if isinstance(obj, ColoredDigraph) else None
    complex_ = None

    if structure is not None:
        vh = validate_structure(structure)
        if "vh" in cfg.axioms:
            results["vh"] = vh.to_dict()
        if vh.passed:
            complex_ = build_one_vertex_complex(structure, check=False)
            try:
                dg = digraph_from_complex(complex_)
            except InconsistencyError as exc:
                results["digraph"] = {"passed": False, "error": str(exc)}
        elif set(cfg.axioms) - {"vh"}:
            results["digraph"] = {"passed": False, "error": "structure invalid; digraph not built"}

    if dg is not None:
        if "f1" in cfg.axioms:
            results["f1"] = validate_f1(dg).to_dict()
        if "f2" in cfg.axioms:
            results["f2"] = validate_f2(dg).to_dict()
        if "rigidity" in cfg.axioms:
            rig = check_rigidity(dg)
            results["rigidity"] = {"passed": bool(rig), "left": rig.left, "right": rig.right,
                                   "witnesses": rig.witnesses}
        if "connected" in cfg.axioms:
            results["connected"] = {"passed": strongly_connected(dg)}
        if "factorization" in cfg.axioms:
            rep = check_unique_factorization(dg, min(cfg.max_degree_sum, 3))
            results["factorization"] = {"passed": rep.passed, "classes": rep.classes,
                                        "checked": rep.checked, "witnesses": rep.witnesses}
    if "cubes" in cfg.axioms:
        if complex_ is None:
            results["cubes"] = {"passed": False, "error": "needs a valid structure"}
        else:
            try:
                results["cubes"] = {"passed": True, "count": enumerate_cubes(complex_)[1]}
            except InconsistencyError as exc:
                results["cubes"] = {"passed": False, "error": str(exc)}

    passed = all(r.get("passed", False) for r in results.values())
    _emit({"passed": passed, "results": results}, cfg.out)
    return EXIT_OK if passed else EXIT_FAIL


# pipeline

def _build_cover(structure: KCubeStructure, base, spec: str | None, summary: dict):
    if spec in (None, "", "none"):
        return base
    if spec == "double":
        return double_cover(base)
    if spec.startswith("hom:"):
        q = load_assignment(spec[4:])
        check = verify_hom(structure, q)
        summary["hom"] = {"passed": check.ok, "witnesses": check.witnesses[:5]}
        if not check:
            raise _MathFailure("assignment violates the square relations")
        return cover_from_hom(structure, q)
    if spec.startswith("abelian:"):
        try:
            p, rank = (int(v) for v in spec[8:].split(","))
        except ValueError:
            raise InputError(f"--cover abelian expects P,RANK, got {spec!r}") from None
        sols = solve_abelian_quotient(structure, p, rank)
        best = [s for s in sols if s.each_alphabet_generates] or sols
        chosen = best[0]
        summary["abelian"] = {
            "p": p,
            "rank": rank,
            "solutions": len(sols),
            "each_alphabet_generates": chosen.each_alphabet_generates,
            "vectors": {x: list(v) for x, v in chosen.vectors.items()},
        }
        return cover_from_hom(structure, chosen.assignment)
    raise InputError(f"unknown cover spec {spec!r}")


class _MathFailure(Exception):
    pass


def cmd_pipeline(cfg: RunConfig) -> int:
    obj = _load_input(cfg)
    if not isinstance(obj, KCubeStructure):
        raise InputError("pipeline expects a structure")
    structure = obj
    summary: dict = {"structure": {"k": structure.k, "sizes": list(structure.sizes()),
                                   "squares": len(structure.squares)}}
    ok = True
    vh = validate_structure(structure)
    summary["vh"] = vh.passed
    if not vh.passed:
        summary["vh_failures"] = [c.to_dict() for c in vh.failures()]
        _emit(summary, None if cfg.out is None else cfg.out / "summary.json")
        return EXIT_FAIL

    base = build_one_vertex_complex(structure, check=False)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cx = _build_cover(structure, base, cfg.cover, summary)
        if caught:
            summary["warnings"] = [str(w.message) for w in caught]
    except _MathFailure as exc:
        summary["error"] = f"covers: {exc}"
        _emit(summary, None if cfg.out is None else cfg.out / "summary.json")
        return EXIT_FAIL

    summary["complex"] = {"vertices": len(cx.vertices), "geom_edges": len(cx.geom_edges),
                          "squares": len(cx.squares)}
    if cx.base is not None:
        summary["complex"]["projects_onto_base"] = project_squares(cx) == set(base.squares)
    try:
        cubes, count = enumerate_cubes(cx)
        summary["complex"]["cubes"] = count
    except InconsistencyError as exc:
        summary["complex"]["cubes_error"] = f"complex: {exc}"
        ok = False

    dg = digraph_from_complex(cx)
    f1, f2 = validate_f1(dg), validate_f2(dg)
    summary["digraph"] = {"vertices": len(dg.vertices), "edges": len(dg.edges),
                          "f1": f1.passed, "f2": f2.passed}
    ok &= f1.passed and f2.passed
    report = structure_report(dg)
    summary["kgraph"] = report
    cm = coordinate_matrices(dg)
    summary["matrices"] = {
        "symmetric": cm.symmetric(),
        "commute": cm.commute(),
        "all_equal": all((M == cm.matrices[0]).all() for M in cm.matrices),
        "pairwise_isomorphic": len(dg.vertices) <= 64 and all(
            find_isomorphism(cm.matrices[0], M) is not None for M in cm.matrices[1:]
        ),
    }
    rho = spectral_radius_vector(cm.matrices)
    summary["rho"] = [round(r, 9) for r in rho]

    spectra = []
    if cfg.spectra:
        for c, M in enumerate(cm.matrices, start=1):
            rep = ramanujan_check(M, cfg.spectra, color=c)
            spectra.append(rep)
        summary["spectra"] = [r.to_dict() for r in spectra]
        summary["ramanujan"] = all(r.ramanujan for r in spectra)
        ok &= summary["ramanujan"]

    for name in cfg.reports:
        if name == "cubes":
            summary["cubes"] = summary["complex"].get("cubes")
        elif name in ("factor-type", "period"):
            lat = period_lattice(dg, cfg.max_degree_sum)
            summary["period_lattice"] = lat.to_dict()
            if name == "factor-type":
                summary["factor_type"] = factor_type_lambda(rho, lat, tol=cfg.tol).to_dict()
        elif name == "factorization":
            rep = check_unique_factorization(dg, min(cfg.max_degree_sum, 3))
            summary["factorization"] = {"passed": rep.passed, "classes": rep.classes}
            ok &= rep.passed
        else:
            raise InputError(f"unknown report {name!r}")

    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        cx.dump(cfg.out / "complex.json")
        dg.dump(cfg.out / "digraph.json")
        (cfg.out / "matrices.txt").write_text(cm.to_text(), encoding="utf-8")
        for rep in spectra:
            lines = "".join(f"{v:.9f}\n" for v in rep.eigenvalues)
            (cfg.out / f"spectrum_{rep.color}.txt").write_text(lines, encoding="utf-8")
        _emit(summary, cfg.out / "summary.json")
    _emit(summary, None)
    return EXIT_OK if ok else EXIT_FAIL


# matrix

def cmd_matrix(cfg: RunConfig, power: int | None, check_entries: bool,
               expect_diag: list[int], expect_off: list[int]) -> int:
    M = _load_input(cfg)
    if not isinstance(M, np.ndarray):
        raise InputError("matrix expects a matrix preset or file")
    try:
        ev = symmetric_eigenvalues(M)
    except KCubeError as exc:
        raise InputError(str(exc)) from exc
    out: dict = {"N": int(M.shape[0]), "eigenvalues": [round(float(v), 9) for v in ev]}
    ok = True
    mode = cfg.spectra or "cubical"
    try:
        rep = ramanujan_check(M, mode, eigenvalues=ev)
        out["ramanujan"] = rep.to_dict()
        ok &= rep.ramanujan
    except KCubeError as exc:
        out["ramanujan"] = {"error": str(exc)}
        ok = False
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(M.shape[0])
    relabeled = symmetric_eigenvalues(M[np.ix_(perm, perm)])
    out["relabel_invariant"] = bool(np.allclose(relabeled, ev, atol=1e-9))
    if power is not None:
        diag, off = power_entries(M, power)
        out["power"] = {"exponent": power, "diagonal": sorted(diag), "off_diagonal": sorted(off)}
        if check_entries:
            passed = True
            if expect_diag:
                passed &= diag <= set(expect_diag)
            if expect_off:
                passed &= off <= set(expect_off)
            out["power"]["entries_ok"] = passed
            ok &= passed
    _emit(out, cfg.out)
    return EXIT_OK if ok else EXIT_FAIL


# preset

def cmd_preset(action: str, name: str | None, out: Path | None, relators: bool) -> int:
    if action == "list":
        sys.stdout.write("\n".join(fixtures.PRESETS) + "\n")
        return EXIT_OK
    if name is None:
        raise InputError("preset export needs a name")
    obj = fixtures.preset(name)
    if isinstance(obj, np.ndarray):
        text = "\n".join(" ".join(str(int(v)) for v in row) for row in obj) + "\n"
    else:
        text = json.dumps(obj.to_dict(relators), indent=1) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcube", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="gamma1, gamma2, torus, vh44, free_product:L1,...,Lk, matrix25")
    common.add_argument("--in", dest="input", help="input file (JSON structure/digraph or matrix)")
    common.add_argument("--out", help="output file (validate, matrix) or directory (pipeline)")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--max-degree-sum", type=int, default=4)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the axioms of a structure or digraph")
    p.add_argument("--axioms", help=f"comma list from {','.join(AXIOMS)} (default vh,f1,f2)")

    p = sub.add_parser("pipeline", parents=[common], help="structure -> cover -> k-graph -> spectra")
    p.add_argument("--cover", help="double | hom:FILE | abelian:P,RANK")
    p.add_argument("--spectra", choices=["cubical", "kgraph"])
    p.add_argument("--report", help="comma list from cubes,period,factor-type,factorization")

    p = sub.add_parser("matrix", parents=[common], help="spectrum and Ramanujan verdict of a matrix")
    p.add_argument("--mode", choices=["cubical", "kgraph"], default="cubical")
    p.add_argument("--power", type=int)
    p.add_argument("--check-entries", action="store_true")
    p.add_argument("--expect-diag", help="allowed diagonal entries of the power, comma list")
    p.add_argument("--expect-offdiag", help="allowed off-diagonal entries of the power, comma list")

    p = sub.add_parser("preset", help="list or export embedded fixtures")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.add_argument("--relators", action="store_true", help="export relators instead of squares")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "preset":
            return cmd_preset(args.action, args.name, Path(args.out) if args.out else None, args.relators)
        cfg = RunConfig.from_args(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "pipeline":
            return cmd_pipeline(cfg)
        ints = lambda s: [int(v) for v in _csv(s)]
        return cmd_matrix(cfg, args.power, args.check_entries, ints(args.expect_diag), ints(args.expect_offdiag))
    except (InputError, KCubeError, ValueError) as exc:
        # KCubeError from parsing means the input itself is malformed
        print(f"kcube {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
