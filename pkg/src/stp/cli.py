"""The ``stp`` command line.

Exit codes: 0 when every check passes, 1 when a check fails (or is
inconclusive without ``--allow-inconclusive``), 2 on input errors.
Reports are deterministic; wall-clock timings appear only with ``--timings``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from .abgroup import AbGroup
from .complexes import ComplexError, SimplicialComplex, barycentric_subdivision, load_complex, to_simplicial_set
from .doldkan import induced_map
from .hocolim import (CERTIFIED, INCONCLUSIVE, REFUTED, HocolimError, auto_disk_poset,
                      compare_chain_vs_space, dold_thom_verify, h0_diagram, hocolim_homology,
                      svk_check)
from .homalg import (ChainComplexError, homology, induced_on_homology, is_quasi_iso,
                     normalized_set_chains, reduced_chains)
from .library import get_space, is_library_name
from .symprod import CellLimitError, ConfigurationError, cell_limit, stabilization_map, symmetric_power

PASS, FAIL = "pass", "fail"
EXPLICIT_BASIS_LIMIT = 400

DEVIATIONS = (
    "disk-system morphisms are subcomplex inclusions; merging components stands in for embeddings",
    "bar constructions and simplicial models are truncated at total degree max_degree+1",
)


class InputError(Exception):
    pass


@dataclass
class Report:
    command: str
    info: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def check(self, name: str, verdict: str, witness: str | None = None, detail: str | None = None):
        entry = {"name": name, "verdict": verdict}
        if witness is not None:
            entry["witness"] = witness
        if detail is not None:
            entry["detail"] = detail
        self.checks.append(entry)

    def exit_code(self, allow_inconclusive: bool) -> int:
        verdicts = [c["verdict"] for c in self.checks]
        if FAIL in verdicts:
            return 1
        if INCONCLUSIVE in verdicts and not allow_inconclusive:
            return 1
        return 0

    def to_dict(self, code: int, with_timings: bool) -> dict:
        out = {"command": self.command, "info": self.info, "groups": self.groups,
               "checks": self.checks, "notes": self.notes,
               "result": "PASS" if code == 0 else "FAIL"}
        if with_timings:
            out["timings"] = self.timings
        return out

    def render(self, code: int, with_timings: bool) -> str:
        lines = [f"$ {self.command}"]
        for k, v in self.info.items():
            lines.append(f"{k}: {v}")
        for name, gs in self.groups.items():
            lines.append(f"{name}: " + ", ".join(f"{_sym(name)}_{i} = {g}" for i, g in enumerate(gs)))
        for c in self.checks:
            line = f"check {c['name']}: {c['verdict']}"
            if "detail" in c:
                line += f" ({c['detail']})"
            if "witness" in c:
                line += f" [witness: {c['witness']}]"
            lines.append(line)
        for n in self.notes:
            lines.append(f"note: {n}")
        if with_timings:
            for k, v in self.timings.items():
                lines.append(f"time {k}: {v:.3f}s")
        lines.append("result: " + ("PASS" if code == 0 else "FAIL"))
        return "\n".join(lines) + "\n"


def _sym(name: str) -> str:
    if name.startswith("pi"):
        return "pi"
    if name.startswith("H_") or name.startswith("SP"):
        return "H"
    return "H~"


class _Timer:
    def __init__(self, report: Report, key: str):
        self.report, self.key = report, key

    def __enter__(self):
        self.t = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.key] = time.perf_counter() - self.t


# ---------------------------------------------------------------------------
# inputs

def load_space(name: str, subdivide: int = 0) -> SimplicialComplex:
    if subdivide < 0:
        raise InputError("--subdivide must be non-negative")
    if is_library_name(name):
        K = get_space(name)
    elif os.path.exists(name):
        try:
            K = load_complex(name)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {name}: {exc}") from exc
    else:
        raise InputError(f"unknown space {name!r} (not a library name or an existing file)")
    for _ in range(subdivide):
        K = barycentric_subdivision(K)
    return K


def parse_coeff(text: str) -> AbGroup:
    try:
        return AbGroup.parse(text)
    except ValueError as exc:
        raise InputError(f"cannot parse coefficient group {text!r}: {exc}") from exc


def _coeff_arg(A: AbGroup) -> str:
    return str(A).replace(" ", "")


def _fmt(groups) -> list[str]:
    return [str(g) for g in groups]


def _first_mismatch(a, b):
    for k, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return f"degree {k}: {x} vs {y}"
    return None


def _svk_check_entry(report: Report, svk, label: str = "svk"):
    counts = svk.summary()
    detail = f"{counts[CERTIFIED]} certified, {counts[REFUTED]} refuted, {counts[INCONCLUSIVE]} inconclusive"
    overall = svk.overall
    if overall == REFUTED:
        x, why = svk.first(REFUTED)
        report.check(label, FAIL, f"simplex {list(x)}: {why}", detail)
    elif overall == INCONCLUSIVE:
        x, why = svk.first(INCONCLUSIVE)
        report.check(label, INCONCLUSIVE, f"simplex {list(x)}: {why}; try --subdivide", detail)
    else:
        report.check(label, PASS, None, detail)


def _space_info(report: Report, name: str, K: SimplicialComplex, subdivide: int):
    report.info["space"] = name
    report.info["f-vector"] = " ".join(str(x) for x in K.f_vector())
    report.info["subdivisions"] = subdivide


# ---------------------------------------------------------------------------
# commands

def cmd_homology(args) -> Report:
    K = load_space(args.space, args.subdivide)
    A = parse_coeff(args.coeff)
    r = Report(f"stp homology {args.space} {_coeff_arg(A)} {args.max_degree}")
    _space_info(r, args.space, K, args.subdivide)
    r.info["coefficients"] = str(A)
    with _Timer(r, "homology"):
        r.groups["reduced homology"] = _fmt(homology(reduced_chains(K), A, args.max_degree))
    return r


def cmd_verify(args) -> Report:
    K = load_space(args.space, 0)
    A = parse_coeff(args.coeff)
    r = Report(f"stp verify {args.space} {_coeff_arg(A)} {args.max_degree}")
    _space_info(r, args.space, K, args.subdivide)
    r.info["coefficients"] = str(A)
    with _Timer(r, "verify"):
        rep = dold_thom_verify(K, A, args.max_degree, args.family, args.subdivide)
    r.info["disk family"] = rep.family
    r.info["disk poset objects"] = rep.poset_size
    r.groups["pi of A[X]/A[*]"] = _fmt(rep.homotopy)
    r.groups["hocolim of H~_0"] = _fmt(rep.hocolim)
    r.groups["reduced homology"] = _fmt(rep.reduced)
    _svk_check_entry(r, rep.svk)
    r.check("normalized chains ~ reduced chains", PASS if rep.normalized_quasi_iso else FAIL,
            None if rep.normalized_quasi_iso else "chain map is not a quasi-isomorphism")
    for (a, ga), (b, gb) in (((("pi", rep.homotopy)), ("reduced", rep.reduced)),
                             (("hocolim", rep.hocolim), ("reduced", rep.reduced))):
        w = _first_mismatch(ga, gb)
        r.check(f"{a} = {b}", PASS if w is None else FAIL, w)
    r.notes.extend(DEVIATIONS)
    return r


def cmd_sympower(args) -> Report:
    K = load_space(args.space, args.subdivide)
    if args.d < 1:
        raise InputError("d must be at least 1")
    r = Report(f"stp sympower {args.space} {args.d} {args.max_degree}")
    _space_info(r, args.space, K, args.subdivide)
    bound = args.max_degree + 1
    X = to_simplicial_set(K, bound)
    lim = cell_limit(args.cell_limit)
    with _Timer(r, "symmetric power"):
        try:
            S = symmetric_power(X, args.d, bound, lim)
        except CellLimitError as exc:
            raise InputError(str(exc)) from exc
        r.info["SP nondegenerate simplices"] = " ".join(str(x) for x in S.nondegenerate_counts())
        r.groups[f"SP^{args.d} homology"] = _fmt(homology(
            normalized_set_chains(S, reduced=False, top=bound), None, args.max_degree))
    if args.stabilize:
        with _Timer(r, "stabilization"):
            try:
                T = symmetric_power(X, args.d + 1, bound, lim)
            except CellLimitError as exc:
                raise InputError(str(exc)) from exc
            f = stabilization_map(X, args.d, bound, S, T)
            cm = induced_map(f).normalized_map(args.max_degree)
            r.groups[f"SP^{args.d + 1} homology"] = _fmt(homology(
                normalized_set_chains(T, reduced=False, top=bound), None, args.max_degree))
            hs = homology(cm.source, None, args.max_degree)
            ht = homology(cm.target, None, args.max_degree)
            mats = []
            for k in range(args.max_degree + 1):
                if hs[k].rank == 0 or ht[k].rank == 0:
                    mats.append(json.dumps([[0] * hs[k].rank for _ in range(ht[k].rank)]))
                    continue
                size = max(cm.source.rank(k + 1), cm.target.rank(k + 1), cm.target.rank(k))
                if size > EXPLICIT_BASIS_LIMIT:
                    mats.append("omitted (chain groups too large for explicit bases)")
                    continue
                m = induced_on_homology(cm, k)
                mats.append(json.dumps([[int(x) for x in row] for row in m.tolist()]))
            r.info["stabilization on reduced free parts"] = "; ".join(
                f"k={k}: {m}" for k, m in enumerate(mats))
            beyond = []
            for i in range(args.max_degree + 1):
                q = is_quasi_iso(cm, i)
                if args.d > i:
                    r.check(f"stabilization iso through degree {i}", PASS if q else FAIL,
                            None if q else f"degree {q.degree}: {q.source_group} vs {q.target_group}")
                else:
                    beyond.append(f"{i}: {'yes' if q else 'no'}")
            if beyond:
                r.info["iso through degree (not required, d <= i)"] = ", ".join(beyond)
        r.notes.append("symmetric powers are a classical cross-check of the labelled model")
    return r


def cmd_hocolim(args) -> Report:
    K = load_space(args.space, args.subdivide)
    A = parse_coeff(args.coeff)
    if args.max_components < 1:
        raise InputError("max_components must be at least 1")
    r = Report(f"stp hocolim {args.space} {args.max_components} {_coeff_arg(A)} {args.max_degree}")
    _space_info(r, args.space, K, args.subdivide)
    r.info["coefficients"] = str(A)
    with _Timer(r, "poset"):
        P = auto_disk_poset(K, args.max_components, args.family)
    r.info["disk family"] = P.family
    r.info["disk poset objects"] = P.size
    with _Timer(r, "hocolim"):
        hc = hocolim_homology(h0_diagram(P.diagram, A), A, args.max_degree)
    r.groups["hocolim of H~_0"] = _fmt(hc)
    if args.check_svk or args.strict:
        with _Timer(r, "svk"):
            _svk_check_entry(r, svk_check(P.category, P.diagram, K))
    if args.compare_space:
        with _Timer(r, "compare"):
            cmp = compare_chain_vs_space(P.diagram, A, args.max_degree)
        r.groups["space hocolim of components"] = _fmt(cmp.discrete_groups)
        r.groups["space hocolim of pieces"] = _fmt(cmp.space_groups)
        w = _first_mismatch(cmp.chain_groups, cmp.discrete_groups)
        r.check("chain hocolim = space hocolim", PASS if w is None else FAIL, w)
    if args.compare_leq_k is not None:
        k = args.compare_leq_k
        if k < 1:
            raise InputError("--compare-leq-k must be at least 1")
        with _Timer(r, "restriction"):
            Q = auto_disk_poset(K, k, P.family)
            hk = hocolim_homology(h0_diagram(Q.diagram, A), A, args.max_degree)
        r.groups[f"hocolim of H~_0, <= {k} pieces"] = _fmt(hk)
        w = _first_mismatch(hc, hk)
        r.check(f"restriction {args.max_components} vs {k}", PASS if w is None else FAIL, w)
    if args.strict:
        red = homology(reduced_chains(K), A, args.max_degree)
        r.groups["reduced homology"] = _fmt(red)
        w = _first_mismatch(hc, red)
        r.check("hocolim = reduced homology", PASS if w is None else FAIL, w)
    r.notes.append(DEVIATIONS[0])
    return r


# ---------------------------------------------------------------------------
# argument parsing

def _common(p: argparse.ArgumentParser, coeff: bool = True):
    p.add_argument("--subdivide", type=int, default=0, metavar="N",
                   help="barycentric subdivisions applied first")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.add_argument("--allow-inconclusive", action="store_true",
                   help="exit 0 when checks are only inconclusive")
    p.add_argument("--strict", action="store_true",
                   help="hocolim: also run the svk check and compare against reduced homology; "
                        "never accept inconclusive checks")
    p.add_argument("--max-degree", dest="max_degree_opt", type=int, default=None, metavar="K")
    if coeff:
        p.add_argument("--coeff", dest="coeff_opt", default=None, metavar="G")


def _echo_flags(args) -> str:
    """Result-affecting options in a fixed order, for the command echo."""
    out = []
    if args.subdivide:
        out.append(f"--subdivide {args.subdivide}")
    if getattr(args, "family", "auto") != "auto":
        out.append(f"--family {args.family}")
    for flag in ("check_svk", "compare_space", "stabilize", "strict", "allow_inconclusive"):
        if getattr(args, flag, False):
            out.append("--" + flag.replace("_", "-"))
    if getattr(args, "compare_leq_k", None) is not None:
        out.append(f"--compare-leq-k {args.compare_leq_k}")
    if getattr(args, "cell_limit", None) is not None:
        out.append(f"--cell-limit {args.cell_limit}")
    return "".join(" " + f for f in out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stp", description="Finite-model checks of the Dold-Thom isomorphism.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", help="reduced homology of a space")
    p.add_argument("space")
    p.add_argument("coeff", nargs="?", default="Z")
    p.add_argument("max_degree", nargs="?", type=int, default=2)
    _common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("verify", help="compare the three Dold-Thom pipelines")
    p.add_argument("space")
    p.add_argument("coeff", nargs="?", default="Z")
    p.add_argument("max_degree", nargs="?", type=int, default=2)
    p.add_argument("--family", choices=("auto", "collapsible", "simplex"), default="auto")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sympower", help="homology of a symmetric power")
    p.add_argument("space")
    p.add_argument("d", type=int)
    p.add_argument("max_degree", nargs="?", type=int, default=2)
    p.add_argument("--stabilize", action="store_true", help="also check SP^d -> SP^(d+1)")
    p.add_argument("--cell-limit", type=int, default=None, metavar="N",
                   help="nondegenerate simplex budget (default: STP_CELL_LIMIT or 200000)")
    _common(p, coeff=False)
    p.set_defaults(func=cmd_sympower)

    p = sub.add_parser("hocolim", help="homotopy colimit over a disk poset")
    p.add_argument("space")
    p.add_argument("max_components", type=int)
    p.add_argument("coeff", nargs="?", default="Z")
    p.add_argument("max_degree", nargs="?", type=int, default=1)
    p.add_argument("--family", choices=("auto", "collapsible", "simplex"), default="auto")
    p.add_argument("--check-svk", action="store_true")
    p.add_argument("--compare-space", action="store_true")
    p.add_argument("--compare-leq-k", type=int, default=None, metavar="K")
    _common(p)
    p.set_defaults(func=cmd_hocolim)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.max_degree_opt is not None:
        args.max_degree = args.max_degree_opt
    if getattr(args, "coeff_opt", None) is not None:
        args.coeff = args.coeff_opt
    if args.max_degree < 0:
        print("stp: error: max_degree must be non-negative", file=sys.stderr)
        return 2
    try:
        report = args.func(args)
    except (InputError, ComplexError, ChainComplexError, HocolimError, ConfigurationError) as exc:
        print(f"stp: error: {exc}", file=sys.stderr)
        return 2
    report.command += _echo_flags(args)
    code = report.exit_code(args.allow_inconclusive and not args.strict)
    if args.json:
        sys.stdout.write(json.dumps(report.to_dict(code, args.timings), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(report.render(code, args.timings))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
