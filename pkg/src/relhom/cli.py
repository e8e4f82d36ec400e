"""Command-line interface: ``relhom {ext,tate,resolve,lift,am,les,demo,prop}``.

Exit status: 0 success, 1 a verification/certificate failed, 2 input error.
Option precedence: command-line flags > ``--config`` JSON file > defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable

from . import serialize as ser
from .cohomology import (
    ExtTable,
    ModuleSES,
    am_sequence,
    ext_table,
    les_contravariant,
    les_covariant,
    tate_ext_cone,
    tate_table,
)
from .complexes import ChainMap
from .errors import InputError, RelhomError, VerificationFailure
from .modules import ModuleMorphism, ZmModule, kernel
from .props import prop_suite
from .relative import SubcatDescriptor, lift_module_map, proper_resolution, resolve_complex, x_pd

FORMATS = ("json", "csv", "text")

# option name -> default (None: required by the commands that use it, or derived)
DEFAULTS: dict[str, Any] = {
    "m": None,
    "M": None,
    "N": None,
    "X": None,
    "W": "PROJ",
    "range": 4,
    "lo": 1,
    "depth": None,
    "n": None,
    "seed": None,
    "format": "text",
    "budget": 10,
    "T": None,
    "map": None,
    "seq": None,
    "kind": "covariant",
    "route": "complete",
}


@dataclass
class JobSpec:
    command: str
    options: dict[str, Any]

    def get(self, key: str):
        return self.options.get(key)


# ---------------------------------------------------------------- option handling


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, help="modulus m (may also come from an @m literal suffix)")
    common.add_argument("--M", help="module literal, e.g. Z4+Z2@4")
    common.add_argument("--N", help="second module literal")
    common.add_argument("--X", help="subcategory: PROJ, GP or a JSON descriptor")
    common.add_argument("--W", help="second subcategory (default PROJ)")
    common.add_argument("--range", type=int, help="top degree of the table")
    common.add_argument("--depth", type=int, help="resolution depth (must be >= range + 2)")
    common.add_argument("--n", type=int, help="single degree instead of a table")
    common.add_argument("--seed", type=int, help="random seed (fallback: $RELHOM_SEED)")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--config", help="JSON config file")

    p = argparse.ArgumentParser(prog="relhom", description="Exact relative homological algebra over Z/m.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ext", parents=[common], help="relative Ext table Ext^n_X(M, N), n = 0..range")
    t = sub.add_parser("tate", parents=[common], help="Tate Ext table, n = lo..range")
    t.add_argument("--lo", type=int, help="lowest degree (default 1; may be negative for the complete route)")
    t.add_argument("--route", choices=("complete", "cone"), help="complete resolution or cone(W -> X) route")
    r = sub.add_parser("resolve", parents=[common], help="proper X-resolution of M, or resolve a complex T")
    r.add_argument("--T", help="complex as JSON (or @path)")
    lft = sub.add_parser("lift", parents=[common], help="lift f: M -> N to the proper resolutions")
    lft.add_argument("--map", help="row-major JSON matrix of f: M -> N (default: identity)")
    sub.add_parser("am", parents=[common], help="the sequence linking Ext_X, Ext_W and Tate Ext")
    les = sub.add_parser("les", parents=[common], help="long exact Ext sequence of an X-acyclic short exact sequence")
    les.add_argument("--seq", help='JSON {"N": ..., "N1": ..., "N2": ..., "f": [[..]], "g": [[..]]} (or @path)')
    les.add_argument("--kind", choices=("covariant", "contravariant"))
    d = sub.add_parser("demo", parents=[common], help="reproduce a worked example")
    d.add_argument("name", choices=("example-3-10",))
    pr = sub.add_parser("prop", parents=[common], help="randomized property suite")
    pr.add_argument("--budget", type=int, help="instances per property (0: empty report)")
    return p


def _read_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    return data


def parse_job(argv: list[str] | None = None) -> JobSpec:
    args = _build_parser().parse_args(argv)
    config = _read_config(args.config)
    opts: dict[str, Any] = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        opts[key] = flag if flag is not None else config.get(key, default)
    if opts["seed"] is None:
        env = os.environ.get("RELHOM_SEED")
        try:
            opts["seed"] = int(env) if env else 0
        except ValueError as exc:
            raise InputError(f"RELHOM_SEED must be an integer, got {env!r}") from exc
    if opts["format"] not in FORMATS:
        raise InputError(f"format must be one of {FORMATS}")
    if getattr(args, "name", None):
        opts["name"] = args.name
    return JobSpec(args.command, opts)


def _maybe_file(text):
    if isinstance(text, str) and text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {text[1:]!r}: {exc}") from exc
    return text


def _modulus(job: JobSpec) -> int:
    m = job.get("m")
    if m is None:
        for key in ("M", "N"):
            lit = job.get(key)
            if isinstance(lit, str) and "@" in lit:
                m = int(lit.rsplit("@", 1)[1])
                break
    if m is None:
        raise InputError("no modulus: pass --m or use an @m literal suffix")
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise InputError(f"modulus must be an integer >= 2, got {m!r}")
    return m


def _module(job: JobSpec, key: str, m: int) -> ZmModule:
    lit = job.get(key)
    if lit is None:
        raise InputError(f"--{key} is required")
    return ser.module_from_json(lit, m)


def _subcat(job: JobSpec, key: str, m: int, default: str) -> SubcatDescriptor:
    spec = job.get(key) or default
    return ser.subcat_from_json(spec, m)


def _window(job: JobSpec, extra: int = 2) -> tuple[int, int]:
    top = job.get("range")
    if job.get("n") is not None:
        top = job.get("n")
    depth = job.get("depth")
    if depth is None:
        depth = abs(top) + extra
    if depth < abs(top) + 2:
        raise InputError(f"depth {depth} < range + 2 = {abs(top) + 2}")
    return top, depth


# ---------------------------------------------------------------- output


def _emit_table(table: ExtTable, fmt: str) -> str:
    if fmt == "json":
        return ser.dumps(table.to_json())
    if fmt == "csv":
        return ser.ext_table_csv(table)
    return ser.ext_table_text(table)


def _emit(obj: dict, text: str, fmt: str) -> str:
    if fmt == "text":
        return text
    if fmt == "csv":
        raise InputError("csv output is only available for Ext tables")
    return ser.dumps(obj)


def _checks_text(checks: dict[str, bool]) -> str:
    return "\n".join(f"  {'ok  ' if v else 'FAIL'} {k}" for k, v in sorted(checks.items()))


# ---------------------------------------------------------------- commands


def cmd_ext(job: JobSpec) -> tuple[str, bool]:
    m = _modulus(job)
    M, N = _module(job, "M", m), _module(job, "N", m)
    X = _subcat(job, "X", m, "PROJ")
    top, depth = _window(job)
    table = ext_table(M, N, X, top, depth)
    if job.get("n") is not None:
        table = ExtTable(table.flavor, {top: table.entries[top]}, depth)
    return _emit_table(table, job.get("format")), True


def cmd_tate(job: JobSpec) -> tuple[str, bool]:
    m = _modulus(job)
    M, N = _module(job, "M", m), _module(job, "N", m)
    top, depth = _window(job, extra=3)
    lo = top if job.get("n") is not None else job.get("lo")
    if job.get("route") == "cone":
        X = _subcat(job, "X", m, "GP")
        W = _subcat(job, "W", m, "PROJ")
        if lo < 1:
            raise InputError("the cone route covers degrees n >= 1")
        if depth < top + 3:
            raise InputError(f"cone route needs depth >= range + 3 = {top + 3}")
        table = ExtTable("tate", {n: tate_ext_cone(M, N, n, X, W, depth) for n in range(lo, top + 1)}, depth)
    else:
        table = tate_table(M, N, lo, top, max(depth, max(abs(lo), abs(top)) + 2))
    return _emit_table(table, job.get("format")), True


def cmd_resolve(job: JobSpec) -> tuple[str, bool]:
    T_doc = job.get("T")
    if T_doc is not None:
        T = ser.complex_from_json(_maybe_file(T_doc))
        m = T.modulus
        if job.get("m") is not None and job.get("m") != m:
            raise InputError(f"complex is over Z/{m} but --m is {job.get('m')}")
        X = _subcat(job, "X", m, "GP")
        width = (T.support[1] - T.support[0]) if T.support else 0
        depth = job.get("depth") or width + 2
        R = resolve_complex(T, X, depth)
        post = R.postconditions(X)
        obj = {
            "T": ser.complex_to_json(T),
            "D": ser.complex_to_json(R.D),
            "K": ser.complex_to_json(R.K),
            "alpha": {str(n): f.matrix.tolist() for n, f in sorted(R.alpha.components.items())},
            "window": list(R.window),
            "postconditions": post,
        }
        text = "\n".join(
            [f"D = {R.D!r}", f"K = {R.K!r}", f"window = {R.window}", "postconditions:", _checks_text(post)]
        ) + "\n"
        return _emit(obj, text, job.get("format")), all(post.values())
    m = _modulus(job)
    M = _module(job, "M", m)
    X = _subcat(job, "X", m, "PROJ")
    depth = job.get("depth") or job.get("range") + 2
    res = proper_resolution(M, X, depth, truncate=True)
    checks = res.verify()
    pd = x_pd(M, X, depth)
    obj = {
        "module": list(M.orders),
        "subcategory": ser.subcat_to_json(X),
        "complex": ser.complex_to_json(res.complex),
        "augmentation": res.augmentation.matrix.tolist(),
        "finite": res.finite,
        "x_pd": pd if isinstance(pd, int) else str(pd),
        "checks": checks,
    }
    text = "\n".join(
        [
            f"{X.name}-resolution of {M} (depth {depth}): {res.complex!r}",
            f"finite: {res.finite}; {X.name}-pd = {pd}",
            "checks:",
            _checks_text(checks),
        ]
    ) + "\n"
    return _emit(obj, text, job.get("format")), all(checks.values())


def cmd_lift(job: JobSpec) -> tuple[str, bool]:
    m = _modulus(job)
    M = _module(job, "M", m)
    N = _module(job, "N", m) if job.get("N") is not None else M
    X = _subcat(job, "X", m, "PROJ")
    depth = job.get("depth") or job.get("range") + 2
    f = ser.morphism_from_json(_maybe_file(job.get("map")), M, N) if job.get("map") else None
    if f is None:
        if N != M:
            raise InputError("--map is required when M != N")
        f = ModuleMorphism.identity(M)
    src = proper_resolution(M, X, depth, truncate=True)
    tgt = proper_resolution(N, X, depth, truncate=True)
    beta = lift_module_map(f, src, tgt)
    alpha = ChainMap(src.complex, tgt.aug_map().target, {0: f @ src.augmentation})
    checks = {
        "chain_map": not beta.failures(),
        "covers_f": tgt.aug_map() @ beta == alpha,
    }
    obj = {
        "source": ser.complex_to_json(src.complex),
        "target": ser.complex_to_json(tgt.complex),
        "components": {str(n): g.matrix.tolist() for n, g in sorted(beta.components.items())},
        "checks": checks,
    }
    lines = [f"lift of f: {M} -> {N} over {X.name}-resolutions"]
    lines += [f"  degree {n}: {g.matrix.tolist()}" for n, g in sorted(beta.components.items())]
    lines += ["checks:", _checks_text(checks)]
    return _emit(obj, "\n".join(lines) + "\n", job.get("format")), all(checks.values())


def cmd_am(job: JobSpec) -> tuple[str, bool]:
    m = _modulus(job)
    M, N = _module(job, "M", m), _module(job, "N", m)
    X = _subcat(job, "X", m, "GP")
    W = _subcat(job, "W", m, "PROJ")
    depth = job.get("depth") or 6
    am = am_sequence(M, N, X, W, depth)
    obj = {
        "d": am.d,
        "top": am.top,
        "sequence": ser.exact_sequence_to_json(am.sequence),
        "full": ser.exact_sequence_to_json(am.full),
        "checks": dict(sorted(am.checks.items())),
        "ok": am.ok,
    }
    status = "exact at all nodes" if am.sequence.exact and am.full.exact else "NOT exact"
    parts = [ser.term_text(l, T) for l, T in zip(am.sequence.labels, am.sequence.terms)]
    lines = [" -> ".join(parts) + " -> 0", f"{status}, d = {am.d}", "checks:", _checks_text(am.checks)]
    return _emit(obj, "\n".join(lines) + "\n", job.get("format")), am.ok


def _read_seq(job: JobSpec, m: int) -> ModuleSES:
    doc = job.get("seq")
    if doc is None:
        raise InputError("--seq is required")
    data = ser._load(_maybe_file(doc))
    if not isinstance(data, dict) or not {"N", "N1", "N2", "f", "g"} <= set(data):
        raise InputError('--seq needs keys "N", "N1", "N2", "f", "g"')
    N, N1, N2 = (ser.module_from_json(data[k], m) for k in ("N", "N1", "N2"))
    return ModuleSES(ser.morphism_from_json(data["f"], N, N1), ser.morphism_from_json(data["g"], N1, N2))


def cmd_les(job: JobSpec) -> tuple[str, bool]:
    m = _modulus(job)
    M = _module(job, "M", m)
    X = _subcat(job, "X", m, "GP")
    seq = _read_seq(job, m)
    if not seq.is_exact():
        raise InputError("--seq is not a short exact sequence")
    top, _ = _window(job)
    if job.get("kind") == "contravariant":
        les = les_contravariant(seq, M, X, top)
    else:
        les = les_covariant(M, seq, X, top)
    obj = ser.exact_sequence_to_json(les)
    return _emit(obj, ser.exact_sequence_text(les), job.get("format")), les.all_checks_pass


def cmd_demo(job: JobSpec) -> tuple[str, bool]:
    # multiplication by 2 on Z4: its kernel 2Z4 = Z2 has no finite projective resolution
    m = 4
    Z4 = ZmModule(m, [4])
    K, _ = kernel(ModuleMorphism.scalar(Z4, 2))
    pd = x_pd(K, SubcatDescriptor.PROJ(m), 8)
    ok = K.group().to_list() == [2] and str(pd) == "AtLeast(8)"
    obj = {"kernel": K.group().to_list(), "x_pd": str(pd), "ok": ok}
    text = f"kernel of ×2 on Z4 is {K.group()}\nx_pd(Z2, PROJ, 8) = {pd}\n"
    return _emit(obj, text, job.get("format")), ok


def cmd_prop(job: JobSpec) -> tuple[str, bool]:
    budget = job.get("budget")
    if not isinstance(budget, int) or budget < 0:
        raise InputError("budget must be a non-negative integer")
    report = prop_suite(job.get("seed"), budget)
    return _emit(report.to_json(), report.text(), job.get("format")), report.ok


COMMANDS: dict[str, Callable[[JobSpec], tuple[str, bool]]] = {
    "ext": cmd_ext,
    "tate": cmd_tate,
    "resolve": cmd_resolve,
    "lift": cmd_lift,
    "am": cmd_am,
    "les": cmd_les,
    "demo": cmd_demo,
    "prop": cmd_prop,
}


def run(job: JobSpec) -> tuple[int, str]:
    """Dispatch a job; returns ``(exit status, report)``."""
    out, ok = COMMANDS[job.command](job)
    return (0 if ok else 1), out


def main(argv: list[str] | None = None) -> int:
    try:
        job = parse_job(argv)
        status, out = run(job)
    except VerificationFailure as exc:
        print(f"relhom: verification failed: {exc}", file=sys.stderr)
        return 1
    except (RelhomError, ValueError) as exc:
        print(f"relhom: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    if status:
        print("relhom: verification failed", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
