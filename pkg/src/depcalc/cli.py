"""Command-line front end.

Exit status: 0 on success, 1 on a checked failure (type error, inequality,
noninterference violation, law violation), 2 on usage or input errors.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .algebra import load_algebra, validate
from .checker import Calculus
from .errors import (
    DepcalcError,
    MalformedTable,
    ParseError,
)
from .generators import generate_corpus
from .judgements import algebra_for, elaborate_judgement, graded_context, parse_judgement
from .observer import fuzz_ni_dcce, fuzz_ni_lcirc, ni_check_dcce, ni_check_lcirc
from .oracle import protection_search, term_height, typing_search
from .rewrite import (
    DEFAULT_FUEL,
    Verdict,
    cbv_eval,
    cbv_trace,
    decide_equal,
    modal_normalize,
    normalize_lambda,
)
from .syntax import erase, erase_type, parse_type, print_term, print_type
from .translate import bottom_context, hat, overline, tilde, underline
from .typecheck_dcce import ProtectionMode, principal_level, protected

_CALCS = [c.value for c in Calculus]
_CORE = ("gmc", "gcc", "gmcc")


@dataclass
class Session:
    algebra_spec: str
    calculus: Calculus
    as_json: bool
    fuel: int
    seed: int
    trials: int
    algebra: object = None

    @property
    def alg(self):
        return algebra_for(self.calculus, self.algebra)

    def emit(self, payload: dict, text: str):
        click.echo(json.dumps(payload, indent=2, default=str) if self.as_json else text)


class _Checked(Exception):
    """A checked failure: report and exit 1."""

    def __init__(self, payload: dict, text: str):
        super().__init__(text)
        self.payload = payload
        self.text = text


def _run(session: Session, body):
    try:
        body()
    except _Checked as exc:
        session.emit(exc.payload, exc.text)
        sys.exit(1)
    except (ParseError, MalformedTable, OSError) as exc:
        _fail(session, exc, 2)
    except DepcalcError as exc:
        _fail(session, exc, 1)


def _fail(session: Session, exc: Exception, code: int):
    payload = {"ok": False, "error": type(exc).__name__, "message": str(exc)}
    if session.as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(code)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _judgement(session: Session, path: str):
    alg = session.alg
    j = parse_judgement(_read(path), alg)
    m = j.grade
    if session.calculus.graded:
        if m is None:
            m = 0 if session.calculus is Calculus.LCIRC else alg.unit
        ctx = graded_context(j.ctx, m)
    else:
        ctx = j.ctx
    return j, ctx, m


def _names(ctx) -> list:
    return [e.name for e in ctx]


def _show_ctx(ctx) -> str:
    parts = []
    for e in ctx:
        mark = f" :^{e.grade} " if e.grade is not None else " : "
        parts.append(f"{e.name}{mark}{print_type(e.type)}")
    return ", ".join(parts)


def _show_judgement(ctx, t, ty, m) -> str:
    colon = f":^{m}" if m is not None else ":"
    return f"{_show_ctx(ctx)} ⊢ {print_term(t, _names(ctx))} {colon} {print_type(ty)}"


# ---------------------------------------------------------------- group


@click.group()
@click.option("--algebra", "algebra_spec", default="l2", show_default=True,
              help="Built-in algebra (l2, diamond, nat, trivial) or an algebra file.")
@click.option("--calc", type=click.Choice(_CALCS), default="gmcc", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--fuel", type=int, default=DEFAULT_FUEL, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.pass_context
def main(ctx, algebra_spec, calc, as_json, fuel, seed, trials):
    """Workbench for graded dependency calculi."""
    session = Session(algebra_spec, Calculus(calc), as_json, fuel, seed, trials)
    ctx.obj = session
    if ctx.invoked_subcommand == "validate-algebra":
        return
    try:
        session.algebra = load_algebra(algebra_spec)
    except (OSError, MalformedTable) as exc:
        _fail(session, exc, 2)
    problems = validate(session.algebra)
    if problems:
        _fail(session, MalformedTable(f"algebra {algebra_spec} violates {problems[0].law}"), 2)


# ---------------------------------------------------------------- commands


@main.command()
@click.argument("path")
@click.pass_obj
def check(session: Session, path):
    """Type-check a judgement file."""

    def body():
        j, ctx, m = _judgement(session, path)
        ty, el = elaborate_judgement(session.alg, session.calculus, ctx, j.term, m, j.type)
        session.emit(
            {"ok": True, "calculus": session.calculus.value, "type": print_type(ty),
             "term": print_term(el, _names(ctx)), "grade": m},
            _show_judgement(ctx, el, ty, m))

    _run(session, body)


_TRANSLATIONS = {
    ("gmc", "dcce"), ("gcc", "dcce"), ("gmcc", "dcce"),
    ("dcce", "gmcc"), ("dcc", "gmcc"),
    ("gmc", "gmcce"), ("gcc", "gmcce"), ("gmcc", "gmcce"),
    ("lcirc", "gmcce"),
}


@main.command()
@click.option("--from", "source", type=click.Choice(_CALCS), default=None)
@click.option("--to", "target", type=click.Choice(_CALCS), required=True)
@click.argument("path")
@click.pass_context
def translate(cctx, source, target, path):
    """Translate a judgement between calculi and re-check the result."""
    session: Session = cctx.obj
    source = source or session.calculus.value
    if (source, target) not in _TRANSLATIONS:
        raise click.UsageError(f"no translation from {source} to {target}")
    session.calculus = Calculus(source)

    def body():
        j, ctx, m = _judgement(session, path)
        alg = session.alg
        ty = elaborate_judgement(alg, Calculus(source), ctx, j.term, m, j.type)[0]
        tctx, tm = ctx, None
        if target == "dcce":
            out = overline(alg, j.term, ctx, source)
        elif target == "gmcc":
            out = underline(alg, j.term, ctx)
        elif source == "lcirc":
            out, tm = hat(j.term, ctx, m), m
        else:
            out = tilde(alg, j.term, ctx, source)
            tctx, tm = bottom_context(alg, ctx), alg.unit
        elaborate_judgement(alg, Calculus(target), tctx, out, tm, ty)
        session.emit(
            {"ok": True, "from": source, "to": target, "term": print_term(out, _names(tctx)),
             "type": print_type(ty), "grade": tm},
            _show_judgement(tctx, out, ty, tm))

    _run(session, body)


@main.command("erase")
@click.argument("path")
@click.pass_obj
def erase_cmd(session: Session, path):
    """Print the erasure of a term."""

    def body():
        j, ctx, _ = _judgement(session, path)
        out = erase(j.term)
        names = _names(ctx)
        payload = {"ok": True, "term": print_term(out, names)}
        if j.type is not None:
            payload["type"] = print_type(erase_type(j.type))
        session.emit(payload, payload["term"])

    _run(session, body)


@main.command()
@click.argument("left")
@click.argument("right")
@click.pass_obj
def eq(session: Session, left, right):
    """Decide equality of two terms in the same context."""

    def body():
        j1, ctx, m = _judgement(session, left)
        j2 = parse_judgement(_read(right), session.alg)
        alg = session.alg
        t1 = elaborate_judgement(alg, session.calculus, ctx, j1.term, m)[1]
        t2 = elaborate_judgement(alg, session.calculus, ctx, j2.term, m)[1]
        v = decide_equal(alg, t1, t2, session.calculus, ctx, session.fuel)
        payload = {"ok": v.verdict in (Verdict.EQUAL_FULL, Verdict.EQUAL_UP_TO_ERASURE),
                   "verdict": v.verdict.value, "reason": v.reason}
        text = f"{v.verdict.value}: {v.reason}" if v.reason else v.verdict.value
        if not payload["ok"]:
            raise _Checked(payload, text)
        session.emit(payload, text)

    _run(session, body)


@main.command("eval")
@click.option("--trace", is_flag=True, help="Print every CBV step (DCC calculi).")
@click.argument("path")
@click.pass_obj
def eval_cmd(session: Session, trace, path):
    """Evaluate (DCC: call-by-value) or normalize (other calculi) a term."""

    def body():
        j, ctx, m = _judgement(session, path)
        alg, cal = session.alg, session.calculus
        ty, el = elaborate_judgement(alg, cal, ctx, j.term, m, j.type)
        names = _names(ctx)
        steps = None
        if cal in (Calculus.DCC, Calculus.DCCE):
            if trace:
                steps = cbv_trace(el, session.fuel)
                out = steps[-1]
            else:
                out = cbv_eval(el, session.fuel)
        elif cal is Calculus.LCIRC:
            out = normalize_lambda(erase(el), session.fuel)
        else:
            out = modal_normalize(alg, el, session.fuel, ctx, cal is Calculus.GMCCE)
        payload = {"ok": True, "value": print_term(out, names), "type": print_type(ty)}
        text = payload["value"]
        if steps is not None:
            payload["trace"] = [print_term(s, names) for s in steps]
            text = "\n".join(f"{i:4d}  {s}" for i, s in enumerate(payload["trace"]))
        session.emit(payload, text)

    _run(session, body)


@main.command()
@click.option("--level", default=None, help="Protected level of the argument (single check).")
@click.option("--out", "out_dir", default=None, help="Directory for counterexamples and the report.")
@click.argument("paths", nargs=-1)
@click.pass_obj
def ni(session: Session, level, out_dir, paths):
    """Noninterference: check one (f, a1, a2) triple, or fuzz --trials of them."""
    if session.calculus not in (Calculus.DCCE, Calculus.LCIRC):
        session.calculus = Calculus.DCCE
    if paths and len(paths) != 3:
        raise click.UsageError("give either no files or exactly three: f a1 a2")

    def body():
        alg = session.alg
        if paths:
            f, a1, a2 = (parse_judgement(_read(p), alg).term for p in paths)
            if session.calculus is Calculus.LCIRC:
                v = ni_check_lcirc(f, a1, a2, session.fuel)
            else:
                if level is None:
                    raise click.UsageError("--level is required for a DCC_e check")
                v = ni_check_dcce(alg, f, a1, a2, alg.parse_grade(level), session.fuel)
            payload = {"ok": v.passed, **v.to_json()}
            text = (f"{'PASS' if v.passed else 'FAIL'}: {print_term(v.value1)} / "
                    f"{print_term(v.value2)} (observer agrees: {v.observer_agrees})")
            if not v.passed:
                raise _Checked(payload, text)
            session.emit(payload, text)
            return
        if session.calculus is Calculus.LCIRC:
            report = fuzz_ni_lcirc(session.trials, session.seed, out_dir)
        else:
            report = fuzz_ni_dcce(alg, session.trials, session.seed, out_dir)
        payload = report.to_json()
        text = (f"{report.mode} over {report.algebra}: {report.trials} trials, "
                f"{len(report.failures)} failures, {report.observer_disagreements} observer "
                f"disagreements, {report.inadequate} adequacy mismatches")
        if not report.ok:
            raise _Checked(payload, text)
        session.emit(payload, text)

    _run(session, body)


@main.command()
@click.argument("path", required=False)
@click.pass_obj
def roundtrip(session: Session, path):
    """Compare a GMCC term with its translation to DCC_e and back (or a generated corpus)."""
    if session.calculus.value not in _CORE:
        session.calculus = Calculus.GMCC

    def body():
        alg, cal = session.alg, session.calculus
        if path:
            j, ctx, _ = _judgement(session, path)
            items = [(ctx, j.term)]
        else:
            items = [(c, t) for c, t, _, _ in generate_corpus(alg, cal, session.trials, session.seed)]
        counts = {v.value: 0 for v in Verdict}
        shown = []
        for ctx, t in items:
            back = underline(alg, overline(alg, t, ctx, cal.value), ctx)
            v = decide_equal(alg, t, back, "gmcc", ctx, session.fuel)
            counts[v.verdict.value] += 1
            shown.append((t, back, v, ctx))
        good = counts[Verdict.EQUAL_FULL.value] + counts[Verdict.EQUAL_UP_TO_ERASURE.value]
        payload = {"ok": good == len(items), "terms": len(items), "verdicts": counts,
                   "equal_full_fraction": counts[Verdict.EQUAL_FULL.value] / max(1, len(items))}
        if path:
            t, back, v, ctx = shown[0]
            payload["back"] = print_term(back, _names(ctx))
            text = f"{print_term(back, _names(ctx))}\n{v.verdict.value}"
        else:
            text = " ".join(f"{k}={n}" for k, n in counts.items())
            text += f"  (EqualFull {payload['equal_full_fraction']:.1%})"
        if not payload["ok"]:
            raise _Checked(payload, text)
        session.emit(payload, text)

    _run(session, body)


@main.group()
def oracle():
    """Brute-force derivation search."""


@oracle.command("protect")
@click.option("--mode", type=click.Choice(["plain", "extended"]), default="extended")
@click.option("--depth", type=int, default=8, show_default=True)
@click.argument("level")
@click.argument("type_src", metavar="TYPE")
@click.pass_obj
def oracle_protect(session: Session, mode, depth, level, type_src):
    """Search for a derivation of LEVEL ⊑ TYPE and compare with the fast procedure."""

    def body():
        alg = session.algebra
        lv = alg.parse_grade(level)
        ty = parse_type(type_src, alg)
        found = protection_search(alg, mode, lv, ty, depth)
        fast = protected(alg, mode, lv, ty)
        payload = {"ok": found == fast, "derivable": found, "protected": fast}
        if mode == "extended":
            payload["principal_level"] = principal_level(alg, ty)
        text = f"{level} ⊑ {print_type(ty)}: search={found} procedure={fast}"
        if found != fast:
            raise _Checked(payload, text + "  DISAGREE")
        session.emit(payload, text)

    _run(session, body)


@oracle.command("typing")
@click.option("--depth", type=int, default=None, help="Derivation height bound (default: term height).")
@click.argument("path")
@click.pass_obj
def oracle_typing(session: Session, depth, path):
    """List every type derivable for a judgement file by exhaustive rule search."""

    def body():
        j, ctx, m = _judgement(session, path)
        d = depth if depth is not None else term_height(j.term)
        found = typing_search(session.alg, session.calculus, ctx, j.term, d, m)
        payload = {"ok": bool(found), "types": sorted(print_type(t) for t in found)}
        text = "\n".join(payload["types"]) if found else "no derivation"
        if not found:
            raise _Checked(payload, text)
        session.emit(payload, text)

    _run(session, body)


@main.command("validate-algebra")
@click.argument("path", required=False)
@click.pass_obj
def validate_algebra(session: Session, path):
    """Check the algebra laws of --algebra (or of PATH)."""

    def body():
        alg = load_algebra(path or session.algebra_spec)
        problems = validate(alg)
        payload = {"ok": not problems, "algebra": alg.name,
                   "violations": [{"law": p.law, "witness": list(p.witness)} for p in problems]}
        if problems:
            raise _Checked(payload, "\n".join(f"{p.law}: {p.witness}" for p in problems))
        session.emit(payload, f"{alg.name}: {alg.kind.value}, {len(alg.elements)} elements, all laws hold"
                     if alg.is_finite else f"{alg.name}: built-in infinite algebra")

    _run(session, body)


@main.command()
@click.option("--out", "out_dir", default="report", show_default=True)
@click.pass_obj
def report(session: Session, out_dir):
    """Write CSV tables and PNG figures summarizing corpus runs."""
    from .report import write_report

    def body():
        files = write_report(Path(out_dir), session.trials, session.seed)
        session.emit({"ok": True, "files": [str(f) for f in files]},
                     "\n".join(str(f) for f in files))

    _run(session, body)


if __name__ == "__main__":
    main()
