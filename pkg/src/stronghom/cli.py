"""``stronghom`` command line: homology, total, lim and verify subcommands.

Exit codes: 0 when everything passed, 1 when a verification failed, 2 for
input errors (schema, shapes, instances outside a checker's scope).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .cone import DimensionMismatch, build_cone
from .divlin import DivHomology
from .instance_io import Instance, InstanceError, digest, load_instance, serialize_instance
from .instances import resolve_seed
from .prosys import NotDirected
from .report import Report, _jsonable
from .resolution import InexactSequence

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _label(h: DivHomology) -> str:
    if h.finitely_generated:
        return str(h.group.canonical_form())
    return str(h.structure())


def _header(inst: Instance, seed: int) -> dict:
    return {"engine_version": __version__, "instance_digest": digest(serialize_instance(inst)),
            "seed": seed}


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(_jsonable(payload), sort_keys=True, indent=1))
    else:
        print(text)
    if getattr(args, "report", None):
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(payload), fh, sort_keys=True, indent=1)
            fh.write("\n")


def _single_complex(inst: Instance):
    S = inst.system
    if S is None or len(S.poset.elements) != 1:
        raise InputError("this command expects a single-complex instance ('complex' key)")
    return S.complexes[S.poset.elements[0]]


def _system(inst: Instance):
    if inst.system is None:
        raise InputError("this command expects a system instance ('poset', 'complexes', 'bondings')")
    return inst.system


# ---------------------------------------------------------------------------
# subcommands


def cmd_homology(args, inst: Instance, seed: int) -> int:
    C = _single_complex(inst)
    R = inst.resolution(args.coefficients)
    X = build_cone(C, R)
    degrees = [args.degree] if args.degree is not None else list(range(0, C.top + 1)) or [0]
    groups = {n: _label(X.homology(n)) for n in degrees}
    text = " ".join(f"H{n}={g}" for n, g in groups.items())
    _emit(args, text, {**_header(inst, seed), "command": "homology", "coefficients": R.label(),
                       "homology": groups})
    return EXIT_OK


def cmd_total(args, inst: Instance, seed: int) -> int:
    from .total import TotalFamily, height_tower
    S = _system(inst)
    R = inst.resolution(args.coefficients)
    directed = S.poset.directed
    warnings = []
    if args.infinity and not directed:
        warnings.append("poset has no maximum: H∞ is computed, but the comparison "
                        "with the limit complex is out of scope")
    fam = TotalFamily(S, R, normalized=args.normalized)
    norm_fam = fam if args.normalized else TotalFamily(S, R, normalized=True)
    height = args.height if args.height is not None else S.poset.height
    full = norm_fam.full
    degrees = [args.degree] if args.degree is not None else list(range(full.lo, full.hi + 1))
    lines, data = [], {}
    for n in degrees:
        entry = {"height": height, "H_r": _label(fam.height_homology(height, n))}
        if args.normalized:
            tower = height_tower(S, R, n, height, fam)
            entry["tower"] = tower.labels()
            entry["stable_from"] = tower.stable_from
            tower_txt = " <- ".join(tower.labels())
        else:
            tower_txt = " <- ".join(_label(fam.height_homology(r, n)) for r in range(height + 1))
            entry["tower"] = tower_txt.split(" <- ")
            entry["stable_from"] = None
        entry["H_inf"] = _label(full.homology(n))
        data[n] = entry
        stab = f" (stable from r={entry['stable_from']})" if entry["stable_from"] is not None else ""
        lines.append(f"n={n}: H({height})={entry['H_r']} Hinf={entry['H_inf']} tower: {tower_txt}{stab}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    payload = {**_header(inst, seed), "command": "total", "coefficients": R.label(),
               "normalized": args.normalized, "in_scope": directed, "warnings": warnings, "degrees": data}
    if warnings:
        lines.append("scope: out of scope (no maximum element)")
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def cmd_lim(args, inst: Instance, seed: int) -> int:
    from .limits import cone_homology_system, lim_subquotient, ml_analyze, nerve_cohomology
    from .prosys import inverse_cone_system
    i = args.i
    if i < 0:
        raise InputError("--i must be nonnegative")
    if inst.tower is not None:
        res = ml_analyze(inst.tower)
        payload = {**_header(inst, seed), "command": "lim", "mittag_leffler": res.mittag_leffler,
                   "lim": str(res.lim) if res.lim is not None else None, "lim1": res.lim1,
                   "stable_from": res.stable_from, "note": res.note}
        _emit(args, str(res), payload)
        return EXIT_OK
    if inst.group_system is not None:
        h = lim_subquotient(inst.group_system, i)
        what = "group system"
    else:
        S = _system(inst)
        if args.degree is None:
            raise InputError("--degree is required for the limit of a system's cone homology")
        R = inst.resolution(args.coefficients)
        h = nerve_cohomology(cone_homology_system(inverse_cone_system(S, R), args.degree), i)
        what = f"H_{args.degree}(cone)"
    name = "lim" if i == 0 else f"lim{i}"
    value = _label(h)
    _emit(args, f"{name} = {value}", {**_header(inst, seed), "command": "lim", "of": what, "i": i,
                                      name: value})
    return EXIT_OK


def cmd_verify(args, inst: Instance, seed: int) -> int:
    from . import verify as V
    th = args.theorem
    if th == "lemma4":
        if inst.ses is None:
            raise InputError("lemma4 needs an 'ses' entry in the instance")
        phi, psi = inst.ses
        rep = V.verify_lemma4(_system(inst), phi, psi, seed=seed)
    elif th == "ucf":
        from .fgab import FgAbGroup
        C = _single_complex(inst)
        R = inst.resolution(args.coefficients)
        if not isinstance(R.G, FgAbGroup):
            raise InputError("ucf needs a finitely generated coefficient group")
        rep = V.verify_ucf(C, R.G, seed=seed)
    else:
        S = _system(inst)
        R = inst.resolution(args.coefficients)
        kwargs = {"seed": seed}
        if th == "theorem1":
            kwargs["ladder"] = not args.no_ladder
        rep = V.THEOREMS[th](S, R, **kwargs)
    rep.meta["file_digest"] = _header(inst, seed)["instance_digest"]
    _emit(args, str(rep), rep.to_dict())
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stronghom", description="Exact homology of finite direct systems "
                                "of cochain complexes via injective-resolution cones.")
    p.add_argument("--version", action="version", version=f"stronghom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="JSON instance file")
        sp.add_argument("--coefficients", "-G", help='coefficient group, e.g. "Z", "Z/2", "Z+Z/4", "Q/Z"')
        sp.add_argument("--json", action="store_true", help="print the machine-readable report")
        sp.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
        sp.add_argument("--seed", type=int, help="seed recorded in the report (default: STRONGHOM_SEED)")

    h = sub.add_parser("homology", help="cone homology of a single complex")
    common(h)
    h.add_argument("--degree", "-n", type=int)

    t = sub.add_parser("total", help="truncated and full total-complex homology")
    common(t)
    t.add_argument("--height", "-r", type=int)
    t.add_argument("--normalized", type=_bool, default=True, metavar="BOOL")
    t.add_argument("--degree", "-n", type=int)
    t.add_argument("--infinity", action="store_true", help="request H∞ (warns outside directed scope)")

    lm = sub.add_parser("lim", help="derived limits of a group system, tower or cone-homology system")
    common(lm)
    lm.add_argument("--i", type=int, default=0, help="derived functor index")
    lm.add_argument("--degree", "-n", type=int)

    v = sub.add_parser("verify", help="run a comparison checker")
    common(v)
    v.add_argument("--theorem", required=True,
                   choices=["lemma1", "corollary1", "lemma2", "lemma3", "lemma4", "theorem1", "theorem2",
                            "milnor", "ucf", "mardesic"])
    v.add_argument("--no-ladder", action="store_true", help="skip the comparison ladder in theorem1")
    return p


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


COMMANDS = {"homology": cmd_homology, "total": cmd_total, "lim": cmd_lim, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    seed = resolve_seed(args.seed)
    try:
        inst = load_instance(args.file)
        return COMMANDS[args.command](args, inst, seed)
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror}", file=sys.stderr)
    except (InstanceError, InputError, DimensionMismatch, NotDirected, InexactSequence) as e:
        print(f"error: {e}", file=sys.stderr)
    except ValueError as e:
        # OutOfScope and malformed-structure errors from the engine
        print(f"error: {e}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
