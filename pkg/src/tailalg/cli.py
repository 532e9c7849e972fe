"""Command-line entry point: ``tailalg <family> <command> [options]``.

Every run prints one JSON report (or a CSV table) and exits with 0 on
pass/surrogate, 1 on fail and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence

from . import classical, commutant, fock, qfock, qpoly, words
from .fock import TruncationWindow, parse_word
from .rational import fmt_frac
from .report import Report

VALUE_OPTS = {"--window", "--cap", "--seed", "--q", "--len", "--n-range", "--out", "--format", "--H", "--J",
              "--samples", "--in", "--config", "--degree", "--n0", "--swap", "--shift", "--scale"}

DEFAULTS = {
    ("monotone", "relations"): {"window": "-4:4", "cap": 4},
    ("monotone", "normal-form"): {},
    ("monotone", "symmetric-space"): {"window": "-3:3", "len": 4},
    ("monotone", "exchangeable-space"): {"window": "-2:2", "len": 3},
    ("monotone", "definetti"): {"H": "1,2", "J": "5,6", "samples": 200, "seed": 0},
    ("monotone", "tail-experiment"): {"window": "-3:3", "cap": 3, "n-range": "0:2", "degree": None},
    ("qfock", "gram"): {"window": "-2:2", "cap": 2, "q": "symbolic"},
    ("qfock", "relations"): {"window": "-2:2", "cap": 4, "q": "symbolic"},
    ("qfock", "wick"): {},
    ("qfock", "moment"): {"q": "symbolic"},
    ("qfock", "invariance"): {"swap": None, "shift": None, "scale": None},
    ("qfock", "tail-probe"): {"n0": 2, "len": 3, "window": "-4:4", "cap": 3},
    ("qfock", "implementors"): {"window": "-3:3", "cap": 3},
    ("classical", "reconstruct"): {"in": None},
    ("classical", "consistency"): {"in": None},
}

WORD_COMMANDS = {("monotone", "normal-form"), ("qfock", "wick"), ("qfock", "moment"), ("qfock", "invariance")}


class UsageError(ValueError):
    pass


def _preprocess(argv: Sequence[str]) -> List[str]:
    """Glue option values that start with '-' and protect negative creators.

    ``--window -2:2`` becomes ``--window=-2:2`` and a word token like
    ``-3+`` becomes ``l-3+`` so argparse does not read it as an option.
    """
    out: List[str] = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        elif re.fullmatch(r"-\d+\+", tok):
            out.append("l" + tok)
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailalg", description="Exact verification harness for monotone and q-deformed Fock models.")
    fams = parser.add_subparsers(dest="family", required=True)
    for fam in ("monotone", "qfock", "classical"):
        fp = fams.add_parser(fam)
        cmds = fp.add_subparsers(dest="command", required=True)
        for (f, cmd), defaults in DEFAULTS.items():
            if f != fam:
                continue
            cp = cmds.add_parser(cmd)
            if (f, cmd) in WORD_COMMANDS:
                cp.add_argument("word", nargs="*", help="letters: '3' annihilator, '3+' creator")
            for key in defaults:
                cp.add_argument(f"--{key}", dest=key.replace("-", "_"), default=None)
            cp.add_argument("--out", default=None)
            cp.add_argument("--format", choices=("json", "csv"), default="json")
            cp.add_argument("--config", default=None)
    return parser


def _window(text: str, cap) -> TruncationWindow:
    m = re.fullmatch(r"(-?\d+):(-?\d+)", str(text))
    if not m:
        raise UsageError(f"--window expects LO:HI, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise UsageError(f"--window needs LO <= HI, got {text}")
    return TruncationWindow(lo, hi, _int(cap, "cap", minimum=0))


def _int(value, name: str, minimum: Optional[int] = None) -> int:
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{name} expects an integer, got {value!r}") from None
    if minimum is not None and v < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")
    return v


def _q(text: str) -> Optional[Fraction]:
    if text in (None, "symbolic"):
        return None
    try:
        q = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--q expects P/Q or 'symbolic', got {text!r}") from None
    if not -1 < q < 1:
        raise UsageError(f"--q must satisfy -1 < q < 1, got {text}")
    return q


def _sites(text: str, name: str) -> List[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects a comma-separated list of integers") from None


def _range(text: str) -> List[int]:
    m = re.fullmatch(r"(-?\d+):(-?\d+)", str(text))
    if not m:
        raise UsageError(f"--n-range expects A:B, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if a > b:
        raise UsageError("--n-range needs A <= B")
    return list(range(a, b + 1))


def _word(tokens: Sequence[str]):
    try:
        return parse_word(tokens)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resolve(ns: argparse.Namespace) -> Dict[str, object]:
    """Explicit flags win over the config file, which wins over defaults."""
    key = (ns.family, ns.command)
    params = dict(DEFAULTS[key])
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for k, v in cfg.items():
            if k not in params:
                raise UsageError(f"unknown config key {k!r} for {' '.join(key)}")
            params[k] = v
    for k in DEFAULTS[key]:
        v = getattr(ns, k.replace("-", "_"))
        if v is not None:
            params[k] = v
    if key in WORD_COMMANDS:
        params["word"] = list(ns.word)
    return params


def _load_json(path) -> dict:
    if not path:
        raise UsageError("--in FILE is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input: {exc}") from None


def _scalar(x):
    if isinstance(x, float):
        return x
    return Fraction(str(x))


def _family(data: dict) -> classical.CommutingFamily:
    mats = [[[_scalar(x) for x in row] for row in m] for m in data["matrices"]]
    xi = [_scalar(x) for x in data["xi"]]
    return classical.CommutingFamily.from_lists(mats, xi, float(data.get("tol", classical.DEFAULT_TOL)))


def _measure(data: dict) -> classical.AtomicMeasure:
    atoms = [(tuple(_scalar(x) for x in a["point"]), _scalar(a["weight"])) for a in data["atoms"]]
    exact = all(isinstance(w, Fraction) for _, w in atoms)
    return classical.AtomicMeasure(atoms, tuple(data["labels"]), exact)


def execute(family: str, command: str, p: Dict[str, object]) -> Report:
    key = (family, command)
    if key == ("monotone", "relations"):
        return fock.verify_monotone_relations(_window(p["window"], p["cap"]))
    if key == ("monotone", "normal-form"):
        w = _word(p["word"])
        coords = words.normal_form(words.WordExpression.word(w))
        rep = Report("monotone.normal_form", {"word": [x.token() for x in w]})
        rep.payload = coords.to_json()
        if not words.reconstructs(words.WordExpression.word(w)):
            rep.violate("reconstruction", detail="normal form differs from the word on some column")
        return rep
    if key in (("monotone", "symmetric-space"), ("monotone", "exchangeable-space")):
        w = _window(p["window"], 0)
        mode = "symmetric_moments" if command == "symmetric-space" else "exchangeable_elements"
        return words.invariant_space_dim(mode, _int(p["len"], "len", 1), w.lo, w.hi)
    if key == ("monotone", "definetti"):
        return words.definetti_factorization_check(_sites(p["H"], "H"), _sites(p["J"], "J"),
                                                   samples=_int(p["samples"], "samples", 1),
                                                   seed=_int(p["seed"], "seed"))
    if key == ("monotone", "tail-experiment"):
        degree = None if p["degree"] is None else _int(p["degree"], "degree", 1)
        cfg = commutant.ExperimentConfig(_window(p["window"], p["cap"]), degree, tuple(_range(p["n-range"])))
        return commutant.monotone_tail_experiment(cfg)
    if key == ("qfock", "gram"):
        q = _q(p["q"])
        gram = qfock.q_gram(_window(p["window"], p["cap"]), "symbolic" if q is None else q)
        rep = Report("qfock.gram", {})
        rep.payload = gram.to_json()
        return rep
    if key == ("qfock", "relations"):
        w = _window(p["window"], p["cap"])
        if w.cap < 2:
            raise UsageError("--cap must be >= 2 for the relation suite")
        return qfock.verify_q_relations(w, _q(p["q"]))
    if key == ("qfock", "wick"):
        w = _word(p["word"])
        rep = Report("qfock.wick", {"word": [x.token() for x in w]})
        rep.payload = qfock.wick_normal_form(w).to_json()
        return rep
    if key == ("qfock", "moment"):
        w = _word(p["word"])
        q = _q(p["q"])
        poly = qfock.vacuum_moment(w)
        rep = Report("qfock.moment", {"word": [x.token() for x in w]})
        rep.payload = {"moment": list(poly)}
        if q is not None:
            val = qpoly.evaluate(poly, q)
            rep.payload["value"] = fmt_frac(val)
            numeric = qfock.vacuum_moment_numeric(w, q)
            rep.payload["numeric"] = fmt_frac(numeric)
            if numeric != val:
                rep.violate("numericOracle", symbolic=fmt_frac(val), numeric=fmt_frac(numeric))
        return rep
    if key == ("qfock", "invariance"):
        w = _word(p["word"])
        given = [k for k in ("swap", "shift", "scale") if p[k] is not None]
        if len(given) != 1:
            raise UsageError("give exactly one of --swap I,J / --shift K / --scale A")
        if given[0] == "swap":
            ij = _sites(p["swap"], "swap")
            if len(ij) != 2 or ij[0] == ij[1]:
                raise UsageError("--swap expects two distinct sites I,J")
            t = qfock.SiteMap.permutation(words.PermutationSpec.transposition(*ij))
        elif given[0] == "shift":
            t = qfock.SiteMap.shift(_int(p["shift"], "shift"))
        else:
            a = _int(p["scale"], "scale", 1)
            t = qfock.SiteMap.increasing(lambda i: a * i, f"scale{a}")
        return qfock.invariance_check(w, t)
    if key == ("qfock", "tail-probe"):
        return qfock.tail_vanishing_probe(_int(p["n0"], "n0", 0), _int(p["len"], "len", 1),
                                          _window(p["window"], p["cap"]))
    if key == ("qfock", "implementors"):
        return qfock.symmetry_implementors(_window(p["window"], p["cap"])).report
    if key == ("classical", "reconstruct"):
        fam = _family(_load_json(p["in"]))
        measure = classical.joint_spectral_measure(fam)
        moments = classical.verify_moment_identity(fam, measure, 4)
        _, rep = classical.reconstruct_multiplication_model(fam, measure)
        rep.violations.extend(moments.violations)
        rep.payload["momentMonomials"] = moments.payload["monomials"]
        return rep
    if key == ("classical", "consistency"):
        data = _load_json(p["in"])
        if "marginals" in data:
            margs = [_measure(m) for m in data["marginals"]]
        else:
            joint = classical.joint_spectral_measure(_family(data))
            labels = joint.labels
            margs = [classical.marginal(joint, sub) for k in range(1, len(labels) + 1)
                     for sub in combinations(labels, k)]
        rep = classical.kolmogorov_consistency_check(margs)
        rep.payload["marginalsJson"] = [m.to_json() for m in margs]
        return rep
    raise UsageError(f"unknown command {family} {command}")  # pragma: no cover


def _csv(rep: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "key", "value"])
    w.writerow(["status", rep.operation, rep.status])
    for k, v in sorted(rep.payload.items()):
        if isinstance(v, (int, float, str, bool)) or v is None:
            w.writerow(["payload", k, v])
    for v in rep.violations:
        w.writerow(["violation", v.get("check", ""), json.dumps(v, sort_keys=True)])
    for c in rep.caveats:
        w.writerow(["caveat", "", c])
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_preprocess(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = resolve(ns)
        try:
            rep = execute(ns.family, ns.command, params)
        except UsageError:
            raise
        except Exception as exc:  # operation errors become a failing report
            rep = Report(f"{ns.family}.{ns.command}", {})
            rep.violate("error", type=type(exc).__name__, message=str(exc))
    except UsageError as exc:
        print(f"tailalg: error: {exc}", file=sys.stderr)
        return 2
    rep.inputs = {"command": [ns.family, ns.command], **{k: v for k, v in params.items()}, **rep.inputs}
    text = rep.to_json() + "\n" if ns.format == "json" else _csv(rep)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
