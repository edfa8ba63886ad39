"""Command-line front end.

    multihomog analyze "x^2+y^3" --format json
    multihomog saito --file germ.txt
    multihomog invariance "x^2 - y^2*z" --trials 10

Exit status: 0 on success, 2 when the input is refused (syntax, smooth or
non-reduced germ, caps, unsupported spectrum), 1 when the computation hits
an internal obstruction; a diagnostic dump then goes to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .errors import (
    DimensionError,
    FactorizationError,
    InvalidGermError,
    MultihomogError,
    NotAUnitError,
    ObstructionError,
    PolynomialSyntaxError,
    RefusedInputError,
    UnsupportedSpectrumError,
)
from .logjets import stabilized_log_derivations
from .pipeline import (
    AnalysisConfig,
    _matrix,
    analyze,
    compute_torus,
    invariance_suite,
    render_text,
    rossi_guard,
    saito_test,
)
from .poly import Polynomial, parse_polynomial, variable_names

REFUSED = (
    PolynomialSyntaxError,
    RefusedInputError,
    InvalidGermError,
    NotAUnitError,
    UnsupportedSpectrumError,
    DimensionError,
    FactorizationError,
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("expr", nargs="?", help="polynomial, e.g. 'x^2 - y^2*z'")
    common.add_argument("--file", help="read the polynomial from a file ('-' for stdin)")
    common.add_argument("-N", "--order", type=int, help="truncation order N (default 2*deg f + 4)")
    common.add_argument("-k", "--jet-level", type=int, default=0, help="jet level of the derivation algebra")
    common.add_argument("--max-source-order", type=int, help="give up stabilizing beyond this m (default 4*deg f + 8)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="multihomog", description="Multihomogeneous structure of hypersurface germs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    a = sub.add_parser("analyze", parents=[common], help="full report")
    a.add_argument("--factors", help="irreducible factors of f, separated by ';'")
    sub.add_parser("torus", parents=[common], help="maximal torus and weight lattice")
    nz = sub.add_parser("normalize", parents=[common], help="multihomogeneous normal form of the equation")
    nz.add_argument("--factors", help="irreducible factors of f, separated by ';'")
    sub.add_parser("logder", parents=[common], help="stabilized logarithmic derivations")
    s = sub.add_parser("saito", parents=[common], help="bounded-degree test for f in its Jacobian ideal")
    s.add_argument("--degree-bound", type=int, help="largest multiplier degree (default 2*deg f + 4)")
    inv = sub.add_parser("invariance", parents=[common], help="compare invariants after random coordinate changes")
    inv.add_argument("--trials", type=int, default=10)
    inv.add_argument("--threads", type=int, default=1)
    return p


def read_input(args) -> Polynomial:
    if args.file is not None and args.expr is not None:
        raise ValueError("give either an expression or --file, not both")
    if args.file is not None:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    elif args.expr is not None:
        text = args.expr
    else:
        raise ValueError("no polynomial given")
    return parse_polynomial(text.strip())


def make_config(args) -> AnalysisConfig:
    factors = ()
    if getattr(args, "factors", None):
        factors = tuple(t.strip() for t in args.factors.split(";") if t.strip())
    return AnalysisConfig(
        order=args.order,
        jet_level=args.jet_level,
        max_source_order=args.max_source_order,
        seed=args.seed,
        factors=factors,
        format=args.format,
        saito_bound=getattr(args, "degree_bound", None),
        threads=getattr(args, "threads", 1) or 1,
    )


def _head(f: Polynomial) -> Dict[str, Any]:
    names = variable_names(f.nvars)
    return {"input": f.to_string(names), "nvars": f.nvars, "variables": names}


def cmd_analyze(f, cfg) -> Dict[str, Any]:
    return analyze(f, cfg).to_dict()


def cmd_normalize(f, cfg) -> Dict[str, Any]:
    d = analyze(f, replace(cfg, run_saito=False)).to_dict()
    keys = (
        "input", "nvars", "variables", "torus", "normalized_equation", "truncation_order",
        "normalizing_change", "unit", "factors", "warnings", "config_echo",
    )
    return {k: d[k] for k in keys}


def cmd_torus(f, cfg) -> Dict[str, Any]:
    guard = rossi_guard(f, cfg)
    if not guard.passed:
        raise RefusedInputError(guard.detail)
    L, g0, T, notes = compute_torus(f, cfg)
    out = _head(f)
    out.update(
        {
            "torus": {
                "rank": T.rank,
                "weights": [list(w) for w in T.weights],
                "linear_change": _matrix(T.linear_change),
            },
            "dim_g0": len(g0),
            "g0": [_matrix(A) for A in g0],
            "stabilization_witness": L.stabilization_witness,
            "warnings": list(guard.warnings) + notes,
            "config_echo": cfg.echo(),
        }
    )
    return out


def cmd_logder(f, cfg) -> Dict[str, Any]:
    L = stabilized_log_derivations(f, cfg.jet_level, m_max=cfg.max_source_order, m_start=cfg.min_source_order)
    names = variable_names(f.nvars)
    out = _head(f)
    out.update(
        {
            "jet_level": L.level,
            "dimension": L.dim,
            "basis": [
                {"field": b.to_string(names), "cofactor": h.poly.to_string(names)}
                for b, h in zip(L.basis, L.cofactors)
            ],
            "stabilization_witness": L.stabilization_witness,
            "dimension_history": [list(x) for x in L.dimension_history],
            "bracket_closed": L.is_closed(),
            "config_echo": cfg.echo(),
        }
    )
    return out


def cmd_saito(f, cfg) -> Dict[str, Any]:
    out = _head(f)
    out["saito_test"] = saito_test(f, cfg.saito_bound).to_dict()
    return out


def cmd_invariance(f, cfg, trials: int) -> Dict[str, Any]:
    rep = invariance_suite(f, cfg, trials=trials, threads=cfg.threads)
    out = _head(f)
    out.update(rep.to_dict())
    out["config_echo"] = cfg.echo()
    return out


def emit(d: Dict[str, Any], fmt: str, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(d, indent=2) + "\n")
    else:
        stream.write(render_text(d) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        f = read_input(args)
        cfg = make_config(args)
        strict = args.command in ("analyze", "normalize", "torus", "invariance")
        # flags are checked against f before any computation starts
        cfg = cfg.resolve(f, strict=strict)
        if args.command == "analyze":
            d = cmd_analyze(f, cfg)
        elif args.command == "normalize":
            d = cmd_normalize(f, cfg)
        elif args.command == "torus":
            d = cmd_torus(f, cfg)
        elif args.command == "logder":
            d = cmd_logder(f, cfg)
        elif args.command == "saito":
            d = cmd_saito(f, cfg)
        else:
            if args.trials < 1:
                raise ValueError("--trials must be positive")
            d = cmd_invariance(f, cfg, args.trials)
    except REFUSED as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except ObstructionError as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        for k, v in sorted(exc.dump.items()):
            print(f"  {k}: {v}", file=sys.stderr)
        return 1
    except MultihomogError as exc:
        print(f"internal error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # bad flag values, e.g. an order below deg f
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return 2
    emit(d, args.format)
    return 0


def main(argv: Optional[List[str]] = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
