"""Command line entry point: ``entcoh <subcommand> [flags]``.

Exit codes: 0 success or pass verdict, 1 fail verdict, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import catalog as cat
from .coherence import coherence_pure, min_coherence_pure, min_relative_coherence, relative_coherence
from .entanglement import (
    eof_2q,
    eof_convex_roof,
    is_ppt,
    relative_entropy_of_entanglement,
    schmidt_decompose,
)
from .entropy import OrthonormalBasis, relative_entropy, von_neumann_entropy
from .io import StateFileError, dumps_state, read_state_file, write_state_file
from .locc import locc_distinguishable
from .optimize import OptimizerConfig
from .qmat import PureState, as_density, bipartition
from .verify import verify_theorem


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return ("inf" if x > 0 else "-inf") if math.isinf(x) else f"{x:.12g}"


def _split(text: str | None, dims) -> tuple[int, ...]:
    if text is None:
        return (0,)
    try:
        parties = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--split expects comma-separated party indices, got {text!r}") from None
    return bipartition(dims, parties)


def _cfg(args, default_restarts: int | None = None) -> OptimizerConfig:
    kw = {"seed": args.seed}
    restarts = args.restarts if args.restarts is not None else default_restarts
    if restarts is not None:
        kw["restarts"] = restarts
    if args.tol is not None:
        kw["tol"] = args.tol
    return OptimizerConfig(**kw)


def _state(args, index: int = 0):
    if not args.state or len(args.state) <= index:
        raise UsageError("missing --state FILE")
    obj = read_state_file(args.state[index])
    if isinstance(obj, OrthonormalBasis):
        raise UsageError(f"{args.state[index]}: expected a pure or density state, found a basis")
    return obj


def _basis(args, dims):
    if args.basis is None:
        return OrthonormalBasis.computational(dims)
    obj = read_state_file(args.basis)
    if not isinstance(obj, OrthonormalBasis):
        raise UsageError(f"{args.basis}: expected a basis file")
    return obj


def cmd_entropy(args) -> int:
    print(_fmt(von_neumann_entropy(as_density(_state(args)))))
    return 0


def cmd_releent(args) -> int:
    if not args.state or len(args.state) != 2:
        raise UsageError("releent needs exactly two --state files (rho then sigma)")
    rho, sigma = as_density(_state(args, 0)), as_density(_state(args, 1))
    print(_fmt(relative_entropy(rho, sigma)))
    return 0


def cmd_schmidt(args) -> int:
    psi = _state(args)
    if not isinstance(psi, PureState):
        raise UsageError("schmidt needs a pure state")
    coeffs = schmidt_decompose(psi, _split(args.split, psi.dims)).coefficients
    print(" ".join(_fmt(c) for c in coeffs))
    return 0


def cmd_ppt(args) -> int:
    rho = as_density(_state(args))
    ppt, lam = is_ppt(rho, _split(args.split, rho.dims))
    print(f"{'PPT' if ppt else 'NPT'} min_eigenvalue {_fmt(lam)}")
    return 0


def cmd_eof(args) -> int:
    rho = as_density(_state(args))
    split = _split(args.split, rho.dims)
    if rho.dims == (2, 2):
        print(_fmt(eof_2q(rho)))
        return 0
    res = eof_convex_roof(rho, split, _cfg(args))
    print(_fmt(res.value))
    if not res.converged:
        print("warning: optimizer did not report convergence", file=sys.stderr)
    return 0


def cmd_ree(args) -> int:
    rho = as_density(_state(args))
    res = relative_entropy_of_entanglement(rho, _split(args.split, rho.dims), _cfg(args))
    print(_fmt(res.value))
    if not res.converged:
        print("warning: optimizer did not report convergence", file=sys.stderr)
    return 0


def cmd_coherence(args) -> int:
    state = _state(args)
    basis = _basis(args, state.dims)
    if isinstance(state, PureState):
        print(_fmt(coherence_pure(state, basis)))
    else:
        print(_fmt(relative_coherence(state, basis)))
    return 0


def cmd_min_coherence(args) -> int:
    state = _state(args)
    split = _split(args.split, state.dims)
    if isinstance(state, PureState):
        res = min_coherence_pure(state, split, _cfg(args))
    else:
        res = min_relative_coherence(state, split, _cfg(args))
    print(_fmt(res.value))
    if not res.converged:
        print("warning: optimizer did not report convergence", file=sys.stderr)
    return 0


def cmd_locc_check(args) -> int:
    if args.basis is None:
        raise UsageError("missing --basis FILE")
    basis = _basis(args, None)
    split = None if args.split is None else _split(args.split, basis.dims)
    res = locc_distinguishable(basis, split)
    print(res.verdict.value)
    reason = res.certificate.get("reason")
    if reason == "catalog":
        print(f"matched known basis: {res.certificate['name']}")
    elif reason is not None:
        print(f"reason: {reason}")
    return 0


def cmd_catalog(args) -> int:
    if args.name is None:
        print("\n".join(cat.catalog_names()))
        return 0
    dims = cat.parse_dims(args.dims[0]) if args.dims else None
    obj = cat.catalog(args.name, p=args.p, dims=dims)
    if args.out:
        write_state_file(args.out, obj)
    else:
        sys.stdout.write(dumps_state(obj))
    return 0


def cmd_verify(args) -> int:
    if args.theorem is None:
        raise UsageError("missing --theorem N")
    dims = [cat.parse_dims(d) for d in args.dims] if args.dims else None
    report = verify_theorem(args.theorem, args.trials, dims, args.seed, _cfg(args, default_restarts=8))
    if args.out:
        Path(args.out).write_text(report.to_json())
    print(report.summary())
    return 0 if report.verdict == "pass" else 1


COMMANDS = {
    "entropy": (cmd_entropy, "von Neumann entropy (bits) of a state"),
    "releent": (cmd_releent, "relative entropy S(rho||sigma) from two --state files"),
    "schmidt": (cmd_schmidt, "Schmidt coefficients of a pure state across --split"),
    "ppt": (cmd_ppt, "partial-transpose test across --split"),
    "eof": (cmd_eof, "entanglement of formation (closed form for two qubits, convex roof otherwise)"),
    "ree": (cmd_ree, "relative entropy of entanglement"),
    "coherence": (cmd_coherence, "coherence in --basis (computational if omitted)"),
    "min-coherence": (cmd_min_coherence, "minimum coherence over conditional product bases across --split"),
    "locc-check": (cmd_locc_check, "decide local distinguishability of a product basis"),
    "catalog": (cmd_catalog, "emit a named state or basis as a state file"),
    "verify": (cmd_verify, "run a theorem verification suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", action="append", metavar="FILE")
    common.add_argument("--basis", metavar="FILE")
    common.add_argument("--dims", action="append", metavar="AxB[xC...]")
    common.add_argument("--split", metavar="I[,J...]", help="parties on side A of the cut (default 0)")
    common.add_argument("--theorem", type=int, metavar="N")
    common.add_argument("--trials", type=int, default=10, metavar="N")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--restarts", type=int, metavar="N")
    common.add_argument("--tol", type=float, metavar="X")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--p", type=float, metavar="X", help="mixing parameter for rho2")

    parser = argparse.ArgumentParser(prog="entcoh", description="Entanglement and coherence numerics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "catalog":
            p.add_argument("name", nargs="?", help="e.g. bell_psi+, rho2, ghz(3), domino_basis")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command][0](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"entcoh {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (StateFileError, ValueError) as exc:
        print(f"entcoh {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
