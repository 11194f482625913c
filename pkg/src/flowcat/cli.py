"""Command line interface.

Exit codes: 0 success (or the check holds), 1 a check failed, 2 usage or
parse error, 3 a saturation or search budget was exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import (
    BudgetExceeded,
    Flow,
    enumerate_morphisms,
    find_isomorphism,
    validate,
)
from .diagram import (
    DEFAULT_COLIMIT_BUDGET,
    Overflow,
    canonical_decomposition,
    colimit,
    counterexample_cartesian,
    pushout,
)
from .hom import check_adjunction, hom_direct, hom_globe, hom_via_decomposition
from .monoidal import cartesian_product, tensor
from .pushout_product import check_glob_identity
from .textio import (
    FlowSemanticError,
    FlowSyntaxError,
    parse_flow,
    parse_morphism,
    render_id,
    serialize_flow,
    serialize_morphism,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def _read_flow(path: str, check: bool = True) -> Flow:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_flow(text, check=check)
    except (FlowSyntaxError, FlowSemanticError) as exc:
        raise _Usage(f"{path}: {exc}") from None


def _read_morphism(path: str, source: Flow, target: Flow):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_morphism(text, source, target)
    except (FlowSyntaxError, FlowSemanticError) as exc:
        raise _Usage(f"{path}: {exc}") from None


def _summary(F: Flow) -> str:
    return f"{len(F.states)} states, {len(F.paths)} paths"


def _cmd_validate(args, out):
    F = _read_flow(args.flow, check=False)
    problems = validate(F)
    if problems:
        for p in problems:
            print(p, file=out)
        print(f"invalid: {len(problems)} violation(s)", file=out)
        return EXIT_FAILED
    print(f"valid: {_summary(F)}", file=out)
    return EXIT_OK


def _print_flow(title: str, F: Flow, out):
    print(f"# {title}: {_summary(F)}", file=out)
    out.write(serialize_flow(F))


def _cmd_tensor(args, out):
    _print_flow("tensor", tensor(_read_flow(args.left), _read_flow(args.right)), out)
    return EXIT_OK


def _cmd_product(args, out):
    _print_flow("product", cartesian_product(_read_flow(args.left), _read_flow(args.right)), out)
    return EXIT_OK


def _cmd_pushout(args, out):
    left, apex, right = (_read_flow(p) for p in (args.left, args.apex, args.right))
    f = _read_morphism(args.f, apex, left)
    g = _read_morphism(args.g, apex, right)
    try:
        P, _ = pushout(f, g, budget=args.budget)
    except Overflow as exc:
        print(f"overflow: more than {exc.budget} paths", file=out)
        if exc.cycle:
            print("cycle: " + " -> ".join(render_id(c) for c in exc.cycle), file=out)
        return EXIT_BUDGET
    _print_flow("pushout", P, out)
    return EXIT_OK


def _globe_labels(Y: Flow):
    """The generator set if ``Y`` is a globe, else ``None``."""
    if len(Y.states) != 2 or Y.comp:
        return None
    ends = {(Y.src[p], Y.tgt[p]) for p in Y.paths}
    if len(ends) > 1 or any(a == b for a, b in ends):
        return None
    return Y.sorted_paths


def _cmd_hom(args, out):
    Y, Z = _read_flow(args.domain), _read_flow(args.codomain)
    if args.route == "direct":
        H = hom_direct(Y, Z)
    elif args.route == "decomp":
        H = hom_via_decomposition(Y, Z)
    else:
        labels = _globe_labels(Y)
        if labels is None:
            raise _Usage("--route globe needs a globe as domain")
        H = hom_globe(labels, Z)
    _print_flow(f"hom ({args.route})", H, out)
    return EXIT_OK


def _cmd_adjoint_check(args, out):
    X, Y, Z = (_read_flow(p) for p in (args.x, args.y, args.z))
    r = check_adjunction(X, Y, Z)
    counts = f"lhs=rhs={r.lhs_count}" if r.lhs_count == r.rhs_count else f"lhs={r.lhs_count}, rhs={r.rhs_count}"
    print(
        f"{counts}, bijection {'ok' if r.bijection_ok else 'failed'}, "
        f"naturality {'ok' if r.natural_ok else 'failed'} ({r.naturality_checked} squares)",
        file=out,
    )
    return EXIT_OK if r.holds else EXIT_FAILED


def _cmd_decompose(args, out):
    X = _read_flow(args.flow)
    D = canonical_decomposition(X)
    kinds = {"point": 0, "globe": 0, "concat": 0}
    for n in D.nodes:
        kinds[n[0]] += 1
    print(
        f"nodes: {kinds['point']} points, {kinds['globe']} globes, {kinds['concat']} concatenations; "
        f"edges: {len(D.edges)}",
        file=out,
    )
    L, _ = colimit(D)
    iso = find_isomorphism(L, X)
    print(f"reconstruction: {_summary(L)}, isomorphic: {'yes' if iso else 'no'}", file=out)
    if iso is not None:
        out.write(serialize_morphism(iso))
    return EXIT_OK if iso is not None else EXIT_FAILED


def _cmd_counterexample(args, out):
    r = counterexample_cartesian()
    print(
        f"colimit-of-products paths: {r.lhs_paths}, product-of-colimit paths: {r.rhs_paths}, "
        f"isomorphic: {'yes' if r.isomorphic else 'no'}",
        file=out,
    )
    t = counterexample_cartesian("tensor")
    print(
        f"with tensor: colimit-of-products paths: {t.lhs_paths}, product-of-colimit paths: {t.rhs_paths}, "
        f"isomorphic: {'yes' if t.isomorphic else 'no'}",
        file=out,
    )
    ok = (r.lhs_paths, r.rhs_paths, r.isomorphic) == (2, 3, False) and t.isomorphic
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_pushout_product(args, out):
    if not 0 <= args.a <= args.b:
        raise _Usage("need 0 <= |A| <= |B|")
    B = [f"b{i}" for i in range(args.b)]
    r = check_glob_identity(B[: args.a], B)
    print(f"corner: {_summary(r.corner)}", file=out)
    print(f"expected: globe on {len(r.expected.paths)} generators", file=out)
    print(f"isomorphic: {'yes' if r.iso_found else 'no'}", file=out)
    return EXIT_OK if r.iso_found else EXIT_FAILED


def _cmd_morphisms(args, out):
    F, G = _read_flow(args.source), _read_flow(args.target)
    ms = enumerate_morphisms(F, G)
    print(f"{len(ms)} morphism(s)", file=out)
    for i, m in enumerate(ms):
        print(f"# morphism {i}", file=out)
        out.write(serialize_morphism(m))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flowcat", description="Finite flows: products, colimits and the internal hom.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the flow axioms")
    p.add_argument("flow")
    p.set_defaults(run=_cmd_validate)

    for name, fn, text in (("tensor", _cmd_tensor, "tensor product"), ("product", _cmd_product, "cartesian product")):
        p = sub.add_parser(name, help=text)
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(run=fn)

    p = sub.add_parser("pushout", help="pushout of LEFT <-f- APEX -g-> RIGHT")
    p.add_argument("left")
    p.add_argument("apex")
    p.add_argument("right")
    p.add_argument("f", help="morphism file APEX -> LEFT")
    p.add_argument("g", help="morphism file APEX -> RIGHT")
    p.add_argument("--budget", type=int, default=DEFAULT_COLIMIT_BUDGET)
    p.set_defaults(run=_cmd_pushout)

    p = sub.add_parser("hom", help="internal hom hom(Y, Z)")
    p.add_argument("domain")
    p.add_argument("codomain")
    p.add_argument("--route", choices=("direct", "globe", "decomp"), default="direct")
    p.set_defaults(run=_cmd_hom)

    p = sub.add_parser("adjoint-check", help="verify Flow(X (x) Y, Z) = Flow(X, hom(Y, Z))")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("z")
    p.set_defaults(run=_cmd_adjoint_check)

    p = sub.add_parser("decompose", help="points-and-globes decomposition and its colimit")
    p.add_argument("flow")
    p.set_defaults(run=_cmd_decompose)

    p = sub.add_parser("counterexample", help="the cartesian product does not commute with colimits")
    p.set_defaults(run=_cmd_counterexample)

    p = sub.add_parser("pushout-product", help="corner of {0,1}->{0} [] Glob(A)->Glob(B)")
    p.add_argument("a", type=int, help="|A|")
    p.add_argument("b", type=int, help="|B|")
    p.set_defaults(run=_cmd_pushout_product)

    p = sub.add_parser("morphisms", help="list all morphisms F -> G")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(run=_cmd_morphisms)
    return parser


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except _Usage as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    except (Overflow, BudgetExceeded) as exc:
        print(f"budget exhausted: {exc}", file=err)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
