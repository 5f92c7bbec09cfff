"""Command-line front end over the library.

Subcommands:

  solve        coefficient table of an isolating equation file
  build        compile an equation file to an automaton (JSON)
  eval         evaluate an automaton at an index or on a digit word
  verify       check an automaton (or a fresh build) against the oracle
  relation     search for an equation annihilating an automaton's sequence
  product      Cauchy product of two automata
  determinize  finite-ring automaton to a DFA with outputs
  defect       run the linearity-defect automaton on a digit word
  growth       growth thresholds of the non-regular example
  export       automaton to DOT or JSON

Automaton arguments accept either a JSON file path or "builtin:<name>";
ring-parameterized builtins also take "builtin:<name>@<ring>", e.g.
builtin:fib-repr@Q.  See BUILTIN_WFA / BUILTIN_DFA.  Exit codes: 0
success or PASS, 1
verification FAIL (or no relation found), 2 usage, parse, or
precondition errors.
"""

from __future__ import annotations

import argparse
import sys

from .automata import (
    addition_automaton,
    addition_automaton_base2,
    addition_automaton_zeckendorf,
    all_ones_automaton,
    count_ones_automaton,
    defect_automaton,
    defect_automaton_constructed,
    fibonacci_representation_automaton,
)
from .equations import (
    EquationError,
    SeriesPrefix,
    build_automaton_dumas,
    build_automaton_q,
    build_automaton_z,
    find_relation,
    format_equation,
    growth_analysis,
    is_isolating,
    parse_equation,
    residual,
    solve_series,
    weight_z,
    z_state_space,
)
from .numeration import (
    ZECKENDORF,
    Base,
    NumerationError,
    canonical,
    format_word,
    parse_word,
)
from .rings import INTEGERS, PrimeField, RingError, parse_ring
from .serialize import (
    automaton_from_json,
    automaton_to_dot,
    automaton_to_json,
    dfa_to_dot,
    dfa_to_json,
)
from .wfa import (
    AutomatonError,
    MissingTransitionError,
    cauchy_product,
    determinize,
    eval_sequence,
    sequence_prefix,
    weight,
)


class CliError(Exception):
    """Bad command-line level input; reported on stderr with exit code 2."""


# Ring-parameterized builtins take an optional ring; the rest ignore the
# suffix and reject it below.
BUILTIN_WFA = {
    "thue-morse": lambda ring: count_ones_automaton(ring or PrimeField(2)),
    "count-ones": lambda ring: count_ones_automaton(ring or INTEGERS),
    "fib-repr": lambda ring: fibonacci_representation_automaton(ring or INTEGERS),
    "all-ones": lambda ring: all_ones_automaton(ring or INTEGERS),
    "addition-base2": None,
    "addition-zeckendorf": None,
}

_BUILTIN_FIXED = {
    "addition-base2": lambda: addition_automaton_base2().automaton,
    "addition-zeckendorf": lambda: addition_automaton_zeckendorf().automaton,
}

BUILTIN_DFA = {
    "defect": defect_automaton,
    "defect-constructed": defect_automaton_constructed,
}


def _load_wfa(spec: str):
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        ring = None
        if "@" in name:
            name, _, ring_spec = name.partition("@")
            ring = parse_ring(ring_spec)
        if name in _BUILTIN_FIXED:
            if ring is not None:
                raise CliError(f"builtin {name!r} does not take a ring suffix")
            return _BUILTIN_FIXED[name]()
        maker = BUILTIN_WFA.get(name)
        if maker is None:
            raise CliError(
                f"unknown builtin automaton {name!r}; available: "
                + ", ".join(sorted(BUILTIN_WFA)))
        return maker(ring)
    with open(spec, "r", encoding="utf-8") as fh:
        return automaton_from_json(fh.read())


def _load_equation(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_equation(fh.read())


def _parse_numeration(text: str):
    if text == "zeckendorf":
        return ZECKENDORF
    if text.startswith("base-"):
        try:
            return Base(int(text[len("base-"):], 10))
        except ValueError:
            raise CliError(f"bad base in numeration {text!r}") from None
    raise CliError(
        f"unknown numeration {text!r}; expected 'zeckendorf' or 'base-<q>'")


def _emit(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _build_from_equation(P):
    if isinstance(P.kind, Base):
        return build_automaton_q(P)
    if P.g_poly:
        return build_automaton_dumas(P)
    return build_automaton_z(P)


def cmd_solve(args) -> int:
    P = _load_equation(args.file)
    if not is_isolating(P):
        raise CliError(
            "equation is not isolating (A_0 != 1), so there is no coefficient "
            "recurrence to unroll; use `mahler verify --automaton ...` to check "
            "a sequence against it instead")
    series = solve_series(P, args.N)
    for n, v in enumerate(series):
        print(f"{n}, {format_word(canonical(n, P.kind).digits)}, {v}")
    return 0


def cmd_build(args) -> int:
    P = _load_equation(args.file)
    A = _build_from_equation(P)
    if not isinstance(P.kind, Base):
        info = z_state_space(P)
        print(f"grid bound {info.grid_bound} states "
              f"(h~ = {info.h_tilde}, window {info.window}); "
              f"built {A.n_states} after trimming", file=sys.stderr)
    else:
        print(f"built {A.n_states} states", file=sys.stderr)
    _emit(automaton_to_json(A) + "\n", args.output)
    return 0


def cmd_eval(args) -> int:
    A = _load_wfa(args.automaton)
    kind = _parse_numeration(args.numeration)
    if args.word is not None:
        w = parse_word(args.word)
        if isinstance(kind, Base):
            v = weight(A, w)
        else:
            v = weight_z(A, w)
    else:
        if args.n < 0:
            raise CliError(f"need n >= 0, got {args.n}")
        v = eval_sequence(A, kind, args.n)
    print(v)
    return 0


def cmd_verify(args) -> int:
    P = _load_equation(args.file)
    N = args.N
    if N < 0:
        raise CliError(f"need N >= 0, got {N}")
    if is_isolating(P):
        A = _load_wfa(args.automaton) if args.automaton else _build_from_equation(P)
        if A.ring != P.ring:
            raise CliError(
                f"automaton ring {A.ring.spec} differs from equation ring {P.ring.spec}")
        oracle = solve_series(P, N)
        got = sequence_prefix(A, P.kind, N)
        for n in range(N + 1):
            if got[n] != oracle[n]:
                print(f"FAIL at n = {n}: oracle {oracle[n]}, automaton {got[n]}")
                return 1
        print(f"PASS: automaton matches the recurrence oracle for all n <= {N}")
        return 0
    if not args.automaton:
        raise CliError(
            "equation is not isolating, so there is no oracle to build from; "
            "pass --automaton to check its sequence against the equation")
    A = _load_wfa(args.automaton)
    if A.ring != P.ring:
        raise CliError(
            f"automaton ring {A.ring.spec} differs from equation ring {P.ring.spec}")
    seq = SeriesPrefix(P.ring, tuple(sequence_prefix(A, P.kind, N)))
    res = residual(P, seq)
    for n, v in enumerate(res):
        if v:
            print(f"FAIL at n = {n}: residual {v}")
            return 1
    print(f"PASS: residual vanishes for all n <= {N}")
    return 0


def cmd_relation(args) -> int:
    A = _load_wfa(args.automaton)
    kind = _parse_numeration(args.numeration)
    eq = find_relation(A, kind, args.dmax, args.hmax, args.N, args.ncheck)
    if eq is None:
        print(f"no relation found with d <= {args.dmax}, h <= {args.hmax}")
        return 1
    sys.stdout.write(format_equation(eq))
    return 0


def cmd_product(args) -> int:
    A = _load_wfa(args.automaton)
    B = _load_wfa(args.other)
    kind = _parse_numeration(args.numeration)
    C = cauchy_product(A, B, addition_automaton(kind))
    _emit(automaton_to_json(C) + "\n", args.output)
    return 0


def cmd_determinize(args) -> int:
    A = _load_wfa(args.automaton)
    D = determinize(A, args.direction)
    _emit(dfa_to_json(D) + "\n", args.output)
    return 0


def cmd_defect(args) -> int:
    w = parse_word(args.input)
    D = defect_automaton()
    print(D.run(w.digits))
    return 0


def cmd_growth(args) -> int:
    rep = growth_analysis(args.N, args.kmax)
    print("f_0..f_5 = " + ", ".join(str(c) for c in rep.prefix))
    for k in sorted(rep.thresholds):
        n = rep.thresholds[k]
        if k == 0:
            print(f"k=0: first n with f_n >= 1: n = {n}")
        elif n is None:
            print(f"k={k}: f_n > n^{k} not reached for n <= {rep.n_max}")
        else:
            print(f"k={k}: first n with f_n > n^{k}: n = {n} "
                  f"(f_n = {rep.coefficients[n]})")
    return 0


def cmd_export(args) -> int:
    spec = args.automaton
    obj = None
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        if name in BUILTIN_DFA:
            obj = BUILTIN_DFA[name]()
    if obj is None:
        obj = _load_wfa(spec)
    is_dfa = not hasattr(obj, "ring")
    if args.format == "json":
        text = (dfa_to_json(obj) if is_dfa else automaton_to_json(obj)) + "\n"
    else:
        text = dfa_to_dot(obj) if is_dfa else automaton_to_dot(obj)
    _emit(text, args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mahler",
        description="Compile Mahler-type functional equations to weighted "
                    "automata over base-q or Zeckendorf numeration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="coefficient table of an isolating equation")
    p.add_argument("-f", "--file", required=True, help="equation file")
    p.add_argument("-N", type=int, default=100, help="truncation order (default 100)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("build", help="compile an equation file to an automaton")
    p.add_argument("-f", "--file", required=True, help="equation file")
    p.add_argument("-o", "--output", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", help="evaluate an automaton")
    p.add_argument("-a", "--automaton", required=True,
                   help="automaton JSON path or builtin:<name>")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("-n", type=int, help="index, evaluated on its canonical expansion")
    grp.add_argument("--word", help="explicit digit word, e.g. '10100' or '1,0,-1'")
    p.add_argument("--numeration", default="zeckendorf",
                   help="zeckendorf (default) or base-<q>")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check an automaton against the equation")
    p.add_argument("-f", "--file", required=True, help="equation file")
    p.add_argument("-N", type=int, default=500, help="check n <= N (default 500)")
    p.add_argument("--automaton", help="automaton JSON path or builtin:<name>; "
                                       "default: build from the equation")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("relation", help="search for an annihilating equation")
    p.add_argument("-a", "--automaton", required=True,
                   help="automaton JSON path or builtin:<name>")
    p.add_argument("--dmax", type=int, required=True, help="largest Phi power")
    p.add_argument("--hmax", type=int, required=True, help="largest coefficient degree")
    p.add_argument("-N", type=int, default=500, help="linear system rows (default 500)")
    p.add_argument("--ncheck", type=int, default=None,
                   help="re-verification order (default 4N)")
    p.add_argument("--numeration", default="zeckendorf",
                   help="zeckendorf (default) or base-<q>")
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("product", help="Cauchy product of two automata")
    p.add_argument("-a", "--automaton", required=True, help="first factor")
    p.add_argument("-b", "--other", required=True, help="second factor")
    p.add_argument("--numeration", default="zeckendorf",
                   help="zeckendorf (default) or base-<q>")
    p.add_argument("-o", "--output", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("determinize", help="finite-ring automaton to output DFA")
    p.add_argument("-a", "--automaton", required=True,
                   help="automaton JSON path or builtin:<name>")
    p.add_argument("--direction", choices=("direct", "reverse"), default="direct")
    p.add_argument("-o", "--output", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_determinize)

    p = sub.add_parser("defect", help="run the linearity-defect automaton")
    p.add_argument("--input", required=True,
                   help="digit word over {-1,0,1}, e.g. '1,0,-1'")
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("growth", help="non-regular example growth thresholds")
    p.add_argument("-N", type=int, default=10000, help="compute f_0..f_N")
    p.add_argument("--kmax", type=int, default=3, help="largest exponent to test")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("export", help="write an automaton as DOT or JSON")
    p.add_argument("-a", "--automaton", required=True,
                   help="automaton JSON path or builtin:<name>")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, EquationError, RingError, AutomatonError,
            NumerationError, MissingTransitionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
