"""Command-line interface.

One subcommand per library operation; machine files flow through positional
arguments with ``-`` meaning standard input/output, so commands compose in
pipelines.  Exit codes: 0 success (or true), 1 negative result (invalid,
not isomorphic, axiom failure), 2 usage error, 3 data or validation error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import axioms as ax
from . import examples, fileio, minimize, mixed_state, reconstruct, simulate, sofic
from .errors import EmtoolError
from .isomorphism import are_isomorphic
from .machine import Alphabet, validate as validate_machine

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_machine(path: str):
    machine, warnings, *_ = fileio.parse_machine(_read_text(path))
    for w in warnings:
        print(f"warning: {path}: {w}", file=sys.stderr)
    return machine


def _load_sample(path: str, alphabet_arg: str | None):
    """Sample file: whitespace-separated symbol names.  The alphabet is
    either given explicitly or inferred as the sorted set of tokens."""
    tokens = _read_text(path).split()
    if not tokens:
        raise EmtoolError(f"sample file {path} is empty")
    if alphabet_arg:
        alphabet = Alphabet(tuple(alphabet_arg.split(",")))
    else:
        alphabet = Alphabet(tuple(sorted(set(tokens))))
    index = {s: i for i, s in enumerate(alphabet.symbols)}
    try:
        symbols = np.array([index[t] for t in tokens], dtype=np.int64)
    except KeyError as exc:
        raise EmtoolError(f"sample token {exc.args[0]!r} not in alphabet {alphabet.symbols}")
    return symbols, alphabet


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def cmd_validate(args) -> int:
    machine = _load_machine(args.machine)
    report = validate_machine(machine, tolerance=args.tol)
    if report.ok:
        print(f"OK: {machine.n_states} states, alphabet {' '.join(machine.alphabet.symbols)}")
        return EXIT_OK
    for v in report.violations:
        print(f"violation: {v}")
    return EXIT_NEGATIVE


def cmd_axioms(args) -> int:
    machine = _load_machine(args.machine)
    report = ax.is_generator_em(machine, tolerance=args.tol)

    def flag(v):
        return {True: "pass", False: "FAIL", None: "n/a (requires unifilarity)"}[v]

    print(f"{'irreducible':<28}{flag(report.irreducible)}")
    print(f"{'unifilar':<28}{flag(report.unifilar)}")
    print(f"{'distinct states':<28}{flag(report.probabilistically_distinct)}")
    print(f"{'generator epsilon-machine':<28}{'yes' if report.is_generator_em else 'no'}")
    for key, value in report.witness.items():
        print(f"  witness {key}: {value}")
    if report.is_generator_em:
        sync = ax.find_sync_word(machine)
        if sync is None:
            print("synchronizing word: none found (nonexact)")
        else:
            print(f"synchronizing word: {machine.alphabet.format_word(sync) or '(empty)'}")
    return EXIT_OK if report.is_generator_em else EXIT_NEGATIVE


def cmd_minimize(args) -> int:
    machine = _load_machine(args.machine)
    result = minimize.minimize_unifilar(machine, tolerance=args.tol)
    _write_text(args.out, fileio.serialize_machine(result.target))
    map_lines = "".join(f"{i} -> {b}\n" for i, b in enumerate(result.class_of))
    if args.out == "-":
        sys.stderr.write(map_lines)
    else:
        _write_text(args.out + ".map", map_lines)
    return EXIT_OK


def cmd_isomorphic(args) -> int:
    a = _load_machine(args.a)
    b = _load_machine(args.b)
    iso = are_isomorphic(a, b, tolerance=args.tol)
    if iso is None:
        print("NOT ISOMORPHIC")
        return EXIT_NEGATIVE
    for i, j in enumerate(iso.mapping):
        print(f"{i} -> {j}")
    return EXIT_OK


def cmd_sample(args) -> int:
    machine = _load_machine(args.machine)
    start = args.start
    if start != "stationary":
        try:
            start = int(start)
        except ValueError:
            start = [float(v) for v in start.split(",")]
    run = simulate.sample_path(machine, start, args.len, args.seed, chain=args.chain)
    lines = "".join(machine.alphabet.symbols[x] + "\n" for x in run.symbols)
    _write_text(args.out, lines)
    return EXIT_OK


def cmd_words(args) -> int:
    symbols, alphabet = _load_sample(args.sample, args.alphabet)
    table = simulate.empirical_word_probs(symbols, args.max_len, len(alphabet))
    out = ["word,count,freq"]
    for word in sorted(table.counts, key=lambda w: (len(w), w)):
        out.append(f"{alphabet.format_word(word)},{table.counts[word]},{_fmt(table.freq(word))}")
    _write_text(args.out, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_belief(args) -> int:
    machine = _load_machine(args.machine)
    word = machine.alphabet.parse_word(args.word)
    phi = mixed_state.belief_of_word(machine, word)
    sq = mixed_state.sync_quantities(phi)
    print("state,probability")
    for i, p in enumerate(phi):
        print(f"{i},{_fmt(p)}")
    print(f"best_state,{sq.best_state}")
    print(f"p_best,{_fmt(sq.p_best)}")
    print(f"doubt,{_fmt(sq.doubt)}")
    return EXIT_OK


def cmd_sync_profile(args) -> int:
    machine = _load_machine(args.machine)
    est = mixed_state.estimate_decay(
        machine, horizon=args.horizon, n_chains=args.chains, seed=args.seed, alpha=args.alpha
    )
    out = ["t,mean_Q,frac_exceed,frac_unsynced"]
    for t in range(args.horizon):
        out.append(
            f"{t + 1},{_fmt(est.mean_doubt[t])},{_fmt(est.frac_exceed[t])},"
            f"{_fmt(est.frac_unsynced[t])}"
        )
    out.append(f"# decay_rate {_fmt(est.decay_rate)} alpha_hat {_fmt(est.alpha_hat)}")
    _write_text(args.out, "\n".join(out) + "\n")
    return EXIT_OK


def _print_recon_report(result) -> None:
    err = sys.stderr
    print(f"provenance: {result.provenance}", file=err)
    print(f"states: {result.machine.n_states}", file=err)
    print("mu: " + " ".join(_fmt(v) for v in result.class_probability), file=err)
    diag = result.diagnostics
    if result.provenance.startswith("analytic"):
        print(
            f"belief classes: {diag['n_classes']} ({diag['n_transient']} transient)",
            file=err,
        )
        words = [result.machine.alphabet.format_word(w) or "(empty)" for w in diag["state_words"]]
        print("state words: " + " ".join(words), file=err)
    else:
        print(f"contexts kept: {diag['n_contexts']} ({diag['dropped']} dropped as mixtures)", file=err)
        sizes = [len(m) for m in diag["state_contexts"]]
        print(f"cluster sizes: {sizes}", file=err)
        for line in diag["inconsistent_transitions"]:
            print(f"inconsistent: {line}", file=err)
        for line in diag["warnings"]:
            print(f"warning: {line}", file=err)


def cmd_reconstruct(args) -> int:
    if args.mode == "analytic":
        machine = _load_machine(args.source)
        result = reconstruct.reconstruct_analytic(
            machine, depth=args.depth, l_fut=args.lfut, tol=args.tol, cap=args.cap
        )
    else:
        symbols, alphabet = _load_sample(args.source, args.alphabet)
        result = reconstruct.reconstruct_empirical(
            symbols,
            len(alphabet),
            l_ctx=args.lctx,
            l_fut=args.lfut,
            significance=args.sig,
            min_count=args.min_count,
            pool_tol=args.pool_tol,
            alphabet=alphabet,
        )
    _write_text(args.out, fileio.serialize_machine(result.machine))
    _print_recon_report(result)
    return EXIT_OK


def _graph_file(graph: sofic.LabeledGraph, start: int | None = None) -> str:
    lines = [f"states {graph.n_vertices}", "alphabet " + " ".join(graph.alphabet.symbols)]
    if start is not None:
        lines.append(f"start {start}")
    for i, x, j in sorted(graph.edges):
        lines.append(f"edge {i} {graph.alphabet.symbols[x]} 1 {j}")
    return "\n".join(lines) + "\n"


def cmd_topology(args) -> int:
    machine = _load_machine(args.machine)
    graph = sofic.trim_essential(sofic.strip_probabilities(machine))
    dfa = sofic.minimal_dfa(graph)
    if args.emit == "dfa":
        text = _graph_file(sofic._dfa_graph(dfa), start=dfa.start)
    elif args.emit == "fischer":
        text = _graph_file(sofic.fischer_cover(dfa))
    else:
        text = _graph_file(sofic.krieger_states(dfa).graph)
    _write_text(args.out, text)
    return EXIT_OK


def cmd_example(args) -> int:
    machine = examples.build(args.name, args.params)
    _write_text(args.out, fileio.serialize_machine(machine))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emtool",
        description="Edge-emitting hidden Markov machines: axioms, minimization,"
        " sampling, belief tracking, reconstruction, and shift topology.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check stochasticity of a machine file")
    p.add_argument("machine")
    p.add_argument("--tol", type=float, default=1e-9, help="row-sum tolerance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("axioms", help="evaluate the three generator axioms")
    p.add_argument("machine")
    p.add_argument("--tol", type=float, default=1e-9, help="distinctness tolerance")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("minimize", help="merge probabilistically equivalent states")
    p.add_argument("machine")
    p.add_argument("out", help="output machine file ('-' = stdout, map to stderr)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("isomorphic", help="test two machines for isomorphism")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_isomorphic)

    p = sub.add_parser("sample", help="sample a symbol path")
    p.add_argument("machine")
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--chain", type=int, default=0, help="substream index")
    p.add_argument(
        "--start",
        default="stationary",
        help="'stationary', a state index, or a comma-separated distribution",
    )
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("words", help="empirical word counts of a sample (CSV)")
    p.add_argument("sample")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--alphabet", help="comma-separated symbol names, in order")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("belief", help="observer belief after a word")
    p.add_argument("machine")
    p.add_argument("word", help="symbol string ('' = stationary prior)")
    p.set_defaults(func=cmd_belief)

    p = sub.add_parser("sync-profile", help="Monte Carlo doubt-decay profile (CSV)")
    p.add_argument("machine")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--chains", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sync_profile)

    p = sub.add_parser("reconstruct", help="build the history machine")
    rsub = p.add_subparsers(dest="mode", required=True)
    pa = rsub.add_parser("analytic", help="from a machine, via belief closure")
    pa.add_argument("source", metavar="machine")
    pa.add_argument("--depth", type=int, default=None)
    pa.add_argument("--lfut", type=int, default=None)
    pa.add_argument("--tol", type=float, default=1e-9)
    pa.add_argument("--cap", type=int, default=4096)
    pa.add_argument("--out", default="-")
    pa.set_defaults(func=cmd_reconstruct, mode="analytic")
    pe = rsub.add_parser("empirical", help="from a sample file")
    pe.add_argument("source", metavar="sample")
    pe.add_argument("--lctx", type=int, default=8)
    pe.add_argument("--lfut", type=int, default=4)
    pe.add_argument("--min-count", type=int, default=1000)
    pe.add_argument("--sig", type=float, default=0.05)
    pe.add_argument("--pool-tol", type=float, default=0.01)
    pe.add_argument("--alphabet", help="comma-separated symbol names, in order")
    pe.add_argument("--out", default="-")
    pe.set_defaults(func=cmd_reconstruct, mode="empirical")

    p = sub.add_parser("topology", help="probability-free shift presentations")
    p.add_argument("machine")
    p.add_argument("--emit", choices=["dfa", "fischer", "krieger"], default="dfa")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_topology)

    p = sub.add_parser("example", help="emit a built-in example machine")
    p.add_argument("name", choices=sorted(examples.REGISTRY))
    p.add_argument("params", nargs="*", help="parameters in (0,1)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EmtoolError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
