"""Command-line front end.

    securerepair encode  --scheme S.json --message 2 --keys 1
    securerepair repair  --scheme S.json --failed 1 --protocol c2 --seed 7
    securerepair verify  --scheme S.json --protocol c2
    securerepair bounds  --scheme S.json --failed 1,2 --figure bounds.png

Exit codes: 0 ok, 1 verification failure, 2 unreadable input, 3 bad
parameters, 4 unrepairable failure pattern, 5 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analysis import DEFAULT_BUDGET, bounds_csv, bounds_report, verify_protocol
from .errors import (
    BudgetExceeded,
    FieldMismatchError,
    InvalidPlan,
    NoRepairFunction,
    ParameterError,
    UnrepairableError,
)
from .field import RandomSource, uniform_element
from .protocol import KINDS, Network, repair_all_failures
from .schemes import (
    LinearScheme,
    RepairPlan,
    SchemeFile,
    derive_repair_function,
    encode,
    find_repair_plan,
    load_scheme_file,
    scheme_to_dict,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_PARAM, EXIT_UNREPAIRABLE, EXIT_BUDGET = range(6)


class InputError(Exception):
    """Unreadable or malformed input file."""


@dataclass
class RunConfig:
    command: str
    scheme_path: Path
    failed: list[int] | None = None
    helpers: list[int] | None = None
    receivers: list[int] | None = None
    protocol: str | None = None
    seed: int | None = None
    out: Path | None = None
    budget: int = DEFAULT_BUDGET
    reveal_keys: bool = False
    message: list[int] | None = None
    keys: list[int] | None = None
    shares: Path | None = None
    instances: int | None = None
    figure: Path | None = None

    def resolved_seed(self) -> int:
        if self.seed is None:
            self.seed = secrets.randbits(64)
        return self.seed


def _ids(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="securerepair", description="Secure repair of linear secret sharing schemes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scheme", required=True, type=Path, help="scheme JSON file")
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument("--seed", type=_u64, help="RNG seed; drawn from the OS and echoed when absent")

    def repair_opts(p):
        p.add_argument("--protocol", choices=KINDS, help="c2 (default for t=1) or c4, c5 (default for t>1)")
        p.add_argument("--helpers", type=_ids, help="helper set I used for every failed node")
        p.add_argument("--receivers", type=_ids, help="c2 receivers (z+1 nodes)")
        p.add_argument("--instances", type=_positive, help="stored instances (default 1 for c2, n-z otherwise)")

    p = sub.add_parser("encode", help="encode a message into shares")
    common(p)
    p.add_argument("--message", type=_ids, help="message symbols, all instances back to back")
    p.add_argument("--keys", type=_ids, help="key symbols; random from the seed when absent")
    p.add_argument("--instances", type=_positive, default=1)
    p.add_argument("--reveal-keys", action="store_true", help="include the keys in the output")

    p = sub.add_parser("repair", help="fail nodes and repair them")
    common(p)
    repair_opts(p)
    p.add_argument("--failed", type=_ids, help="failed node ids")
    p.add_argument("--shares", type=Path, help="network JSON as written by encode (default: random message)")
    p.add_argument("--message", type=_ids, help="message symbols, all instances back to back")
    p.add_argument("--keys", type=_ids)

    p = sub.add_parser("verify", help="exhaustively verify repairability and security")
    common(p)
    repair_opts(p)
    p.add_argument("--failed", type=_ids, help="failed nodes to check (default: every node)")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="max enumerated outcomes")

    p = sub.add_parser("bounds", help="bandwidth of single-failure runs against the bounds, as CSV")
    common(p)
    repair_opts(p)
    p.add_argument("--failed", type=_ids, help="one run per listed node (default: every node)")
    p.add_argument("--figure", type=Path, help="also render a bar chart to this image file")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        scheme_path=args.scheme,
        failed=getattr(args, "failed", None),
        helpers=getattr(args, "helpers", None),
        receivers=getattr(args, "receivers", None),
        protocol=getattr(args, "protocol", None),
        seed=args.seed,
        out=args.out,
        budget=getattr(args, "budget", DEFAULT_BUDGET),
        reveal_keys=getattr(args, "reveal_keys", False),
        message=getattr(args, "message", None),
        keys=getattr(args, "keys", None),
        shares=getattr(args, "shares", None),
        instances=getattr(args, "instances", None),
        figure=getattr(args, "figure", None),
    )


# -- helpers ----------------------------------------------------------------------


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")


def load_config_scheme(config: RunConfig) -> SchemeFile:
    obj = _read_json(config.scheme_path)
    if not isinstance(obj, dict):
        raise InputError(f"{config.scheme_path}: expected a JSON object")
    return load_scheme_file(obj)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(config: RunConfig, text: str):
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text)


def _protocol(config: RunConfig, scheme: LinearScheme) -> str:
    kind = config.protocol or ("c2" if scheme.t == 1 else "c5")
    if kind in ("c2", "c4") and scheme.t != 1:
        raise ParameterError(f"{kind} handles scalar shares only; this scheme has t={scheme.t}, use c5")
    return kind


def _instances(config: RunConfig, scheme: LinearScheme, kind: str) -> int:
    if config.instances is not None:
        return config.instances
    return 1 if kind == "c2" else scheme.n - scheme.z


def _plan_for(sf: SchemeFile, e: int, unavailable: set[int], helpers: Sequence[int] | None) -> RepairPlan:
    scheme = sf.scheme
    if helpers is not None:
        return derive_repair_function(scheme, e, [i for i in helpers if i != e])
    for plan in sf.plans:
        if plan.e == e and not unavailable.intersection(plan.helpers):
            return plan
    live = [i for i in scheme.nodes if i not in unavailable]
    return find_repair_plan(scheme, e, live)


def _symbols(values: list[int] | None, count: int, what: str, rng, scheme: LinearScheme) -> list[int]:
    if values is None:
        return [uniform_element(rng, scheme.field).value for _ in range(count)]
    if len(values) != count:
        raise ParameterError(f"expected {count} {what} symbols, got {len(values)}")
    return [v % scheme.q for v in values]


def _encode_instances(config: RunConfig, scheme: LinearScheme, instances: int, rng):
    ml, rho = scheme.message_len, scheme.rho
    message = _symbols(config.message, instances * ml, "message", rng, scheme)
    keys = _symbols(config.keys, instances * rho, "key", rng, scheme)
    codewords = []
    for b in range(instances):
        codewords.append(encode(scheme, message[b * ml:(b + 1) * ml], keys[b * rho:(b + 1) * rho]))
    return codewords, message, keys


def _network_from_file(scheme: LinearScheme, path: Path) -> Network:
    obj = _read_json(path)
    try:
        shares = obj["shares"]
        stacks = [[list(map(int, s)) for s in shares[str(i)]] for i in scheme.nodes]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed network file ({exc})")
    counts = {len(s) for s in stacks}
    if len(counts) != 1:
        raise ParameterError("every node must hold the same number of instances")
    f = scheme.field
    codewords = [[f.vector(stack[b]) for stack in stacks] for b in range(counts.pop())]
    return Network.from_shares(scheme, codewords)


# -- commands ---------------------------------------------------------------------


def cmd_encode(config: RunConfig) -> int:
    sf = load_config_scheme(config)
    scheme = sf.scheme
    seed = config.resolved_seed()
    rng = RandomSource(seed)
    codewords, _, keys = _encode_instances(config, scheme, config.instances or 1, rng)
    network = Network.from_shares(scheme, codewords)
    report = {"seed": seed, "scheme": scheme_to_dict(scheme), **network.to_dict()}
    if config.reveal_keys:
        report["keys"] = keys
    _emit(config, _dump(report))
    return EXIT_OK


def _repair_records(config: RunConfig, sf: SchemeFile, failed: list[int], rng):
    scheme = sf.scheme
    kind = _protocol(config, scheme)
    if config.shares is not None:
        network = _network_from_file(scheme, config.shares)
    else:
        codewords, _, _ = _encode_instances(config, scheme, _instances(config, scheme, kind), rng)
        network = Network.from_shares(scheme, codewords)
    network = network.fail(failed)
    plans = {e: _plan_for(sf, e, set(failed), config.helpers) for e in failed}
    subscheme = sf.c2_subscheme if kind == "c2" else None
    network, records = repair_all_failures(
        network, rng, protocol=kind, plans=plans, subscheme=subscheme, receivers=config.receivers
    )
    return kind, network, records


def cmd_repair(config: RunConfig) -> int:
    if not config.failed:
        raise ParameterError("repair needs --failed")
    sf = load_config_scheme(config)
    seed = config.resolved_seed()
    kind, network, records = _repair_records(config, sf, config.failed, RandomSource(seed))
    report = {
        "seed": seed,
        "protocol": kind,
        "scheme": scheme_to_dict(sf.scheme),
        "failed": sorted(config.failed),
        "repairs": [
            {
                "plan": rec.plan.to_dict(),
                "transcript": rec.transcript.to_dict(),
                "bandwidth": rec.bandwidth.to_dict(),
            }
            for rec in records
        ],
        "restored": {
            str(e): [[v.value for v in s] for s in network.stacks[e].shares] for e in sorted(config.failed)
        },
    }
    _emit(config, _dump(report))
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    sf = load_config_scheme(config)
    scheme = sf.scheme
    kind = _protocol(config, scheme)
    failed = config.failed if config.failed is not None else list(scheme.nodes)
    subscheme = sf.c2_subscheme if kind == "c2" else None
    cells, passed = [], True
    for e in failed:
        plan = _plan_for(sf, e, {e}, config.helpers)
        result = verify_protocol(
            scheme,
            kind,
            plan,
            instances=_instances(config, scheme, kind),
            receivers=config.receivers,
            subscheme=subscheme,
            budget=config.budget,
        )
        for cell in result.cells:
            ok = result.repairable and cell.independent
            cells.append({
                "protocol": kind,
                "e": e,
                "A": list(cell.adversary),
                "repairable": result.repairable,
                "independent": cell.independent,
                "outcomes": result.outcomes,
                "decomposition": result.decomposition,
                "pass": ok,
            })
            if not ok:
                passed = False
                print(
                    f"FAIL protocol={kind} e={e} A={list(cell.adversary)} "
                    f"repairable={result.repairable} independent={cell.independent}",
                    file=sys.stderr,
                )
    report = {"protocol": kind, "scheme": scheme_to_dict(scheme), "cells": cells, "pass": passed}
    _emit(config, _dump(report))
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_bounds(config: RunConfig) -> int:
    sf = load_config_scheme(config)
    scheme = sf.scheme
    failed = config.failed if config.failed is not None else list(scheme.nodes)
    seed = config.resolved_seed()
    rng = RandomSource(seed)
    reports = []
    for e in failed:
        kind, _, records = _repair_records(config, sf, [e], rng.spawn("bounds", e))
        rec = records[0]
        reports.append(bounds_report(kind, scheme, rec.plan, rec.bandwidth))
    _emit(config, bounds_csv(reports))
    if config.figure is not None:
        from .plotting import plot_bounds

        plot_bounds(reports, config.figure, title=f"seed {seed}")
    print(f"seed {seed}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"encode": cmd_encode, "repair": cmd_repair, "verify": cmd_verify, "bounds": cmd_bounds}


def run(config: RunConfig) -> int:
    """Run one command and map library errors to exit codes."""
    try:
        return COMMANDS[config.command](config)
    except InputError as exc:
        print(f"securerepair: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(
            f"securerepair: enumeration needs {exc.required} outcomes, budget is {exc.budget}",
            file=sys.stderr,
        )
        return EXIT_BUDGET
    except (UnrepairableError, NoRepairFunction) as exc:
        print(f"securerepair: unrepairable: {exc}", file=sys.stderr)
        return EXIT_UNREPAIRABLE
    except (ParameterError, InvalidPlan, FieldMismatchError, ValueError) as exc:
        print(f"securerepair: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
