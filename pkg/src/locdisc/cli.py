"""``locdisc`` command line.

Exit status: 0 when every claim passes, 2 when any claim fails, 1 on a
configuration error.  ``--config FILE`` supplies a JSON object of
ScenarioConfig fields; explicit flags override it.  ``LOCDISC_OUT`` sets the
default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import scenarios
from .scenarios import ConfigError, ScenarioConfig

OUT_ENV = "LOCDISC_OUT"
DEFAULT_OUT = "results"

EXIT_OK, EXIT_CONFIG, EXIT_CLAIM = 0, 1, 2

_EXAMPLE_IDS = {"4.1": "ex41", "4.2": "ex42", "4.3": "ex43", "4.4": "ex44"}


def _example_id(text: str) -> str:
    key = text.strip().lower()
    if key in _EXAMPLE_IDS:
        return _EXAMPLE_IDS[key]
    if key in _EXAMPLE_IDS.values():
        return key
    if key.isdigit() and "ex" + key in _EXAMPLE_IDS.values():
        return "ex" + key
    raise argparse.ArgumentTypeError(f"unknown example {text!r}; choose from {', '.join(_EXAMPLE_IDS)}")


def _sizes(text: str) -> tuple:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="locdisc", description="Localized discrepancy computations and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file of configuration fields (flags win)")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--quiet", action="store_true", help="print only the summary line")

    ex = sub.add_parser("example", help="worked geometries")
    ex.add_argument("--id", required=True, type=_example_id, dest="scenario", help="4.1, 4.2, 4.3 or 4.4")
    ex.add_argument("--epsilon", type=float)
    ex.add_argument("--r", type=float)
    ex.add_argument("--rs", type=_floats, help="comma-separated radii")
    ex.add_argument("--resolution", type=float)
    common(ex)

    su = sub.add_parser("suite", help="containment, chain and bound-validity suites")
    su.add_argument("--name", required=True, choices=("lemma52", "prop54", "bounds"), dest="scenario")
    su.add_argument("--n", type=int)
    su.add_argument("--m", type=int)
    su.add_argument("--d", type=int)
    su.add_argument("--delta", type=float)
    su.add_argument("--r", type=float)
    su.add_argument("--gammas", type=_floats)
    su.add_argument("--trials", type=int)
    su.add_argument("--resolution", type=float)
    su.add_argument("--no-planar", dest="include_planar", action="store_const", const=False)
    common(su)

    sw = sub.add_parser("sweep", help="sample-size sweep on the narrow-source geometry")
    sw.add_argument("--sizes", type=_sizes)
    sw.add_argument("--r", type=float)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--delta", type=float)
    sw.add_argument("--d", type=int)
    common(sw)

    oc = sub.add_parser("oracle-compare", help="engine against the dense-grid oracle")
    oc.add_argument("--configs", type=int)
    oc.add_argument("--resolution", type=float, dest="oracle_resolution", help="oracle grid resolution")
    oc.add_argument("--engine-resolution", type=float, dest="resolution")
    oc.add_argument("--no-planar", dest="include_planar", action="store_const", const=False)
    common(oc)
    return p


_NOT_CONFIG = {"command", "config", "quiet"}


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    """File values first, then every flag that was given."""
    fields = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {args.config} must hold a JSON object")
        fields.update(loaded)
    for key, value in vars(args).items():
        if key not in _NOT_CONFIG and value is not None:
            fields[key] = value
    if args.command == "oracle-compare":
        fields["scenario"] = "oracle-compare"
    elif args.command == "sweep":
        fields["scenario"] = "sweep"
    if not fields.get("out"):
        fields["out"] = os.environ.get(OUT_ENV) or DEFAULT_OUT
    return ScenarioConfig.from_dict(fields)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        t0 = time.perf_counter()
        record = scenarios.run(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"locdisc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    elapsed = time.perf_counter() - t0
    try:
        path = scenarios.write_results(record, cfg.out)
    except OSError as exc:
        print(f"locdisc: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        for c in record.claims:
            print(f"{c.status.upper():<21} [{c.cites}] {c.description}: observed {c.observed} (expected {c.expected}; {c.provenance})")
    failed = sum(c.status == "fail" for c in record.claims)
    print(f"{record.scenario}: {len(record.claims) - failed}/{len(record.claims)} claims without failure "
          f"in {elapsed:.1f}s -> {path}")
    return EXIT_OK if record.passed else EXIT_CLAIM


if __name__ == "__main__":
    sys.exit(main())
