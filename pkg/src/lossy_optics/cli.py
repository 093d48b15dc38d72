"""Command-line front end.

Exit codes: 0 success, 1 input/config error, 2 gain (norm > 1) on dilation,
3 verification breach.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .circuit import (MAX_DECOMPOSE_SIZE, NetlistError, compile_netlist, decompose, parse,
                      serialize)
from .dilation import LOSS_CONVENTIONS, GainError, LossyTransform, dilate
from .experiment import (OBSERVABLES, CountsModel, ScanConfig, default_tau_grid, run_scan,
                         scan_visibilities, synthesize_counts, write_scan_csv)
from .matrix_io import MatrixFormatError, dumps_json, load_matrix
from .quantum import PhotonPairSource

SEED_ENV = "LOSSY_OPTICS_SEED"

EXIT_OK, EXIT_INPUT, EXIT_GAIN, EXIT_VERIFY = 0, 1, 2, 3

FIGURE_PRESETS = {
    # fig2 is the model surface of an ideal source (unit visibility at zero loss).
    "fig2": dict(observable="P12", losses=np.linspace(0.0, 1.0, 41).tolist(), xi=1.0),
    "fig3": dict(observable="P12", losses=[0.07, 0.26, 0.96], xi=0.87),
    "fig4": dict(observable="P13", losses=[0.0, 0.26, 0.96], xi=0.87),
}


class ConfigError(ValueError):
    pass


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def resolve_seed(seed: Optional[int]) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}: not an integer: {env!r}") from None
    return 0 if seed is None else seed


def write_manifest(primary: Path, command: str, config: dict, outputs: list[Path],
                   seeds: Optional[dict] = None) -> Path:
    path = primary.with_name(primary.name + ".manifest.json")
    manifest = {
        "command": command,
        "config": config,
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "seeds": seeds or {},
        "argv": sys.argv[1:],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- argument parsing helpers -------------------------------------------------

_GRID = re.compile(r"^\s*grid\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)\s*$")


def parse_float_list(text: str, what: str = "value") -> list[float]:
    """``"0.1,0.2"`` or ``"grid(start,stop,num)"``."""
    m = _GRID.match(text)
    try:
        if m:
            return np.linspace(float(m.group(1)), float(m.group(2)), int(m.group(3))).tolist()
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{what}: cannot parse {text!r}") from None


def _number(data: dict, key: str, path: str, default=None, kind=float):
    if key not in data:
        if default is None:
            raise ConfigError(f"{path}{key}: required")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}{key}: expected a number, got {value!r}")
    if kind is int and value != int(value):
        raise ConfigError(f"{path}{key}: expected an integer, got {value!r}")
    return kind(value)


def _float_list(data, path: str) -> list[float]:
    if isinstance(data, dict):
        start = _number(data, "start", path + ".")
        stop = _number(data, "stop", path + ".")
        num = _number(data, "num", path + ".", kind=int)
        return np.linspace(start, stop, num).tolist()
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected an array")
    out = []
    for k, x in enumerate(data):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"{path}[{k}]: expected a number, got {x!r}")
        out.append(float(x))
    return out


def scan_config_from_dict(data: dict) -> ScanConfig:
    """Build a ScanConfig from its JSON mirror, reporting errors by field path."""
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    known = {"losses", "tau_grid", "loss_convention", "observable", "source"}
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown field")
    src = data.get("source", {})
    if not isinstance(src, dict):
        raise ConfigError("source: expected an object")
    for key in src:
        if key not in {"port_a", "port_b", "coherence_time", "visibility"}:
            raise ConfigError(f"source.{key}: unknown field")
    try:
        source = PhotonPairSource(
            port_a=_number(src, "port_a", "source.", 1, int),
            port_b=_number(src, "port_b", "source.", 2, int),
            coherence_time=_number(src, "coherence_time", "source.", 1.0),
            visibility=_number(src, "visibility", "source.", 1.0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"source: {exc}") from None
    if "losses" not in data:
        raise ConfigError("losses: required")
    losses = _float_list(data["losses"], "losses")
    tau_grid = _float_list(data["tau_grid"], "tau_grid") if "tau_grid" in data else default_tau_grid()
    convention = data.get("loss_convention", "amplitude")
    observable = data.get("observable", "P12")
    try:
        return ScanConfig(losses=losses, tau_grid=tau_grid, loss_convention=convention,
                          source=source, observable=observable)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- commands -----------------------------------------------------------------

def cmd_dilate(args) -> int:
    src = Path(args.input)
    try:
        t = load_matrix(src)
    except (OSError, MatrixFormatError, ValueError) as exc:
        return _fail(f"{src}: {exc}", EXIT_INPUT)
    if t.shape[0] != t.shape[1]:
        return _fail(f"{src}: matrix must be square, got {t.shape}", EXIT_INPUT)
    try:
        d = dilate(LossyTransform.from_matrix(t))
    except GainError as exc:
        return _fail(f"gain: {exc}", EXIT_GAIN)

    out = Path(args.out) if args.out else src.with_name(src.stem + ".dilated.json")
    payload = d.to_dict()
    payload["n_ancilla"] = d.n_ancilla
    _write_text(out, json.dumps(payload) + "\n")
    outputs = [out]
    size = d.matrix.shape[0]
    if 2 <= size <= MAX_DECOMPOSE_SIZE:
        nl_path = Path(args.netlist) if args.netlist else out.with_suffix(".netlist")
        _write_text(nl_path, serialize(decompose(d.matrix)))
        outputs.append(nl_path)
    write_manifest(out, "dilate", {"input": str(src)}, outputs)

    print(f"k={d.n_ancilla}")
    for port, theta in zip(d.ancilla_ports, d.thetas):
        print(f"theta[{port}]={theta:.17g}")
    for p in outputs:
        print(f"wrote {p}")
    return EXIT_OK


def _read_netlist(path: str):
    try:
        return parse(Path(path).read_text(encoding="utf-8")), None
    except (OSError, NetlistError) as exc:
        return None, _fail(f"{path}: {exc}", EXIT_INPUT)


def cmd_compile(args) -> int:
    nl, err = _read_netlist(args.netlist)
    if err is not None:
        return err
    text = dumps_json(compile_netlist(nl)) + "\n"
    if args.out:
        out = Path(args.out)
        _write_text(out, text)
        write_manifest(out, "compile", {"netlist": args.netlist}, [out])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_decompose(args) -> int:
    try:
        u = load_matrix(args.input)
        text = serialize(decompose(u))
    except (OSError, MatrixFormatError, NetlistError, ValueError) as exc:
        return _fail(f"{args.input}: {exc}", EXIT_INPUT)
    if args.out:
        out = Path(args.out)
        _write_text(out, text)
        write_manifest(out, "decompose", {"input": args.input}, [out])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_parse_check(args) -> int:
    nl, err = _read_netlist(args.netlist)
    if err is not None:
        return err
    sys.stdout.write(serialize(nl))
    return EXIT_OK


def _build_scan_config(args) -> ScanConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
    src = data.get("source", {})
    if not isinstance(src, dict):
        raise ConfigError("source: expected an object")
    src = dict(src)
    if args.losses is not None:
        data["losses"] = parse_float_list(args.losses, "--losses")
    if args.tau_grid is not None:
        data["tau_grid"] = parse_float_list(args.tau_grid, "--tau-grid")
    if args.observable is not None:
        data["observable"] = args.observable
    if args.convention is not None:
        data["loss_convention"] = args.convention
    if args.xi is not None:
        src["visibility"] = args.xi
    if args.coherence_time is not None:
        src["coherence_time"] = args.coherence_time
    data["source"] = src
    return scan_config_from_dict(data)


def _emit_scan(cfg: ScanConfig, args, command: str, out: Optional[Path]) -> int:
    try:
        result = run_scan(cfg, verify=args.verify)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except AssertionError as exc:
        return _fail(f"oracle check failed: {exc}", EXIT_VERIFY)

    counts = seed = None
    if args.counts:
        seed = resolve_seed(args.seed)
        model = CountsModel(pair_rate=args.pair_rate, integration_time=args.integration_time,
                            dark_coincidence_rate=args.dark_rate, rng_seed=seed)
        counts = synthesize_counts(result, model)
    text = write_scan_csv(result, counts=counts, seed=seed)

    config = cfg.to_dict()
    config["verify"] = bool(args.verify)
    if args.counts:
        config["counts"] = {"pair_rate": args.pair_rate, "integration_time": args.integration_time,
                            "dark_coincidence_rate": args.dark_rate}
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text(out, text)
        write_manifest(out, command, config, [out], {"counts": seed} if seed is not None else None)
        print(f"wrote {out}")
    if cfg.observable != "map":
        for loss, vis in zip(cfg.losses, scan_visibilities(result)):
            parts = " ".join(f"{k}={'n/a' if v is None else f'{v:.6f}'}" for k, v in vis.items())
            print(f"loss={loss:.4g} {parts}", file=sys.stderr)
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        cfg = _build_scan_config(args)
        if args.counts:
            resolve_seed(args.seed)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_INPUT)
    return _emit_scan(cfg, args, "scan", Path(args.out) if args.out else None)


def cmd_figures(args) -> int:
    preset = FIGURE_PRESETS[args.figure]
    xi = preset["xi"] if args.xi is None else args.xi
    try:
        cfg = ScanConfig(losses=preset["losses"], observable=preset["observable"],
                         source=PhotonPairSource(visibility=xi,
                                                 coherence_time=args.coherence_time or 1.0))
        if args.counts:
            resolve_seed(args.seed)
    except (ValueError, ConfigError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    out = Path(args.out_dir) / f"{args.figure}.csv"
    return _emit_scan(cfg, args, f"figures {args.figure}", out)


def cmd_verify(args) -> int:
    from .verification import run_all

    try:
        seed = resolve_seed(args.seed)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_INPUT)
    report = run_all(trials=args.trials, seed=seed, inject_failure=args.inject_failure)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        _write_text(out, text)
        write_manifest(out, "verify", {"trials": args.trials}, [out], {"verify": seed})
    else:
        sys.stdout.write(text)
    if not report["passed"]:
        for name, suite in report["suites"].items():
            if not suite["passed"]:
                print(f"FAIL {name}: max deviation {suite['max_deviation']:.3g} "
                      f">= {suite['tolerance']:.0e}; case {json.dumps(suite['worst_case'])}",
                      file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _add_counts_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--verify", action="store_true",
                   help="cross-check every grid point against the Fock-space oracle")
    p.add_argument("--counts", action="store_true", help="append Poisson-sampled counts")
    p.add_argument("--pair-rate", type=float, default=1000.0,
                   help="coincidences/s at the long-delay baseline")
    p.add_argument("--integration-time", type=float, default=1.0, help="seconds per point")
    p.add_argument("--dark-rate", type=float, default=0.0, help="flat accidental coincidences/s")
    p.add_argument("--seed", type=int, default=None,
                   help=f"counts RNG seed (overridden by ${SEED_ENV})")
    p.add_argument("--coherence-time", type=float, default=None, help="T in ps (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lossy-optics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dilate", help="embed a lossy matrix into a unitary with ancilla modes")
    p.add_argument("input", help="matrix file (JSON [re, im] pairs or re+imj text)")
    p.add_argument("-o", "--out", help="output JSON (default: <input>.dilated.json)")
    p.add_argument("--netlist", help="output netlist path (default: next to --out)")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("compile", help="netlist -> transfer matrix JSON")
    p.add_argument("netlist")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("decompose", help="unitary matrix -> netlist")
    p.add_argument("input")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("parse-check", help="validate a netlist and print its canonical form")
    p.add_argument("netlist")
    p.set_defaults(func=cmd_parse_check)

    p = sub.add_parser("scan", help="coincidence scan over loss and delay")
    p.add_argument("config", nargs="?", help="JSON file mirroring ScanConfig")
    p.add_argument("--observable", choices=OBSERVABLES)
    p.add_argument("--losses", help="comma list or grid(start,stop,num)")
    p.add_argument("--tau-grid", help="comma list or grid(start,stop,num), ps")
    p.add_argument("--xi", type=float, help="source visibility")
    p.add_argument("--convention", choices=LOSS_CONVENTIONS)
    p.add_argument("--out", help="CSV path (default: stdout)")
    _add_counts_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("figures", help="datasets for the delay/loss figures")
    p.add_argument("figure", choices=sorted(FIGURE_PRESETS))
    p.add_argument("--xi", type=float, help="override the preset source visibility")
    p.add_argument("--out-dir", default=".")
    _add_counts_flags(p)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("verify", help="run oracle and invariant suites")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
