"""Command-line entry point.

    sumcomp mse-sweep --preset qam16 --k 100 --trials 50000 --out mse.csv
    sumcomp nmse-compare --function geometric_mean --check

A flat ``key = value`` config file (--config) may supply any flag; flags given
on the command line win.  Exit codes: 0 ok, 2 bad configuration, 3 a --check
threshold was violated.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .errors import ConfigError, SumCompError
from .harness import EXPERIMENTS, RUNNERS, ExperimentConfig, check_table

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3

# flag name -> (type, config field)
_KEYS = {
    "preset": (str, "preset"),
    "function": (str, "function"),
    "k": (int, "K"),
    "q": (int, "q"),
    "snr_start": (float, None),
    "snr_stop": (float, None),
    "snr_step": (float, None),
    "snr_list": (str, None),
    "trials": (int, "trials"),
    "seed": (int, "seed"),
    "input_distribution": (str, "input_distribution"),
    "out": (str, "output_path"),
    "workers": (int, "workers"),
    "k_list": (str, None),
    "uncentered": (bool, None),
    "check": (bool, None),
}


def _parse_bool(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config_file(path: str) -> dict:
    out = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from e
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        typ = _KEYS[key][0]
        try:
            out[key] = _parse_bool(value) if typ is bool else typ(value)
        except ValueError:
            raise ConfigError(f"{path}:{n}: bad value for {key}: {value!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sumcomp", description="SumComp over-the-air computation simulator")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="flat key = value file; command-line flags override it")
    p.add_argument("--preset", help="modulation preset: qamN, pamN, hex8a, hex8b")
    p.add_argument("--function", help="nomographic function preset")
    p.add_argument("--k", type=int, help="number of nodes")
    p.add_argument("--q", type=int, help="modulation order (must match the preset)")
    p.add_argument("--snr-start", type=float)
    p.add_argument("--snr-stop", type=float, help="inclusive")
    p.add_argument("--snr-step", type=float)
    p.add_argument("--snr-list", help="comma-separated SNR values in dB; overrides start/stop/step")
    p.add_argument("--k-list", help="comma-separated K values (analytic-table)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--input-distribution", help="zq or range:lo:hi")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--workers", type=int)
    p.add_argument("--uncentered", action="store_true", default=None,
                   help="keep the preset's raw offset instead of centering the constellation")
    p.add_argument("--check", action="store_true", default=None,
                   help="exit 3 if the acceptance thresholds for this experiment are violated")
    return p


def snr_grid(start: float, stop: float, step: float) -> tuple:
    if step <= 0 or stop < start:
        raise ConfigError("SNR grid needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(np.round(start + i * step, 9)) for i in range(n))


def _csv_numbers(text: str, typ) -> tuple:
    try:
        return tuple(typ(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"bad list {text!r}") from None


def config_from_args(args: argparse.Namespace) -> tuple[ExperimentConfig, bool]:
    values = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    kwargs = {field: values[key] for key, (_, field) in _KEYS.items() if field and key in values}
    if "snr_list" in values:
        kwargs["snr_grid"] = _csv_numbers(values["snr_list"], float)
    elif any(k in values for k in ("snr_start", "snr_stop", "snr_step")):
        kwargs["snr_grid"] = snr_grid(values.get("snr_start", -15.0), values.get("snr_stop", 24.0),
                                      values.get("snr_step", 1.0))
    if "k_list" in values:
        kwargs["k_list"] = _csv_numbers(values["k_list"], int)
    kwargs["centered"] = not values.get("uncentered", False)
    return ExperimentConfig(args.experiment, **kwargs), bool(values.get("check", False))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, check = config_from_args(args)
        table = RUNNERS[cfg.experiment](cfg)
    except (ConfigError, SumCompError) as e:
        print(f"sumcomp: {e}", file=sys.stderr)
        return EXIT_CONFIG
    text = table.to_csv()
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if check:
        violations = check_table(cfg.experiment, table)
        for v in violations:
            print(f"check failed: {v}", file=sys.stderr)
        if violations:
            return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
