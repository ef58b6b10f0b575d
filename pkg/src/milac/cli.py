"""``milac`` command: run one experiment from an INI config and write CSVs,
a plotting script and a manifest.

Config layout (all sections optional except where an experiment needs them)::

    [run]
    seed = 1
    out = results/sumrate

    [link]
    n_t = 4
    n_r = 4
    snr_db = -10 -5 0 5 10 15 20 25 30
    trials = 2000
    symbols_per_trial = 100
    tx_power = 1
    y0 = 0.02

    [strategies]
    labels = digital/R-ZFBF, milac-lmmse/R-ZFBF

    [complexity]      n_values, tau        (complexity, perf-vs-complexity)
    [noisy-csi]       rho_db               (noisy-csi)
    [quantized]       bits                 (quantized)
    [dft-check]       n_values             (dft-check)
    [network-dump]    snr_db               (network-dump)
"""

import argparse
import configparser
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .beamforming import (
    BeamformerSpec,
    Normalization,
    Side,
    Strategy,
    arbitrary_tx_network,
    dft_matrix,
    dft_network,
    lmmse_inspired_network,
    optimal_lambda,
    precoder_digital,
)
from .complexity import (
    ComplexityModel,
    Realization,
    Task,
    complexity_rows,
    ops_per_block,
    sci,
    write_complexity_csv,
)
from .linksim import (
    CurveRow,
    LinkConfig,
    parse_strategy,
    rayleigh_channel,
    run_ber_experiment,
    run_sumrate_experiment,
    trial_rng,
    write_curve_csv,
)
from .network import dump_network, effective_matrix, simulate_nodal

log = logging.getLogger("milac")

EXPERIMENTS = (
    "sumrate",
    "ber",
    "complexity",
    "perf-vs-complexity",
    "noisy-csi",
    "quantized",
    "dft-check",
    "network-dump",
)

#: Fraction of redrawn trials above which a run is flagged as numerically unsound.
REDRAW_LIMIT = 0.01

EXIT_CONFIG = 2
EXIT_NUMERICS = 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    experiment: str
    link: LinkConfig
    strategies: tuple = ()
    out: Path = Path("milac-out")
    n_values: tuple = ()
    tau: int = 100
    rho_db: tuple = ()
    bits: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.link.seed


# -- parsing ------------------------------------------------------------------


def _split(text):
    return [t for t in text.replace(",", " ").split() if t]


def _get(cp, section, key, conv, default=None, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] {key}: required for this experiment")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({err})") from None


def _ints(raw):
    return tuple(int(t) for t in _split(raw))


def _floats(raw):
    return tuple(float(t) for t in _split(raw))


_DEFAULT_STRATEGIES = {
    "sumrate": ("digital/R-ZFBF", "digital/ZFBF", "digital/MBF",
                "milac-arbit/R-ZFBF", "milac-arbit/ZFBF", "milac-arbit/MBF",
                "milac-lmmse/R-ZFBF", "milac-lmmse/ZFBF", "milac-lmmse/MBF"),
    "ber": ("digital/MMSE", "digital/ZF", "digital/MF",
            "milac-lmmse/MMSE", "milac-lmmse/ZF", "milac-lmmse/MF"),
    "perf-vs-complexity": ("digital/R-ZFBF", "milac-lmmse/R-ZFBF"),
    "noisy-csi": ("digital/R-ZFBF", "milac-lmmse/R-ZFBF"),
    "quantized": ("milac-lmmse/R-ZFBF",),
    "network-dump": ("milac-arbit/R-ZFBF", "milac-lmmse/R-ZFBF"),
}


_TX_NAMES = (Strategy.RZFBF, Strategy.ZFBF, Strategy.MBF)
_RX_NAMES = (Strategy.MMSE, Strategy.ZF, Strategy.MF)


def parse_config(text, experiment, seed=None, out=None):
    """Parse and validate INI `text` for `experiment`. Raises :class:`ConfigError`."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from None

    named = _get(cp, "run", "experiment", str)
    if named is not None and named != experiment:
        raise ConfigError(f"[run] experiment: config is for {named!r}, not {experiment!r}")

    link_kw = {}
    for f in fields(LinkConfig):
        conv = {"snr_db": _floats, "tx_power": float, "y0": float}.get(f.name, int)
        v = _get(cp, "link", f.name, conv)
        if v is not None:
            link_kw[f.name] = v
    run_seed = _get(cp, "run", "seed", int)
    if run_seed is not None:
        link_kw["seed"] = run_seed
    if seed is not None:
        link_kw["seed"] = seed
    if link_kw.get("seed", 0) < 0 or link_kw.get("seed", 0) >= 2**64:
        raise ConfigError("[run] seed: must be a 64-bit unsigned integer")
    for key in ("trials", "n_t", "n_r", "symbols_per_trial"):
        if key in link_kw and link_kw[key] < 1:
            raise ConfigError(f"[link] {key}: must be >= 1, got {link_kw[key]}")
    if "snr_db" in link_kw and not link_kw["snr_db"]:
        raise ConfigError("[link] snr_db: at least one value required")
    try:
        link = LinkConfig(**link_kw)
    except ValueError as err:
        raise ConfigError(f"[link] {err}") from None

    cfg = ExperimentConfig(experiment, link)
    cfg.out = Path(out or _get(cp, "run", "out", str, f"milac-out/{experiment}"))

    labels = _get(cp, "strategies", "labels", lambda r: tuple(s.strip() for s in r.split(",") if s.strip()))
    cfg.strategies = labels or _DEFAULT_STRATEGIES.get(experiment, ())
    allowed = _RX_NAMES if experiment == "ber" else _TX_NAMES
    for s in cfg.strategies:
        try:
            _, st = parse_strategy(s)
        except ValueError as err:
            raise ConfigError(f"[strategies] labels: {err}") from None
        if st not in allowed:
            raise ConfigError(f"[strategies] labels: {s} does not fit a {experiment} run")

    if experiment in ("sumrate", "perf-vs-complexity", "noisy-csi", "quantized", "network-dump"):
        if link.n_r > link.n_t:
            raise ConfigError("[link] n_r: multi-user precoding needs n_r <= n_t")
    if experiment == "ber" and link.n_r < link.n_t:
        raise ConfigError("[link] n_r: single-user combining needs n_r >= n_t")

    if experiment in ("complexity", "perf-vs-complexity"):
        cfg.n_values = _get(cp, "complexity", "n_values", _ints, required=True)
        cfg.tau = _get(cp, "complexity", "tau", int, 100)
        if cfg.tau < 1:
            raise ConfigError(f"[complexity] tau: must be >= 1, got {cfg.tau}")
        if not cfg.n_values or min(cfg.n_values) < 1:
            raise ConfigError("[complexity] n_values: need positive sizes")
    if experiment == "noisy-csi":
        cfg.rho_db = _get(cp, "noisy-csi", "rho_db", _floats, required=True)
    if experiment == "quantized":
        cfg.bits = _get(cp, "quantized", "bits", _ints, required=True)
        bad = [b for b in cfg.bits if b < 2 or b % 2]
        if bad:
            raise ConfigError(f"[quantized] bits: must be even and >= 2, got {bad}")
    if experiment == "dft-check":
        cfg.n_values = _get(cp, "dft-check", "n_values", _ints, required=True)
        if not cfg.n_values or min(cfg.n_values) < 1:
            raise ConfigError("[dft-check] n_values: need positive sizes")
    if experiment == "network-dump":
        cfg.extra["snr_db"] = _get(cp, "network-dump", "snr_db", float, 10.0)
    return cfg


def config_hash(text):
    return hashlib.sha256(text.encode()).hexdigest()


# -- experiments --------------------------------------------------------------


def _workers():
    cpus = os.cpu_count() or 1
    env = os.environ.get("MILAC_THREADS")
    if env:
        try:
            return max(1, min(cpus, int(env)))
        except ValueError:
            log.warning("ignoring non-integer MILAC_THREADS=%r", env)
    return cpus


def _run_sumrate(cfg, out, workers):
    res = run_sumrate_experiment(cfg.link, list(cfg.strategies), workers=workers)
    write_curve_csv(res.rows(), out / "sumrate.csv")
    return ["sumrate.csv"], res.redraws, res.attempts


def _run_ber(cfg, out, workers):
    res = run_ber_experiment(cfg.link, list(cfg.strategies), workers=workers)
    write_curve_csv(res.rows(), out / "ber.csv")
    return ["ber.csv"], res.redraws, res.attempts


def _run_complexity(cfg, out, workers):
    write_complexity_csv(complexity_rows(cfg.n_values, cfg.tau), out / "complexity.csv")
    return ["complexity.csv"], 0, 0


def _run_perf_vs_complexity(cfg, out, workers):
    rows, cplx = [], []
    redraws = attempts = 0
    for n in cfg.n_values:
        link = replace(cfg.link, n_t=n, n_r=n)
        res = run_sumrate_experiment(link, list(cfg.strategies), workers=workers)
        rows += res.rows()
        redraws += res.redraws
        attempts += res.attempts
        ops = {r: ops_per_block(ComplexityModel(Task.ZERO_FORCING, r, n_r=n, n_t=n, tau=cfg.tau))
               for r in Realization}
        g = ops[Realization.DIGITAL] / ops[Realization.MILAC]
        for r in Realization:
            cplx.append((Task.ZERO_FORCING.value, r.value, n, n, cfg.tau, ops[r], sci(ops[r], 4), g))
    write_curve_csv(rows, out / "sumrate.csv")
    write_complexity_csv(cplx, out / "complexity.csv")
    return ["sumrate.csv", "complexity.csv"], redraws, attempts


def _relabel(rows, suffix):
    return [CurveRow(f"{r.strategy}{suffix}", *r.as_tuple()[1:]) for r in rows]


def _run_noisy_csi(cfg, out, workers):
    res = run_sumrate_experiment(cfg.link, list(cfg.strategies), workers=workers)
    rows, redraws, attempts = _relabel(res.rows(), " perfect"), res.redraws, res.attempts
    for rho in cfg.rho_db:
        res = run_sumrate_experiment(cfg.link, list(cfg.strategies), csi_rho_db=rho, workers=workers)
        rows += _relabel(res.rows(), f" rho={rho:g}dB")
        redraws += res.redraws
        attempts += res.attempts
    write_curve_csv(rows, out / "noisy_csi.csv")
    return ["noisy_csi.csv"], redraws, attempts


def _run_quantized(cfg, out, workers):
    res = run_sumrate_experiment(cfg.link, list(cfg.strategies), workers=workers)
    rows, redraws, attempts = _relabel(res.rows(), " B=inf"), res.redraws, res.attempts
    for b in cfg.bits:
        res = run_sumrate_experiment(cfg.link, list(cfg.strategies), quant_bits=b, workers=workers)
        rows += _relabel(res.rows(), f" B={b}")
        redraws += res.redraws
        attempts += res.attempts
    write_curve_csv(rows, out / "quantized.csv")
    return ["quantized.csv"], redraws, attempts


def _run_dft_check(cfg, out, workers):
    lines = ["n_r,max_error,unitarity_error,parseval_error"]
    for n in cfg.n_values:
        rng = trial_rng(cfg.seed, n)
        u = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
        v2 = simulate_nodal(dft_network(n, cfg.link.y0), u, check_conditioning=False)[1]
        err = float(np.max(np.abs(v2 - np.fft.fft(u, axis=0, norm="ortho"))))
        f = dft_matrix(n)
        unit = float(np.max(np.abs(f.conj().T @ f - np.eye(n))))
        pars = float(np.max(np.abs(np.linalg.norm(v2, axis=0) ** 2 - np.linalg.norm(u, axis=0) ** 2)
                                   / np.linalg.norm(u, axis=0) ** 2))
        lines.append(f"{n},{err!r},{unit!r},{pars!r}")
    (out / "dft_check.csv").write_text("\n".join(lines) + "\n")
    return ["dft_check.csv"], 0, 0


def _run_network_dump(cfg, out, workers):
    link = cfg.link
    h = rayleigh_channel(link.n_r, link.n_t, trial_rng(link.seed, 0))
    lam = optimal_lambda(link.n_r, link.tx_power, link.noise_power(cfg.extra["snr_db"]))
    written = []
    lines = ["strategy,n_ports,file,max_error"]
    for i, label in enumerate(cfg.strategies):
        real, st = parse_strategy(label)
        if real == "milac-arbit":
            net = arbitrary_tx_network(precoder_digital(st, h, lam), link.y0)
            ref = precoder_digital(st, h, lam)
        elif real == "milac-lmmse":
            spec = BeamformerSpec(st, Side.TRANSMITTER, lam, Normalization.FROBENIUS)
            net = lmmse_inspired_network(spec, h, link.y0)
            ref = precoder_digital(st, h, lam, Normalization.FROBENIUS)
        else:
            continue
        name = f"network_{i}.milac"
        dump_network(net, out / name)
        err = float(np.max(np.abs(effective_matrix(net) - ref)))
        lines.append(f"{label},{net.n_ports},{name},{err!r}")
        written.append(name)
    (out / "networks.csv").write_text("\n".join(lines) + "\n")
    return ["networks.csv"] + written, 0, 0


_RUNNERS = {
    "sumrate": _run_sumrate,
    "ber": _run_ber,
    "complexity": _run_complexity,
    "perf-vs-complexity": _run_perf_vs_complexity,
    "noisy-csi": _run_noisy_csi,
    "quantized": _run_quantized,
    "dft-check": _run_dft_check,
    "network-dump": _run_network_dump,
}


# -- plot scripts ---------------------------------------------------------------

_PLOT_CURVES = '''"""Plot {csv}. Requires matplotlib."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("{csv}") as f:
    for row in csv.DictReader(f):
        key = row["strategy"] + (f" N={{row['n_t']}}" if {by_n} else "")
        curves[key].append((float(row["snr_db"]), float(row["mean_metric"])))
for label, pts in curves.items():
    pts.sort()
    plt.plot(*zip(*pts), marker="o", label=label)
plt.xlabel("SNR [dB]")
plt.ylabel("{ylabel}")
{yscale}plt.grid(True, which="both", alpha=0.3)
plt.legend(fontsize="small")
plt.savefig("{png}", dpi=150, bbox_inches="tight")
'''

_PLOT_COMPLEXITY = '''"""Plot complexity.csv. Requires matplotlib."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("complexity.csv") as f:
    for row in csv.DictReader(f):
        curves[row["task"] + " / " + row["realization"]].append(
            (int(row["n_r"]), float(row["ops_sci"])))
for label, pts in curves.items():
    pts.sort()
    if all(y > 0 for _, y in pts):
        plt.loglog(*zip(*pts), marker="o", base=2, label=label)
plt.xlabel("N_T = N_R")
plt.ylabel("real operations per coherence block")
plt.grid(True, which="both", alpha=0.3)
plt.legend(fontsize="small")
plt.savefig("complexity.png", dpi=150, bbox_inches="tight")
'''


def _plot_script(experiment, files):
    if experiment == "complexity":
        return _PLOT_COMPLEXITY
    if experiment == "ber":
        return _PLOT_CURVES.format(csv=files[0], png="ber.png", ylabel="BER",
                                   yscale='plt.yscale("log")\n', by_n=False)
    if experiment in ("dft-check", "network-dump"):
        return None
    return _PLOT_CURVES.format(csv=files[0], png=files[0].replace(".csv", ".png"),
                               ylabel="sum rate [bit/s/Hz]", yscale="",
                               by_n=experiment == "perf-vs-complexity")


# -- entry point ----------------------------------------------------------------


def run(cfg, text):
    """Execute `cfg` and write its artifacts. Returns the manifest dict."""
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    workers = _workers()
    files, redraws, attempts = _RUNNERS[cfg.experiment](cfg, out, workers)
    script = _plot_script(cfg.experiment, files)
    if script is not None:
        name = f"plot_{cfg.experiment.replace('-', '_')}.py"
        (out / name).write_text(script)
        files.append(name)
    manifest = {
        "experiment": cfg.experiment,
        "config_sha256": config_hash(text),
        "seed": cfg.seed,
        "version": __version__,
        "redraws": redraws,
        "attempts": attempts,
        "files": {f: hashlib.sha256((out / f).read_bytes()).hexdigest() for f in files},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def build_parser():
    p = argparse.ArgumentParser(prog="milac", description=" ".join(__doc__.split("\n\n")[0].split()))
    p.add_argument("--version", action="version", version=f"milac {__version__}")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, type=Path, help="INI config file")
    p.add_argument("--seed", type=int, help="override [run] seed")
    p.add_argument("--out", type=Path, help="override [run] out")
    p.add_argument("--validate", action="store_true", help="parse the config and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.config.read_text()
    except OSError as err:
        print(f"milac: cannot read config: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, args.experiment, seed=args.seed, out=args.out)
    except ConfigError as err:
        print(f"milac: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if args.validate:
        print(f"{args.config}: ok ({cfg.experiment}, seed {cfg.seed})")
        return 0
    if cfg.out.exists() and not os.access(cfg.out, os.W_OK):
        print(f"milac: config error: [run] out: {cfg.out} is not writable", file=sys.stderr)
        return EXIT_CONFIG
    manifest = run(cfg, text)
    attempts = manifest["attempts"]
    if attempts and manifest["redraws"] / attempts > REDRAW_LIMIT:
        print(f"milac: numerical trouble: {manifest['redraws']} of {attempts} channel draws "
              "were singular", file=sys.stderr)
        return EXIT_NUMERICS
    print(f"wrote {len(manifest['files'])} files to {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
