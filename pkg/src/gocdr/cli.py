"""Command-line front end: JSON configs in, CSV/JSON results out.

Subcommands: stat-ber, sim, jtol, ftol, phase-noise, eye.  Every command
reads a schema-tagged JSON config, writes its outputs atomically, and
drops a manifest recording the config digest, seed, tool version, and
output digests so reruns are verifiable byte for byte.

Exit codes: 0 success, 2 config error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import ConfigError, GocdrError
from .eventsim import (EdgeDetectorConfig, OscillatorConfig, PatternConfig,
                       SamplerConfig, SimConfig, eye_capture, resync_check,
                       simulate)
from .jitter import JitterSpec
from .phasenoise import OscParams, tradeoff_curve
from .statber import CdrStatConfig, ber_estimate, with_sj
from .streams import RunDist
from .tolerance import ToleranceMask, ftol_search, jtol_curve, mask_margin

_SCHEMAS = {
    "stat-ber": "gocdr.stat-ber/1",
    "sim": "gocdr.sim/1",
    "jtol": "gocdr.jtol/1",
    "ftol": "gocdr.ftol/1",
    "phase-noise": "gocdr.phase-noise/1",
    "eye": "gocdr.eye/1",
}


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _load_config(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    want = _SCHEMAS[command]
    got = cfg.get("schema")
    if got != want:
        raise ConfigError(f"config schema must be {want!r}, got {got!r}")
    return cfg


def _field(cfg: dict, key: str, kind, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"config is missing required key {key!r}")
        return default
    val = cfg[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return val
    if kind is bool and isinstance(val, bool):
        return val
    if kind in (list, dict, str) and isinstance(val, kind):
        return val
    raise ConfigError(f"config key {key!r} must be {kind.__name__}, got {type(val).__name__}")


def _jitter_spec(cfg: dict) -> JitterSpec:
    j = _field(cfg, "jitter", dict, default={})
    try:
        return JitterSpec(
            dj_pp=_field(j, "dj_pp_ui", float, 0.0),
            rj_rms=_field(j, "rj_rms_ui", float, 0.0),
            sj_amp_pp=_field(j, "sj_amp_pp_ui", float, 0.0),
            sj_freq_norm=_field(j, "sj_freq_norm", float, 0.0),
            ckj_rms_cid5=_field(j, "ckj_rms_cid5_ui", float, 0.0),
        )
    except GocdrError as e:
        raise ConfigError(f"invalid jitter block: {e}") from e


def _run_dist(cfg: dict) -> RunDist:
    rd = _field(cfg, "run_dist", dict, default={"kind": "truncated_geometric"})
    kind = _field(rd, "kind", str, "truncated_geometric")
    try:
        if kind == "truncated_geometric":
            return RunDist.truncated_geometric(_field(rd, "p_extend", float, 0.5),
                                               _field(rd, "max_cid", int, 5))
        if kind == "prbs7":
            return RunDist.prbs7()
        if kind == "single":
            return RunDist.single(_field(rd, "length", int, required=True))
        if kind == "explicit":
            return RunDist(np.asarray(_field(rd, "probs", list, required=True), dtype=float))
    except GocdrError as e:
        raise ConfigError(f"invalid run_dist block: {e}") from e
    raise ConfigError(f"unknown run_dist kind {kind!r}")


def _stat_config(cfg: dict, seed_ignored=None) -> CdrStatConfig:
    try:
        return CdrStatConfig(
            jitter=_jitter_spec(cfg),
            freq_offset_eps=_field(cfg, "freq_offset_eps", float, 0.0),
            run_dist=_run_dist(cfg),
            sampling_phase_phi=_field(cfg, "sampling_phase_ui", float, 0.5),
            target_ber=_field(cfg, "target_ber", float, 1e-12),
        )
    except GocdrError as e:
        raise ConfigError(str(e)) from e


def _sim_config(cfg: dict, seed: int | None) -> SimConfig:
    try:
        o = _field(cfg, "osc", dict, required=True)
        osc = OscillatorConfig(
            f_c_hz=_field(o, "f_c_hz", float, required=True),
            k_cco_hz_per_a=_field(o, "k_cco_hz_per_a", float, 0.0),
            ctrl_a=_field(o, "ctrl_a", float, 0.0),
            cc0_a=_field(o, "cc0_a", float, 0.0),
            jit_sigma=_field(o, "jit_sigma", float, 0.0),
        )
        e = _field(cfg, "edet", dict, required=True)
        if "tau_s" in e:
            edet = EdgeDetectorConfig(tau_s=_field(e, "tau_s", float, required=True))
        else:
            edet = EdgeDetectorConfig.from_clock_fraction(
                _field(e, "tau_over_t", float, required=True), osc)
        s = _field(cfg, "sampler", dict, default={"mode": "structural"})
        mode = _field(s, "mode", str, "structural")
        if mode == "phase":
            sampler = SamplerConfig.phase(_field(s, "phi_ui", float, 0.5))
        else:
            sampler = SamplerConfig(mode="structural",
                                    tap_stage=_field(s, "tap_stage", int, 4),
                                    inverted=_field(s, "inverted", bool, False))
        p = _field(cfg, "pattern", dict, default={"kind": "prbs7"})
        pattern = PatternConfig(
            kind=_field(p, "kind", str, "prbs7"),
            prbs_seed=_field(p, "prbs_seed", int, 0x7F),
            max_cid=_field(p, "max_cid", int, 5),
            p_extend=_field(p, "p_extend", float, 0.5),
        )
        return SimConfig(
            data_rate_hz=_field(cfg, "data_rate_hz", float, required=True),
            n_bits=_field(cfg, "n_bits", int, required=True),
            osc=osc, edet=edet, sampler=sampler, pattern=pattern,
            jitter=_jitter_spec(cfg),
            seed=seed if seed is not None else _field(cfg, "seed", int, 0),
            record_waveforms=True,
        )
    except GocdrError as e:
        raise ConfigError(str(e)) from e


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _atomic_write(path: str, data: str) -> str:
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".gocdr-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, np.integer):
        x = int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _time_s(t: float) -> str:
    # femtosecond resolution for all serialized times
    return f"{t:.15f}"


def _config_digest(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _write_manifest(path, command, cfg, seed, outputs, t0):
    manifest = {
        "command": command,
        "tool_version": __version__,
        "config_digest": _config_digest(cfg),
        "seed": seed,
        "outputs": outputs,
        "duration_s": round(time.monotonic() - t0, 6),
    }
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_stat_ber(cfg: dict, out: str, seed, threads: int) -> None:
    t0 = time.monotonic()
    stat = _stat_config(cfg)
    freqs = _field(cfg, "sj_freq_norms", list, required=True)
    amps = _field(cfg, "sj_amps_pp_ui", list, required=True)
    if not freqs or not amps:
        raise ConfigError("sj_freq_norms and sj_amps_pp_ui must be non-empty")

    def row(f):
        return [(f, a, ber_estimate(with_sj(stat, float(f), float(a)))) for a in amps]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(row, freqs))
    rows = [cell for chunk in results for cell in chunk]
    digest = _atomic_write(out, _csv(["sj_freq_norm", "sj_amp_pp_ui", "ber"], rows))
    _write_manifest(out + ".manifest.json", "stat-ber", cfg, seed,
                    {os.path.basename(out): digest}, t0)


def cmd_sim(cfg: dict, out_dir: str, seed, threads: int) -> None:
    t0 = time.monotonic()
    sim_cfg = _sim_config(cfg, seed)
    result = simulate(sim_cfg)
    os.makedirs(out_dir, exist_ok=True)
    outputs = {}

    bin_width = _field(cfg, "eye_bin_width_ui", float, 0.005)
    eye = eye_capture(result, bin_width)
    eye_rows = []
    for level in (0, 1):
        for k in range(eye.n_bins):
            eye_rows.append((eye.bin_centers[k], level, int(eye.counts[level, k])))
    outputs["eye.csv"] = _atomic_write(
        os.path.join(out_dir, "eye.csv"),
        _csv(["rel_time_ui", "level", "count"], eye_rows))

    tol = _field(cfg, "resync_tol_ui", float, 0.1)
    n, miss, consec = resync_check(result, tol_ui=tol)
    _, dev = result.resync_events
    finite = dev[np.isfinite(dev)]
    resync = {
        "n_releases": n,
        "n_missed": miss,
        "max_consecutive_missed": consec,
        "tol_ui": tol,
        "deviation_ui": {
            "median": float(np.median(np.abs(finite))) if finite.size else None,
            "max": float(np.max(np.abs(finite))) if finite.size else None,
        },
    }
    outputs["resync.json"] = _atomic_write(
        os.path.join(out_dir, "resync.json"),
        json.dumps(resync, indent=2, sort_keys=True) + "\n")

    ber = {
        "bits_simulated": result.bits_simulated,
        "bits_scored": result.bits_scored,
        "errors": result.error_count,
        "ber": result.ber,
        "missing_samples": result.missing_sample_count,
        "ber_with_missing": result.ber_with_missing,
        "glitch_releases": result.glitch_release_count,
        "clamped_jitter_draws": result.clamped_jitter_draws,
        "sampler_mode": result.sampler_mode,
        "tap_offset_nominal_s": _time_s(result.tap_offset_nominal_s),
    }
    outputs["ber.json"] = _atomic_write(
        os.path.join(out_dir, "ber.json"),
        json.dumps(ber, indent=2, sort_keys=True) + "\n")

    if _field(cfg, "emit_logs", bool, False):
        t_tr, levels = result.data_transition_log
        outputs["transitions.csv"] = _atomic_write(
            os.path.join(out_dir, "transitions.csv"),
            _csv(["time_s", "level"],
                 ((_time_s(t), int(v)) for t, v in zip(t_tr, levels))))
        outputs["samples.csv"] = _atomic_write(
            os.path.join(out_dir, "samples.csv"),
            _csv(["time_s", "rx_bit"],
                 ((_time_s(t), int(v)) for t, v in
                  zip(result.sampling_instants, result.rx_bits))))

    _write_manifest(os.path.join(out_dir, "manifest.json"), "sim", cfg,
                    sim_cfg.seed, outputs, t0)


def _mask_from_cfg(cfg: dict) -> ToleranceMask | None:
    m = _field(cfg, "mask", dict, default=None)
    if m is None:
        return None
    bps = _field(m, "breakpoints", list, required=True)
    try:
        return ToleranceMask(breakpoints=tuple((float(f), float(a)) for f, a in bps))
    except (TypeError, ValueError, GocdrError) as e:
        raise ConfigError(f"invalid mask breakpoints: {e}") from e


def cmd_jtol(cfg: dict, out: str, seed, threads: int) -> None:
    t0 = time.monotonic()
    stat = _stat_config(cfg)
    freqs = [float(f) for f in _field(cfg, "sj_freq_norms", list, required=True)]
    bracket = _field(cfg, "amp_bracket_ui", list, default=[0.0, 4.0])
    curve = jtol_curve(stat, freqs, target_ber=stat.target_ber,
                       amp_bracket=(float(bracket[0]), float(bracket[1])))
    mask = _mask_from_cfg(cfg)
    if mask is not None:
        rows = [(r.freq_norm, r.jtol_amp_ui, r.mask_amp_ui, r.margin_ui, r.passed)
                for r in mask_margin(curve, mask)]
    else:
        rows = [(p.sj_freq_norm, p.max_sj_amp_pp, float("nan"), float("nan"), True)
                for p in curve]
    header = ["freq_norm", "jtol_amp_ui", "mask_amp_ui", "margin_ui", "pass"]
    digest = _atomic_write(out, _csv(header, rows))
    extra = {os.path.basename(out): digest}
    unbounded = [p.sj_freq_norm for p in curve if p.unbounded]
    meta_path = out + ".points.json"
    extra[os.path.basename(meta_path)] = _atomic_write(
        meta_path,
        json.dumps({"unbounded_freq_norms": unbounded,
                    "amp_bracket_ui": bracket}, indent=2, sort_keys=True) + "\n")
    _write_manifest(out + ".manifest.json", "jtol", cfg, seed, extra, t0)


def cmd_ftol(cfg: dict, out: str, seed, threads: int) -> None:
    t0 = time.monotonic()
    stat = _stat_config(cfg)
    bracket = _field(cfg, "eps_bracket", list, default=[0.0, 0.4])
    eps = ftol_search(stat, target_ber=stat.target_ber,
                      eps_bracket=(float(bracket[0]), float(bracket[1])))
    digest = _atomic_write(out, _csv(["target_ber", "ftol_eps"],
                                     [(stat.target_ber, eps)]))
    _write_manifest(out + ".manifest.json", "ftol", cfg, seed,
                    {os.path.basename(out): digest}, t0)


def cmd_phase_noise(cfg: dict, out: str, seed, threads: int) -> None:
    t0 = time.monotonic()
    try:
        params = OscParams(
            i_ss=1.0,  # placeholder; the sweep supplies bias values
            r_l=_field(cfg, "r_l_ohm", float, required=True),
            delta_v=_field(cfg, "delta_v_v", float, required=True),
            gamma=_field(cfg, "gamma", float, 1.0),
            eta=_field(cfg, "eta", float, 1.0),
            temperature=_field(cfg, "temperature_k", float, 300.0),
            n_stages=_field(cfg, "n_stages", int, 4),
            v_dd=_field(cfg, "v_dd_v", float, 1.8),
        )
        points = tradeoff_curve(
            params,
            [float(v) for v in _field(cfg, "i_ss_values_a", list, required=True)],
            data_rate=_field(cfg, "data_rate_hz", float, required=True),
            cid=_field(cfg, "cid", int, 5),
            phi=_field(cfg, "phi_ui", float, 0.5),
        )
    except GocdrError as e:
        raise ConfigError(str(e)) from e
    rows = [(p.i_ss, p.power, p.kappa, p.sigma_cid5_ui) for p in points]
    digest = _atomic_write(out, _csv(["i_ss_a", "power_w", "kappa_sqrt_s",
                                      "sigma_cid5_ui"], rows))
    _write_manifest(out + ".manifest.json", "phase-noise", cfg, seed,
                    {os.path.basename(out): digest}, t0)


def _read_csv(path: str, want_cols: list[str]):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror or e}") from e
    if not lines:
        raise ConfigError(f"{path} is empty")
    header = lines[0].split(",")
    for col in want_cols:
        if col not in header:
            raise ConfigError(f"{path} is missing column {col!r}")
    idx = [header.index(c) for c in want_cols]
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append([float(parts[i]) for i in idx])
    return np.asarray(rows)


def cmd_eye(cfg: dict, out: str, seed, threads: int) -> None:
    """Re-bin an existing transition log against a sampling-instant log."""
    t0 = time.monotonic()
    trans = _read_csv(_field(cfg, "transitions_csv", str, required=True),
                      ["time_s", "level"])
    samples = _read_csv(_field(cfg, "samples_csv", str, required=True),
                        ["time_s"])
    data_rate = _field(cfg, "data_rate_hz", float, required=True)
    bin_width = _field(cfg, "bin_width_ui", float, 0.005)
    if not 0 < bin_width <= 1:
        raise ConfigError("bin_width_ui must be in (0, 1]")
    ui = 1.0 / data_rate
    edges = np.sort(samples[:, 0])
    t_tr, levels = trans[:, 0], trans[:, 1].astype(int)
    pos = np.searchsorted(edges, t_tr, side="right") - 1
    valid = pos >= 0
    x = np.mod((t_tr[valid] - edges[pos[valid]]) / ui, 1.0)
    n_bins = max(1, int(round(1.0 / bin_width)))
    bin_idx = np.floor(x * n_bins + 0.5).astype(np.int64) % n_bins
    counts = np.zeros((2, n_bins), dtype=np.int64)
    lv = np.clip(levels[valid], 0, 1)
    np.add.at(counts, (lv, bin_idx), 1)
    rows = []
    for level in (0, 1):
        for k in range(n_bins):
            rows.append((k / n_bins, level, int(counts[level, k])))
    digest = _atomic_write(out, _csv(["rel_time_ui", "level", "count"], rows))
    _write_manifest(out + ".manifest.json", "eye", cfg, seed,
                    {os.path.basename(out): digest}, t0)


_COMMANDS = {
    "stat-ber": cmd_stat_ber,
    "sim": cmd_sim,
    "jtol": cmd_jtol,
    "ftol": cmd_ftol,
    "phase-noise": cmd_phase_noise,
    "eye": cmd_eye,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gocdr",
        description="Gated-oscillator CDR simulation and analysis workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True,
                       help="output file (directory for `sim`)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config, args.command)
        _COMMANDS[args.command](cfg, args.out, args.seed, args.threads)
    except ConfigError as e:
        print(f"gocdr {args.command}: config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - map to the documented exit code
        print(f"gocdr {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
