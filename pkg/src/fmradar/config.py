"""Flat key-value run configuration: one ``key = value`` per line.

Lines starting with '#' (and inline '#' suffixes) are comments. The format
is deliberately diff-friendly and round-trips losslessly through
``format_config`` / ``parse_config_text``.
"""

from .errors import ConfigError
from .experiments import ScenarioConfig

_CONVERTERS = {
    "channel_count": int,
    "separation_m": float,
    "base_delay_s": float,
    "snr_db": float,
    "n_samples": int,
    "seed": int,
    "method": str,
    "sample_rate_hz": float,
    "carrier_offset_hz": float,
    "freq_deviation_hz": float,
    "channel_spacing_hz": float,
    "audio_bw_hz": float,
    "echo_amplitude": float,
    "direct_amplitude": float,
    "eps_rel": float,
    "target_count": int,
    "music_target_len": int,
    "music_subvector_frac": float,
    "music_grid_size": int,
    "music_max_delay_s": float,
    "ifft_min_sep_bins": int,
    "refine": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}

REQUIRED_KEYS = (
    "channel_count",
    "separation_m",
    "base_delay_s",
    "snr_db",
    "n_samples",
    "seed",
    "method",
)


def parse_config_text(text: str) -> dict:
    """Parse config text into a typed dict; unknown keys are an error."""
    values = {}
    bad = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONVERTERS:
            bad.append(key)
            continue
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if bad:
        raise ConfigError(f"unknown keys: {', '.join(sorted(bad))}", bad_keys=bad)

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(
            f"missing required keys: {', '.join(missing)}", missing_keys=missing
        )
    return values


def parse_config(path) -> dict:
    with open(path, "r") as fh:
        return parse_config_text(fh.read())


def format_config(values: dict) -> str:
    """Serialize a config dict back to text; floats use repr (lossless)."""
    lines = []
    for key in sorted(values):
        value = values[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def build_scenario(values: dict) -> ScenarioConfig:
    """Turn a parsed config dict into a ScenarioConfig."""
    detector_params = {}
    if values.get("method", "").upper() == "MUSIC":
        mapping = {
            "music_target_len": "target_len",
            "music_subvector_frac": "subvector_frac",
            "music_grid_size": "grid_size",
            "music_max_delay_s": "max_delay_s",
        }
    else:
        mapping = {"ifft_min_sep_bins": "min_sep_bins"}
    for key, param in mapping.items():
        if key in values:
            detector_params[param] = values[key]
    if "refine" in values:
        detector_params["refine"] = values["refine"]

    scenario_keys = (
        "channel_count",
        "separation_m",
        "method",
        "seed",
        "base_delay_s",
        "snr_db",
        "n_samples",
        "sample_rate_hz",
        "carrier_offset_hz",
        "freq_deviation_hz",
        "channel_spacing_hz",
        "audio_bw_hz",
        "echo_amplitude",
        "direct_amplitude",
        "eps_rel",
        "target_count",
    )
    kwargs = {k: values[k] for k in scenario_keys if k in values}
    return ScenarioConfig(detector_params=detector_params, **kwargs)
