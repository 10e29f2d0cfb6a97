"""Key-value run configuration and parameter-set documents.

All documents are INI-style text: sections mirror the domain type names,
energies are in GHz, flux in flux-quantum units, transmissions are a
comma-separated list. Floats are written with 12 significant digits so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import configparser

from .potentials import CircuitParams, FluxBias, NanowireChannels

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_float_list",
    "parse_counts",
    "parse_pairs",
    "parse_labels",
    "circuit_from_config",
    "channels_from_config",
    "flux_from_config",
    "write_params_document",
    "read_params_document",
    "read_gate_channels",
    "fmt",
]


def fmt(value: float) -> str:
    """Locale-independent float form with 12 significant digits."""
    return f"{value:.12g}"


class ConfigError(Exception):
    """Bad or missing configuration value; message names the field."""


class RunConfig:
    """Typed access to one parsed configuration document."""

    def __init__(self, parser: configparser.ConfigParser, path: str):
        self._parser = parser
        self.path = path

    def has_section(self, section: str) -> bool:
        return self._parser.has_section(section)

    def sections(self) -> list[str]:
        return self._parser.sections()

    def raw(self, section: str, key: str) -> str | None:
        if not self._parser.has_option(section, key):
            return None
        return self._parser.get(section, key)

    def items(self, section: str) -> list[tuple[str, str]]:
        if not self._parser.has_section(section):
            raise ConfigError(f"missing section [{section}] in {self.path}")
        return list(self._parser.items(section))

    def get_str(self, section: str, key: str, default: str | None = None) -> str:
        value = self.raw(section, key)
        if value is None:
            if default is None:
                raise ConfigError(f"missing field {section}.{key} in {self.path}")
            return default
        return value.strip()

    def get_float(self, section: str, key: str, default: float | None = None) -> float:
        value = self.raw(section, key)
        if value is None:
            if default is None:
                raise ConfigError(f"missing field {section}.{key} in {self.path}")
            return default
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"field {section}.{key}: not a number: {value!r}") from exc

    def get_int(self, section: str, key: str, default: int | None = None) -> int:
        value = self.raw(section, key)
        if value is None:
            if default is None:
                raise ConfigError(f"missing field {section}.{key} in {self.path}")
            return default
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"field {section}.{key}: not an integer: {value!r}") from exc

    def get_bool(self, section: str, key: str, default: bool | None = None) -> bool:
        value = self.raw(section, key)
        if value is None:
            if default is None:
                raise ConfigError(f"missing field {section}.{key} in {self.path}")
            return default
        lowered = value.strip().lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"field {section}.{key}: not a boolean: {value!r}")


def load_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return RunConfig(parser, path)


def parse_float_list(text: str, *, field: str = "value") -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(cell) for cell in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{field}: not a comma-separated number list: {text!r}") from exc


def parse_counts(text: str, *, field: str = "channels") -> list[int]:
    """Channel counts as '3', '2,3,4', or the range form '2..5'."""
    text = text.strip()
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise ValueError("empty range")
            return list(range(lo, hi + 1))
        return [int(cell) for cell in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{field}: expected counts like '3', '2,3' or '2..5': {text!r}") from exc


def parse_pairs(text: str, *, field: str = "matrix_elements") -> list[tuple[int, int]]:
    """Level pairs as '0-1,1-2'."""
    pairs = []
    for cell in text.split(","):
        cell = cell.strip()
        if not cell:
            continue
        try:
            i_text, j_text = cell.split("-", 1)
            pairs.append((int(i_text), int(j_text)))
        except ValueError as exc:
            raise ConfigError(f"{field}: expected pairs like '0-1,1-2': {text!r}") from exc
    return pairs


def parse_labels(text: str, *, field: str = "labels") -> tuple[str, ...]:
    labels = tuple(cell.strip() for cell in text.split(",") if cell.strip())
    if not labels:
        raise ConfigError(f"{field}: no transition labels given")
    return labels


# ---------------------------------------------------------------------------
# domain objects from documents


def circuit_from_config(cfg: RunConfig, section: str = "circuit") -> CircuitParams:
    try:
        return CircuitParams(
            ej1=cfg.get_float(section, "ej1"),
            ej2=cfg.get_float(section, "ej2"),
            ecj=cfg.get_float(section, "ecj"),
            ec=cfg.get_float(section, "ec"),
            gap=cfg.get_float(section, "gap"),
        )
    except ValueError as exc:
        raise ConfigError(f"section [{section}]: {exc}") from exc


def channels_from_config(cfg: RunConfig, section: str = "channels") -> NanowireChannels:
    if not cfg.has_section(section):
        return NanowireChannels(())
    text = cfg.get_str(section, "transmissions", default="")
    try:
        return NanowireChannels(tuple(parse_float_list(text, field=f"{section}.transmissions")))
    except ValueError as exc:
        raise ConfigError(f"field {section}.transmissions: {exc}") from exc


def flux_from_config(cfg: RunConfig, section: str = "flux") -> FluxBias:
    value = cfg.get_float(section, "phi_e", default=0.0)
    return FluxBias.from_phi0(value)


def write_params_document(
    params: CircuitParams,
    channels: NanowireChannels,
    flux: FluxBias,
    path: str,
) -> None:
    """Serialize a parameter set (energies GHz, flux in flux quanta)."""
    lines = [
        "[circuit]",
        f"ej1 = {fmt(params.ej1)}",
        f"ej2 = {fmt(params.ej2)}",
        f"ecj = {fmt(params.ecj)}",
        f"ec = {fmt(params.ec)}",
        f"gap = {fmt(params.gap)}",
        "",
        "[channels]",
        "transmissions = " + ", ".join(fmt(t) for t in channels),
        "",
        "[flux]",
        f"phi_e = {fmt(flux.phi0_units)}",
        "",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))


def read_params_document(path: str) -> tuple[CircuitParams, NanowireChannels, FluxBias]:
    cfg = load_config(path)
    return circuit_from_config(cfg), channels_from_config(cfg), flux_from_config(cfg)


def read_gate_channels(cfg: RunConfig, section: str = "gates") -> list[tuple[float, NanowireChannels]]:
    """Per-gate channel lists from a [gates] section or gate:* sections.

    The [gates] form maps each gate tag to a transmission list; fit
    result documents instead carry one [gate:<tag>] section per gate
    with a ``transmissions`` field. Both are accepted.
    """
    gates: list[tuple[float, NanowireChannels]] = []
    if cfg.has_section(section):
        for key, value in cfg.items(section):
            try:
                gate = float(key)
            except ValueError as exc:
                raise ConfigError(f"section [{section}]: gate tag {key!r} is not a number") from exc
            gates.append((gate, NanowireChannels(tuple(parse_float_list(value, field=f"{section}.{key}")))))
    for name in cfg.sections():
        if name.startswith("gate:"):
            try:
                gate = float(name[5:])
            except ValueError as exc:
                raise ConfigError(f"section [{name}]: gate tag is not a number") from exc
            text = cfg.get_str(name, "transmissions", default="")
            gates.append((gate, NanowireChannels(tuple(parse_float_list(text, field=f"{name}.transmissions")))))
    gates.sort(key=lambda item: item[0])
    return gates
