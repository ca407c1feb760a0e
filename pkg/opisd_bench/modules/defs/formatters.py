import dataclasses
import re


def format_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_params(params) -> str:
    """Parameter fingerprint used as the archive's param_cell, e.g. `alpha=0.95;n_w=10`."""
    if params is None:
        return ""
    items = dataclasses.asdict(params) if dataclasses.is_dataclass(params) else dict(params)
    return ";".join(f"{k}={format_value(v)}" for k, v in items.items())


def format_open_branches(net, cfg) -> str:
    return "" if cfg is None else cfg.key(net)


def parse_open_branches(text) -> frozenset:
    if text is None or (isinstance(text, float) and text != text) or text == "":
        return frozenset()
    return frozenset(str(text).split(";"))


def clean_label(label: str) -> str:
    """File-name safe version of a solver label."""
    return re.sub(r"[\\/ :*?\"<>|]", "_", label.strip())
