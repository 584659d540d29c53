"""Named parameter sets shipped with the package."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .algebra.group import TINY_GROUP, default_group, load_group_params
from .idcore import LinearIdScheme
from .rlwe import desk_scheme
from .schnorr import SchnorrScheme

PRESETS = ("schnorr-tiny", "schnorr-desk", "schnorr-2048", "rlwe-desk")


@lru_cache(maxsize=None)
def preset(name: str) -> LinearIdScheme:
    if name == "schnorr-tiny":
        return SchnorrScheme(TINY_GROUP)
    if name == "schnorr-desk":
        text = resources.files("lsig.data").joinpath("schnorr-desk.params").read_text()
        return SchnorrScheme(load_group_params(text))
    if name == "schnorr-2048":
        return SchnorrScheme(default_group())
    if name == "rlwe-desk":
        return desk_scheme()
    raise KeyError(f"unknown parameter preset {name!r}; choose from {', '.join(PRESETS)}")
