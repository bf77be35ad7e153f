"""JSON round-tripping for Bernstein functions and their measures."""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError

SCHEMA_VERSION = 1

RAW_FUNCTIONS = {
    # not Bernstein: used to exercise the negative verdicts
    "square": lambda z: z[..., 0] ** 2,
    "neg_square": lambda z: -z[..., 0] ** 2,
    "linear_positive": lambda z: -z[..., 0],
}


def measure_to_dict(m) -> dict:
    return {"variant": m.variant, "payload": m.payload()}


def measure_from_dict(d: dict):
    from . import bernstein as bc

    try:
        variant, p = d["variant"], d["payload"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed measure record: {exc}") from exc
    if variant == "Atoms":
        return bc.Atoms(np.asarray(p["locations"], float), np.asarray(p["weights"], float))
    if variant == "GridDensity":
        vals = np.asarray(p["values"], float).reshape(p["shape"])
        tail = p.get("tail")
        tail = None if tail is None else bc.TailDescriptor(float(tail["exponent"]), float(tail["rate"]))
        return bc.GridDensity(float(p["U"]), float(p["h"]), vals, tail)
    if variant == "Sum":
        return bc.SumMeasure(tuple((float(t["coef"]), measure_from_dict(t["measure"])) for t in p["terms"]))
    if variant == "ClosedForm":
        fam = p.get("family")
        if fam == "example1":
            return bc.Example1Measure(psi_from_dict(p["base"]))
        a = p.get("direction", [1.0])
        if fam == "stable":
            return bc.make_stable(float(p["alpha"]), a).measure
        if fam == "gamma":
            return bc.make_gamma(a).measure
        if fam == "tempered":
            return bc.make_tempered(float(p["alpha"]), float(p["lam"]), float(p.get("C", 1.0)), a).measure
        raise ConfigError(f"unknown closed-form family {fam!r}")
    raise ConfigError(f"unknown measure variant {variant!r}")


def psi_to_dict(psi) -> dict:
    from .bernstein import RawFunction

    if isinstance(psi, RawFunction):
        if psi.label not in RAW_FUNCTIONS:
            raise ConfigError(f"raw function {psi.label!r} is not serializable")
        return {"schema": SCHEMA_VERSION, "n": psi.n, "raw": psi.label}
    return {"schema": SCHEMA_VERSION, "n": psi.n, "c0": psi.c0, "c1": psi.c1.tolist(),
            "label": psi.label, "measure": measure_to_dict(psi.measure)}


def psi_from_dict(d: dict):
    from . import bernstein as bc

    if d.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {d.get('schema')}")
    if "raw" in d:
        name = d["raw"]
        if name not in RAW_FUNCTIONS:
            raise ConfigError(f"unknown raw function {name!r}")
        return bc.RawFunction(int(d.get("n", 1)), RAW_FUNCTIONS[name], name)
    if "family" in d:
        return family_from_dict(d)
    try:
        m = measure_from_dict(d["measure"])
        return bc.BernsteinFunction(int(d["n"]), m, float(d.get("c0", 0.0)),
                                    d.get("c1"), d.get("label", ""))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc}") from exc


def family_from_dict(d: dict):
    """Short form such as ``{"family": "stable", "alpha": 0.5}``."""
    from . import bernstein as bc

    fam = d["family"]
    a = d.get("direction", [1.0] * int(d.get("n", 1)))
    if fam == "stable":
        return bc.make_stable(float(d["alpha"]), a)
    if fam == "gamma":
        return bc.make_gamma(a)
    if fam == "tempered":
        return bc.make_tempered(float(d["alpha"]), float(d["lam"]), float(d.get("C", 1.0)), a)
    if fam == "atoms":
        return bc.make_atoms(d["locations"], d["weights"])
    if fam == "example1":
        return bc.make_example1(psi_from_dict(d["base"]))
    if fam == "sum":
        return bc.linear_combine([(float(t["coef"]), psi_from_dict(t["psi"])) for t in d["terms"]])
    raise ConfigError(f"unknown family {fam!r}")


def dumps(psi) -> str:
    return json.dumps(psi_to_dict(psi), indent=2)


def loads(text: str):
    return psi_from_dict(json.loads(text))
