"""JSON and CSV formats: signal specs, decomposition exports, iteration logs."""

from __future__ import annotations

import csv
import io as _io
import json
import re
from pathlib import Path
from typing import Any

import numpy as np

from .errors import BandViolation, ParseError, SchemaError
from .gram import Decomposition
from .rkhs import (
    DictionaryElement,
    KernelCombination,
    SignalSpec,
    SpaceModel,
    Spectrum,
    TaylorPolynomial,
)

CSV_HEADER = ["n", "point_re", "point_im", "order", "gain", "residual_energy",
              "bvc_ratio_at_selected"]
_VARIANTS = {"hardy": ("taylor", "kernels"), "pw": ("kernels", "spectrum")}


def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return ""
    return f"line {text.count(chr(10), 0, m.start()) + 1}: "


def _complex(value, where: str) -> complex:
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        z = complex(float(value[0]), float(value[1]))
        if np.isfinite(z.real) and np.isfinite(z.imag):
            return z
    raise SchemaError(f"{where}: expected a finite [re, im] pair, got {value!r}")


def _to_pair(z: complex) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def space_from_dict(obj: dict, text: str | None = None) -> SpaceModel:
    kind = obj.get("space")
    if kind not in _VARIANTS:
        raise SchemaError(f'{_line_of(text, "space")}"space" must be "hardy" or "pw", got {kind!r}')
    if kind == "hardy":
        return SpaceModel.hardy()
    h = obj.get("h", 1.0)
    if isinstance(h, bool) or not isinstance(h, (int, float)) or not h > 0:
        raise SchemaError(f'{_line_of(text, "h")}"h" must be a positive number')
    return SpaceModel.paley_wiener(float(h))


def element_from_dict(item: Any, where: str) -> DictionaryElement:
    if not isinstance(item, dict) or "center" not in item:
        raise SchemaError(f"{where}: expected an object with a \"center\"")
    order = item.get("order", 0)
    if isinstance(order, bool) or not isinstance(order, int) or order < 0:
        raise SchemaError(f"{where}: \"order\" must be a nonnegative integer")
    return DictionaryElement(_complex(item["center"], where + ".center"), order)


def signal_from_dict(obj: Any, text: str | None = None) -> SignalSpec:
    """Validate a SignalSpec JSON object."""
    if not isinstance(obj, dict):
        raise SchemaError("signal spec must be a JSON object")
    space = space_from_dict(obj, text)
    variant = obj.get("variant")
    if variant not in ("taylor", "kernels", "spectrum"):
        raise SchemaError(f'{_line_of(text, "variant")}unknown variant {variant!r}')
    if variant not in _VARIANTS[space.kind]:
        raise SchemaError(
            f'{_line_of(text, "variant")}variant "{variant}" is not allowed '
            f'in space "{space.kind}"'
        )
    data = obj.get("data")
    if not isinstance(data, list):
        raise SchemaError(f'{_line_of(text, "data")}"data" must be a list')
    try:
        if variant == "taylor":
            return TaylorPolynomial(space, [_complex(c, f"data[{i}]") for i, c in enumerate(data)])
        if variant == "kernels":
            terms = []
            for i, item in enumerate(data):
                e = element_from_dict(item, f"data[{i}]")
                terms.append((e, _complex(item.get("coeff"), f"data[{i}].coeff")))
            return KernelCombination(space, tuple(terms))
        t, F = [], []
        for i, item in enumerate(data):
            if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], (int, float)):
                raise SchemaError(f"data[{i}]: expected [t, [re, im]]")
            t.append(float(item[0]))
            F.append(_complex(item[1], f"data[{i}][1]"))
        return Spectrum(space, tuple(t), tuple(F))
    except (SchemaError, BandViolation):
        raise
    except ValueError as exc:
        raise SchemaError(f'{_line_of(text, "data")}{exc}') from exc


def signal_to_dict(f: SignalSpec) -> dict:
    out: dict = {"space": f.space.kind}
    if not f.space.is_hardy:
        out["h"] = f.space.h
    if isinstance(f, TaylorPolynomial):
        out.update(variant="taylor", data=[_to_pair(c) for c in f.coeffs])
    elif isinstance(f, KernelCombination):
        out.update(variant="kernels", data=[
            {"center": _to_pair(e.center), "order": e.order, "coeff": _to_pair(c)}
            for e, c in f.terms
        ])
    else:
        out.update(variant="spectrum", data=[[t, _to_pair(v)] for t, v in zip(f.t, f.values)])
    return out


def _read_json(path) -> tuple:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def parse_signal_spec(path) -> SignalSpec:
    obj, text = _read_json(path)
    try:
        return signal_from_dict(obj, text)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def parse_points_file(path) -> list:
    """Fixed-mode element list: ``[{"center":[re,im],"order":m}, ...]`` or
    bare ``[[re, im], ...]`` pairs (orders then follow multiplicity)."""
    from .greedy import elements_from_points

    obj, _ = _read_json(path)
    if isinstance(obj, dict):
        obj = obj.get("elements")
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{path}: expected a nonempty list of points or elements")
    if all(isinstance(item, dict) for item in obj):
        return [element_from_dict(item, f"{path}[{i}]") for i, item in enumerate(obj)]
    return elements_from_points([_complex(item, f"{path}[{i}]") for i, item in enumerate(obj)])


def decomposition_to_dict(d: Decomposition) -> dict:
    return {
        "elements": [{"center": _to_pair(e.center), "order": e.order} for e in d.elements],
        "kernel_coeffs": [_to_pair(c) for c in d.kernel_coeffs],
        "ortho_coeffs": [_to_pair(c) for c in d.ortho_coeffs],
        "energy_track": [float(x) for x in d.energy_track],
        "norm_sq_f": float(d.norm_sq_f),
    }


def decomposition_from_dict(obj: dict, space: SpaceModel) -> Decomposition:
    try:
        elements = tuple(element_from_dict(e, f"elements[{i}]") for i, e in enumerate(obj["elements"]))
        coeffs = np.array([_complex(c, "kernel_coeffs") for c in obj["kernel_coeffs"]], complex)
        ortho = np.array([_complex(c, "ortho_coeffs") for c in obj["ortho_coeffs"]], complex)
        return Decomposition(space, elements, coeffs, ortho,
                             tuple(float(x) for x in obj["energy_track"]), float(obj["norm_sq_f"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed decomposition: {exc}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_decomposition(path, d: Decomposition) -> None:
    Path(path).write_text(dumps(decomposition_to_dict(d)))


def load_decomposition(path, space: SpaceModel) -> Decomposition:
    obj, _ = _read_json(path)
    return decomposition_from_dict(obj, space)


def decomposition_signal(d: Decomposition) -> KernelCombination:
    """Re-import an exported approximant as a kernel combination."""
    return KernelCombination(d.space, tuple(zip(d.elements, d.kernel_coeffs)))


def iteration_csv(d: Decomposition) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in d.log:
        writer.writerow([r.n, repr(float(r.point.real)), repr(float(r.point.imag)), r.order,
                         repr(float(r.gain)), repr(float(r.residual_energy)),
                         repr(float(r.bvc_ratio))])
    return buf.getvalue()
