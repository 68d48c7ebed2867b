"""Kernel backend selection.

The compiled Cython kernels are used when the extension imports; otherwise
the numpy fallback in :mod:`gelu_lab._fallback` takes over. Set
``GELU_LAB_BACKEND=python`` to force the fallback, or ``compiled`` to make a
missing extension an import error.
"""

import os

import numpy as np

from gelu_lab import _fallback

_choice = os.environ.get("GELU_LAB_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"GELU_LAB_BACKEND must be auto, python or compiled, got {_choice!r}")

_compiled = None
if _choice != "python":
    try:
        from gelu_lab import _kernels as _compiled
    except ImportError:
        if _choice == "compiled":
            raise

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

NAME = "compiled" if _compiled is not None else "python"
_active = BACKENDS[NAME]


def use(name):
    """Switch the active kernel set at runtime (used by tests and benchmarks)."""
    global NAME, _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    NAME, _active = name, BACKENDS[name]


def _run(kernel, x, *args):
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr).reshape(-1)
    out = np.empty_like(flat)
    getattr(_active, kernel)(flat, *args, out)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def erf(x):
    return _run("erf", x)


def erfc(x):
    return _run("erfc", x)


def normal_cdf(x):
    return _run("normal_cdf", x)


def normal_pdf(x):
    return _run("normal_pdf", x)


def gelu_forward(x, mu, sigma):
    return _run("gelu_forward", x, float(mu), float(sigma))


def gelu_grad(x, mu, sigma):
    return _run("gelu_grad", x, float(mu), float(sigma))


def adam_update(p, g, m, v, beta1, beta2, step, inv_sqrt_bc2, eps):
    """Fused in-place Adam update of ``p``, ``m`` and ``v`` (all C-contiguous float64)."""
    flat = []
    for a in (p, m, v):
        if a.dtype != np.float64 or not a.flags.c_contiguous:
            raise ValueError("adam_update needs C-contiguous float64 parameter and moment arrays")
        flat.append(a.reshape(-1))
    g = np.ascontiguousarray(g, dtype=np.float64).reshape(-1)
    if g.shape != flat[0].shape:
        raise ValueError(f"shape mismatch: param {p.shape} vs grad size {g.size}")
    pf, mf, vf = flat
    _active.adam_update(pf, g, mf, vf, float(beta1), float(beta2), float(step),
                        float(inv_sqrt_bc2), float(eps))
