"""Named simulation scenarios used by the benchmarks.

All presets use p = 10 nodes and three segments. sim1* draw a fresh network
per segment (Erdos-Renyi / scale-free / small-world); sim2* additionally make
the third segment's network identical to the first (cyclic task structure);
sim3* shrink the segment length to stress the observations-per-parameter
ratio (set via seglen).
"""

from __future__ import annotations

from .simgen import EdgeStrengthLaw, GraphModel, Segment, SimScenario

PRESET_NAMES = ("sim1a", "sim1b", "sim1c", "sim2a", "sim2b", "sim2c",
                "sim3a", "sim3b")

_ER = dict(kind="erdos_renyi", theta=0.1)
_BA = dict(kind="barabasi_albert", power=1.0)
_WS = dict(kind="watts_strogatz", beta=0.75, base_degree=2)

_FIXED = EdgeStrengthLaw("fixed", value=0.6)
_UNIFORM = EdgeStrengthLaw("uniform_symmetric", lo=0.25, hi=0.5)

_MODELS = {
    "sim1a": (_ER, _FIXED, False),
    "sim1b": (_BA, _UNIFORM, False),
    "sim1c": (_WS, _UNIFORM, False),
    "sim2a": (_ER, _FIXED, True),
    "sim2b": (_BA, _UNIFORM, True),
    "sim2c": (_WS, _UNIFORM, True),
    "sim3a": (_BA, _UNIFORM, False),
    "sim3b": (_WS, _UNIFORM, False),
}


def preset(name: str, seed: int = 0, seglen: int | None = None,
           p: int = 10, ar: float = 0.3) -> SimScenario:
    """Build a named scenario.

    seglen applies to sim3a/sim3b (default 100 there); sim1*/sim2* are fixed
    at three segments of length 100.
    """
    if name not in _MODELS:
        raise ValueError(
            f"unknown scenario {name!r}; presets: {', '.join(PRESET_NAMES)}")
    model_kw, law, cyclic = _MODELS[name]
    if name.startswith("sim3"):
        length = 100 if seglen is None else int(seglen)
        if not 2 <= length:
            raise ValueError(f"seglen must be >= 2, got {length}")
    else:
        if seglen is not None:
            raise ValueError(f"{name} has a fixed segment length of 100")
        length = 100
    model = GraphModel(p=p, **model_kw)
    segments = tuple(Segment(model, law, length) for _ in range(3))
    return SimScenario(segments, cyclic=cyclic, ar=ar, seed=seed)
