"""Named experiment configurations.

Bernoulli presets carry their competency vectors directly.  The language
model presets replay per-domain accuracies of nine models as Bernoulli
experts and are flagged as replays in run metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

MODEL_ACCURACY: Dict[str, Dict[str, float]] = {
    "aya": {"gsm8k": 0.0771, "commonsenseqa": 0.0920, "boolq": 0.4300},
    "mistral-openorca": {"gsm8k": 0.1290, "commonsenseqa": 0.1280, "boolq": 0.1040},
    "samantha-mistral": {"gsm8k": 0.1569, "commonsenseqa": 0.1850, "boolq": 0.1130},
    "notus": {"gsm8k": 0.2553, "commonsenseqa": 0.2290, "boolq": 0.0391},
    "qwen-14b": {"gsm8k": 0.3125, "commonsenseqa": 0.3266, "boolq": 0.4898},
    "mistral": {"gsm8k": 0.4388, "commonsenseqa": 0.4320, "boolq": 0.6531},
    "gemma-7b": {"gsm8k": 0.4707, "commonsenseqa": 0.6268, "boolq": 0.5510},
    "deepseek-r1-14b": {"gsm8k": 0.7952, "commonsenseqa": 0.7383, "boolq": 0.7143},
    "phi4": {"gsm8k": 0.9269, "commonsenseqa": 0.7890, "boolq": 0.7163},
}


@dataclass(frozen=True)
class Preset:
    config_id: str
    algo: str
    p: Tuple[float, ...]
    horizon: int
    baseline: Optional[str]
    domain: str = "Bernoulli"
    names: Tuple[str, ...] = ()

    @property
    def replay(self) -> bool:
        return bool(self.names)

    @property
    def resolve_period(self) -> int:
        return 1 if len(self.p) <= 5 else 10


def _models(domain: str, names: Tuple[str, ...]) -> Tuple[float, ...]:
    return tuple(MODEL_ACCURACY[n][domain] for n in names)


_SE = {
    1: (0.1, 0.65, 0.77, 0.79, 0.8),
    2: (0.12, 0.23, 0.31, 0.37, 0.42, 0.49, 0.55, 0.63, 0.68, 0.72, 0.76, 0.81, 0.87, 0.92, 0.98),
    3: (0.04, 0.07, 0.09, 0.12, 0.15, 0.19, 0.22, 0.26, 0.30, 0.33,
        0.70, 0.73, 0.76, 0.78, 0.81, 0.84, 0.86, 0.89, 0.90, 0.91),
}
_WV = {
    1: (0.332, 0.775, 0.881),
    2: (0.388, 0.561, 0.782, 0.799, 0.803, 0.841),
    3: (0.261, 0.370, 0.382, 0.499, 0.503, 0.511, 0.542, 0.616, 0.634),
}
_WS = {
    4: (0.763, 0.786, 0.8492),
    5: (0.435, 0.501, 0.667, 0.714, 0.792),
    6: (0.121, 0.232, 0.319, 0.374, 0.428, 0.498, 0.552, 0.637, 0.681),
}
_ALL9 = ("aya", "mistral-openorca", "samantha-mistral", "notus", "qwen-14b",
         "mistral", "gemma-7b", "deepseek-r1-14b", "phi4")
_WG = {
    1: ("notus", "qwen-14b", "mistral"),
    2: ("samantha-mistral", "notus", "qwen-14b", "mistral", "gemma-7b", "deepseek-r1-14b"),
    3: _ALL9,
}
_CS = {
    1: ("gemma-7b", "phi4", "deepseek-r1-14b"),
    2: ("mistral", "qwen-14b", "gemma-7b", "phi4", "deepseek-r1-14b"),
    3: ("aya", "mistral-openorca", "samantha-mistral", "notus", "mistral",
        "qwen-14b", "gemma-7b", "phi4", "deepseek-r1-14b"),
}
_WB = {
    1: ("mistral", "gemma-7b", "deepseek-r1-14b", "phi4"),
    2: ("qwen-14b", "mistral", "gemma-7b", "deepseek-r1-14b", "phi4"),
    3: ("samantha-mistral", "qwen-14b", "mistral-openorca", "notus", "aya",
        "mistral", "gemma-7b", "deepseek-r1-14b", "phi4"),
}


def _build() -> Dict[str, Preset]:
    out: Dict[str, Preset] = {}

    def pair(main: str, other: str, algo: str, other_algo: str, p, horizon, domain="Bernoulli", names=()):
        out[main] = Preset(main, algo, tuple(p), horizon, other_algo, domain, tuple(names))
        out[other] = Preset(other, other_algo, tuple(p), horizon, None, domain, tuple(names))

    for k, p in _SE.items():
        pair(f"SE{k}", f"SC{k}", "see", "cucb", p, 10_000)
    for k, p in _WV.items():
        pair(f"WV{k}", f"WZ{k}", "wmv", "zooming", p, 2000)
    for k, p in _WS.items():
        pair(f"WS{k}", f"WE{k}", "wmv", "see", p, 1000)
    for k, names in _WG.items():
        pair(f"WG{k}", f"ZG{k}", "wmv", "zooming", _models("gsm8k", names), 10_000, "GSM8K", names)
    for k, names in _CS.items():
        pair(f"CS{k}", f"CC{k}", "see", "cucb", _models("commonsenseqa", names), 10_000,
             "CommonsenseQA", names)
    for k, names in _WB.items():
        pair(f"WB{k}", f"ZB{k}", "wmv", "zooming", _models("boolq", names), 1000, "BoolQ", names)
    return out


PRESETS: Dict[str, Preset] = _build()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
