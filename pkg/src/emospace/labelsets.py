"""Built-in emotion keyword sets.

Theory names map to the keyword forms that were actually harvested, so
``fear`` appears as ``scared`` and ``distress`` as ``stressed``.
"""

from .corpus import LabelSet

ALL21 = (
    "accepting", "angry", "anticipating", "anxious", "ashamed", "contempt",
    "depressed", "disgusted", "excited", "guilty", "happy", "interested",
    "joyful", "miserable", "pleased", "relaxed", "sad", "scared", "sleepy",
    "stressed", "surprised",
)

_SETS = {
    "izard": ("angry", "ashamed", "contempt", "disgusted", "guilty",
              "interested", "joyful", "scared", "stressed", "surprised"),
    "russell": ("angry", "depressed", "excited", "miserable", "pleased",
                "relaxed", "sleepy", "stressed"),
    "plutchik": ("accepting", "angry", "anticipating", "disgusted", "joyful",
                 "sad", "scared", "surprised"),
    "ekman": ("angry", "disgusted", "joyful", "sad", "scared", "surprised"),
    "tomkins": ("angry", "ashamed", "contempt", "disgusted", "interested",
                "joyful", "scared", "stressed", "surprised"),
    "oatley": ("angry", "anxious", "disgusted", "happy", "sad"),
    "all21": ALL21,
    # sets derived by reduction / cohesion ranking on the original harvest
    "delsar-derived": ("accepting", "ashamed", "contempt", "interested",
                       "joyful", "pleased", "sleepy", "stressed"),
    "elsa-derived": ("accepting", "anxious", "ashamed", "contempt", "joyful",
                     "miserable", "pleased", "stressed"),
}

THEORIES = ("izard", "russell", "plutchik", "ekman", "tomkins", "oatley")


def builtin_names():
    return tuple(_SETS)


def get_labelset(name: str) -> LabelSet:
    try:
        return LabelSet(name, _SETS[name.lower()])
    except KeyError:
        raise KeyError(f"unknown label set {name!r}; known: {', '.join(_SETS)}") from None


def resolve_labelset(spec) -> LabelSet:
    """Accept a built-in name, a comma-separated member list, or a LabelSet."""
    if isinstance(spec, LabelSet):
        return spec
    if isinstance(spec, (list, tuple)):
        return LabelSet("custom", tuple(spec))
    if spec.lower() in _SETS:
        return get_labelset(spec)
    members = tuple(m.strip() for m in spec.split(",") if m.strip())
    if len(members) < 2 and "," not in spec:
        raise KeyError(f"unknown label set {spec!r}")
    return LabelSet("custom", members)
