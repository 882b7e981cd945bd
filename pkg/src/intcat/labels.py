"""Canonical element labels.

Atoms are strings chosen by the user. Every constructed element is a nested
tuple: ``(x, y)`` for a pair, ``("inl", x)`` / ``("inr", y)`` for coproduct
injections, ``("fam", ((key, value), ...))`` for a function family with
canonically sorted entries, ``("pt", ((index_obj, value), ...))`` for a
global element. Equality of elements is structural equality of labels, so
rebuilding a construction from equal inputs yields identical labels.
"""

from __future__ import annotations

Label = "str | tuple"


def sort_key(label) -> str:
    """Total deterministic order on labels (atoms and tuples alike)."""
    return repr(label)


def fam(items) -> tuple:
    """Function-family label from (key, value) pairs, entries sorted by key."""
    return ("fam", tuple(sorted(items, key=lambda kv: sort_key(kv[0]))))


def fam_dict(label) -> dict:
    """The family label as a lookup table."""
    assert isinstance(label, tuple) and label[0] == "fam"
    return dict(label[1])


def show(label) -> str:
    """Deterministic human rendering of a label."""
    if isinstance(label, str):
        return label
    if label and label[0] == "fam":
        inner = ", ".join(f"{show(k)}=>{show(v)}" for k, v in label[1])
        return "{" + inner + "}"
    if label and label[0] == "pt":
        inner = ", ".join(f"{show(c)}:{show(v)}" for c, v in label[1])
        return "<" + inner + ">"
    return "(" + ", ".join(show(part) for part in label) + ")"
