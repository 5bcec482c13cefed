"""Small helpers for dict-based sparse linear combinations."""

from itertools import product


def add_term(store, key, coeff):
    if not coeff:
        return
    new = store.get(key, 0) + coeff
    if new:
        store[key] = new
    else:
        store.pop(key, None)


def add_into(store, other, scale=1):
    for key, c in other.items():
        add_term(store, key, scale * c if scale != 1 else c)


def combo_sub(a, b):
    out = dict(a)
    add_into(out, b, -1)
    return out


def scaled(store, scale):
    out = {}
    for key, c in store.items():
        add_term(out, key, scale * c)
    return out


def all_words(dim, max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        for w in product(range(dim), repeat=n):
            yield w


def nested_nonzero(store):
    """Drop empty inner maps of a dict-of-dicts."""
    return {k: v for k, v in store.items() if v}
