"""Sign strings, state strings and closed paths in the SL(3) weight lattice.

Weights are integer pairs in the basis of the two fundamental weights
(mu_plus, mu_minus).  A sign string picks, at each step, either the weights
of the fundamental representation (+) or of its dual (-); the state -1, 0 or
1 picks one of the three weights.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

PLUS, MINUS = "+", "-"

# weight of each (sign, state); the basis is (mu_plus, mu_minus)
STEP = {
    ("+", 1): (1, 0),
    ("+", 0): (-1, 1),
    ("+", -1): (0, -1),
    ("-", 1): (0, 1),
    ("-", 0): (1, -1),
    ("-", -1): (-1, 0),
}


class PathError(ValueError):
    pass


def parse_signs(text) -> tuple:
    """Accept '+-+', '+,-,+' or an iterable of '+'/'-' (also 1/-1)."""
    if isinstance(text, str):
        chars = [c for c in text if c not in ", ()[]"]
    else:
        chars = list(text)
    out = []
    for c in chars:
        if c in ("+", 1, "1"):
            out.append(PLUS)
        elif c in ("-", "−", -1, "-1"):
            out.append(MINUS)
        else:
            raise PathError(f"bad sign {c!r}")
    return tuple(out)


def parse_states(text) -> tuple:
    """Accept '-1,0,1', '(-1 0 1)' or an iterable of integers."""
    if isinstance(text, str):
        cleaned = text.replace("(", " ").replace(")", " ").replace(",", " ").replace("−", "-")
        vals = [int(x) for x in cleaned.split()]
    else:
        vals = [int(x) for x in text]
    if any(v not in (-1, 0, 1) for v in vals):
        raise PathError("states must be -1, 0 or 1")
    return tuple(vals)


def render_signs(signs) -> str:
    return "".join(signs)


def render_states(states) -> str:
    return "(" + ",".join(str(j) for j in states) + ")"


def n_plus(signs):
    return sum(1 for s in signs if s == PLUS)


def n_minus(signs):
    return sum(1 for s in signs if s == MINUS)


def signs_admissible(signs) -> bool:
    return (n_plus(signs) - n_minus(signs)) % 3 == 0


def path_of(signs, states):
    """Lattice points pi_0 = 0, ..., pi_n visited by the (sign, state) pair."""
    signs, states = tuple(signs), tuple(states)
    if len(signs) != len(states):
        raise PathError("sign and state strings have different lengths")
    pts = [(0, 0)]
    x, y = 0, 0
    for s, j in zip(signs, states):
        dx, dy = STEP[(s, j)]
        x, y = x + dx, y + dy
        pts.append((x, y))
    return pts


def is_admissible(signs, states) -> bool:
    return path_of(signs, states)[-1] == (0, 0)


def rotate_pair(signs, states, k):
    """Move the basepoint k positions to the right."""
    k %= max(1, len(signs))
    return tuple(signs[k:]) + tuple(signs[:k]), tuple(states[k:]) + tuple(states[:k])


def negate_pair(signs, states):
    """Reverse every orientation.  The weight of (-s, -j) is minus that of (s, j)."""
    flip = {PLUS: MINUS, MINUS: PLUS}
    return tuple(flip[s] for s in signs), tuple(-j for j in states)


def _reachable(signs):
    """For each suffix start k, the set of displacements the suffix can produce."""
    n = len(signs)
    sets = [None] * (n + 1)
    sets[n] = {(0, 0)}
    for k in range(n - 1, -1, -1):
        nxt = sets[k + 1]
        cur = set()
        for j in (-1, 0, 1):
            dx, dy = STEP[(signs[k], j)]
            for x, y in nxt:
                cur.add((x + dx, y + dy))
        sets[k] = cur
    return sets


def enumerate_states(signs):
    """All state strings J with (S, J) admissible, in lexicographic order (-1 < 0 < 1).

    Depth-first over lattice positions, pruned by what the remaining steps can reach.
    """
    signs = parse_signs(signs)
    reach = _reachable(signs)
    n = len(signs)
    out = []

    def walk(k, pos, prefix):
        if k == n:
            if pos == (0, 0):
                out.append(tuple(prefix))
            return
        for j in (-1, 0, 1):
            dx, dy = STEP[(signs[k], j)]
            nxt = (pos[0] + dx, pos[1] + dy)
            if (-nxt[0], -nxt[1]) in reach[k + 1]:
                prefix.append(j)
                walk(k + 1, nxt, prefix)
                prefix.pop()

    if (0, 0) in reach[0]:
        walk(0, (0, 0), [])
    return out


def trinomial(n, a, b, c):
    if a < 0 or b < 0 or c < 0 or a + b + c != n:
        return 0
    return factorial(n) // (factorial(a) * factorial(b) * factorial(c))


def hull_count(n_p, n_m):
    """Sum over lattice points (a1, a2) of the triangle with corners (0,0), (n_p,0), (0,n_p).

    Each term is the trinomial coefficient for the + steps times the one for
    the - steps shifted by (n_p - n_m) / 3; strings with n_p - n_m not
    divisible by 3 have no closed paths.
    """
    if (n_p - n_m) % 3:
        return 0
    d = (n_p - n_m) // 3
    total = 0
    for a1 in range(n_p + 1):
        for a2 in range(n_p - a1 + 1):
            a3 = n_p - a1 - a2
            total += trinomial(n_p, a1, a2, a3) * trinomial(n_m, a1 - d, a2 - d, a3 - d)
    return total


def honeycomb_count(n):
    """Closed walks of length 2n on the honeycomb lattice."""
    return sum(comb(2 * k, k) * comb(n, k) ** 2 for k in range(n + 1))


@lru_cache(maxsize=None)
def _count_cached(n_p, n_m):
    return hull_count(n_p, n_m)


def count_closed_paths(signs) -> int:
    """Closed S-paths, via the hull-sum formula.

    The count depends only on the numbers of + and - signs.  When they are
    equal the honeycomb formula is evaluated as well and the two must agree.
    """
    signs = parse_signs(signs)
    n_p, n_m = n_plus(signs), n_minus(signs)
    value = _count_cached(n_p, n_m)
    if n_p == n_m and value != honeycomb_count(n_p):
        raise AssertionError("hull formula and honeycomb formula disagree")
    return value


def all_sign_strings(length):
    from itertools import product

    return [tuple(s) for s in product((PLUS, MINUS), repeat=length)]
