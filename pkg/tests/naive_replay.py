"""Independent brute-force replay of the tower recursion.

Deliberately shares no code with the package: sets are plain Python sets of
integers, sumsets are double loops, densities are Fractions from explicit
counts.  Used as the oracle for the construction tests.
"""

from fractions import Fraction


def naive_sumset(h_set, cover, modulus):
    return {(a + c) % modulus for a in h_set for c in cover}


def naive_cover(b_values, modulus):
    return {b % modulus for b in b_values}


def naive_replay(b_values, alpha, depth):
    """Levels as dicts with keys n, modulus, H, h, k, densityA, L, U."""
    alpha = Fraction(alpha)
    levels = [{
        "n": 1, "modulus": 1, "H": {0}, "h": 0, "k": None,
        "densityA": Fraction(1), "L": Fraction(0), "U": Fraction(1),
    }]
    fact = 1
    for n in range(2, depth + 1):
        prev = levels[-1]
        m = n - 1
        big = fact * n
        cover = naive_cover(b_values, big)
        h_prime = prev["H"] - {prev["h"]}
        base = {r + t * fact for r in h_prime for t in range(n)}
        current = naive_sumset(base, cover, big)
        base_density = Fraction(len(current), big)
        densities = []
        for j in range(m + 1):
            current |= naive_sumset({prev["h"] + j * fact}, cover, big)
            densities.append(Fraction(len(current), big))
        k = next(j for j, d in enumerate(densities) if d > alpha)
        new_h_set = base | {prev["h"] + j * fact for j in range(k + 1)}
        levels.append({
            "n": n, "modulus": big, "H": new_h_set,
            "h": prev["h"] + k * fact, "k": k,
            "densityA": Fraction(len(new_h_set), big),
            "L": densities[k - 1] if k > 0 else base_density,
            "U": densities[k],
        })
        fact = big
    return levels


def materialize(h_set, modulus, bound):
    """Explicit sorted list of the periodic set's members below bound."""
    return sorted(x for x in range(bound) if x % modulus in h_set)
