"""Arithmetic in GF(q^2) presented as GF(q)[x] / (x^2 + b x + c).

Elements are pairs ``(u0, u1)`` standing for ``u0 + u1 x``.  Everything is
exact integer arithmetic; discrete logarithms come from a full power table,
which is fine for the desk-scale fields used here (q <= 31).
"""

from __future__ import annotations

from functools import cached_property

Element = tuple[int, int]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_quadratic(q: int, b: int, c: int) -> bool:
    """x^2 + b x + c is irreducible over GF(q) iff it has no root."""
    return all((x * x + b * x + c) % q for x in range(q))


def irreducible_quadratics(q: int) -> list[tuple[int, int]]:
    """All monic irreducible quadratics over GF(q), as ``(b, c)`` pairs."""
    return [(b, c) for b in range(q) for c in range(q) if is_irreducible_quadratic(q, b, c)]


class QuadraticField:
    """The field GF(q^2) for an odd prime ``q`` and a monic irreducible quadratic."""

    def __init__(self, q: int, poly: tuple[int, int]):
        if not is_prime(q) or q == 2:
            raise ValueError(f"q must be an odd prime, got {q}")
        b, c = (int(poly[0]) % q, int(poly[1]) % q)
        if not is_irreducible_quadratic(q, b, c):
            raise ValueError(f"x^2 + {b}x + {c} is reducible over GF({q})")
        self.q = q
        self.poly = (b, c)
        self.order = q * q - 1

    def __repr__(self):
        b, c = self.poly
        return f"QuadraticField(q={self.q}, x^2 + {b}x + {c})"

    def element(self, u) -> Element:
        u0, u1 = u
        return (u0 % self.q, u1 % self.q)

    def add(self, u: Element, v: Element) -> Element:
        return ((u[0] + v[0]) % self.q, (u[1] + v[1]) % self.q)

    def mul(self, u: Element, v: Element) -> Element:
        q = self.q
        b, c = self.poly
        r0 = u[0] * v[0]
        r1 = u[0] * v[1] + u[1] * v[0]
        r2 = u[1] * v[1]
        # x^2 = -b x - c
        return ((r0 - c * r2) % q, (r1 - b * r2) % q)

    def pow(self, u: Element, e: int) -> Element:
        e %= self.order
        result = (1, 0)
        base = u
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def elements(self) -> list[Element]:
        return [(u0, u1) for u0 in range(self.q) for u1 in range(self.q)]

    def is_generator(self, u: Element) -> bool:
        u = self.element(u)
        if u == (0, 0):
            return False
        return all(self.pow(u, self.order // p) != (1, 0) for p in prime_factors(self.order))

    def generators(self) -> list[Element]:
        return [u for u in self.elements() if self.is_generator(u)]

    def log_table(self, delta: Element) -> dict[Element, int]:
        """Map every nonzero element to its discrete log base ``delta``."""
        delta = self.element(delta)
        if not self.is_generator(delta):
            raise ValueError(f"{delta} does not generate GF({self.q}^2)^x")
        table = {}
        x = (1, 0)
        for i in range(self.order):
            table[x] = i
            x = self.mul(x, delta)
        return table

    @cached_property
    def one(self) -> Element:
        return (1, 0)
