"""Sparse exact Gaussian elimination over the rationals.

Rows are dicts column -> Fraction.  Right-hand sides may live in any module
over the rationals (plain Fractions or Novikov scalars), since elimination
only ever takes rational combinations of them.
"""

from fractions import Fraction


class Inconsistent(Exception):
    pass


class Echelon:
    """Incremental row echelon form; the pivot of each stored row is absent
    from every row stored after it."""

    def __init__(self):
        self.order = []
        self.pivots = {}

    def reduce(self, row, rhs=0):
        row = {c: Fraction(v) for c, v in row.items() if v}
        for col in self.order:
            a = row.get(col)
            if not a:
                continue
            prow, prhs = self.pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - a * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs = rhs - a * prhs
        return row, rhs

    def add(self, row, rhs=0):
        row, rhs = self.reduce(row, rhs)
        if not row:
            if rhs:
                raise Inconsistent("row reduces to 0 = %s" % (rhs,))
            return False
        col = min(row)
        piv = row[col]
        row = {c: v / piv for c, v in row.items()}
        self.order.append(col)
        self.pivots[col] = (row, rhs * (1 / piv) if rhs else rhs)
        return True

    @property
    def rank(self):
        return len(self.order)

    def back_substitute(self, free=None):
        free = dict(free or {})
        x = dict(free)
        for col in reversed(self.order):
            row, rhs = self.pivots[col]
            val = rhs
            for c, v in row.items():
                if c != col and c in x:
                    val = val - v * x[c]
            x[col] = val
        return {c: v for c, v in x.items() if v}


def rank(rows):
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def solve(rows, rhs):
    """One solution x of rows . x = rhs (free unknowns set to zero)."""
    ech = Echelon()
    for r, b in zip(rows, rhs):
        ech.add(r, b)
    return ech.back_substitute()


def nullspace(rows, columns):
    ech = Echelon()
    for r in rows:
        ech.add(r)
    free = [c for c in columns if c not in ech.pivots]
    basis = []
    for f in free:
        basis.append(ech.back_substitute({f: Fraction(1)}))
    return basis


def matrix_rank(matrix):
    return rank([{j: v for j, v in enumerate(r) if v} for r in matrix])


def inverse(matrix):
    """Inverse of a square rational matrix given as a list of lists."""
    n = len(matrix)
    cols = []
    for k in range(n):
        rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in matrix]
        rhs = [Fraction(1 if i == k else 0) for i in range(n)]
        ech = Echelon()
        try:
            for r, b in zip(rows, rhs):
                ech.add(r, b)
        except Inconsistent:
            raise ZeroDivisionError("singular matrix")
        if ech.rank < n:
            raise ZeroDivisionError("singular matrix")
        x = ech.back_substitute()
        cols.append([x.get(i, Fraction(0)) for i in range(n)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]
