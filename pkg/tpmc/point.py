from fractions import Fraction


class RationalPoint:
    """Represents an exact vector using a tuple of Fractions and a tuple of
    coordinate names ("x[i,j]", "z[j]")."""
    def __init__(self, index, values):
        self._index = tuple(index)
        self._values = tuple(Fraction(v) for v in values)
        assert len(self._index) == len(self._values), "Index and values differ in length."
        self._position = {name: n for n, name in enumerate(self._index)}

    def index(self):
        return self._index

    def values(self):
        return self._values

    def position(self, idx):
        if isinstance(idx, str): return self._position[idx]
        return idx

    def __len__(self):
        return len(self._values)

    def __getitem__(self, idx):
        return self._values[self.position(idx)]

    def __iter__(self):
        return iter(self._values)

    def items(self):
        return zip(self._index, self._values)

    def __add__(self, other):
        assert self._index == other._index, "Points live in different spaces."
        return RationalPoint(self._index, [a+b for a, b in zip(self._values, other._values)])

    def scaled(self, q):
        q = Fraction(q)
        return RationalPoint(self._index, [q*v for v in self._values])

    def dot(self, coefficients):
        return sum((Fraction(a)*v for a, v in zip(coefficients, self._values)), Fraction(0))

    def is_integral(self):
        return all(v.denominator == 1 for v in self._values)

    def __eq__(self, other):
        return (isinstance(other, RationalPoint) and self._index == other._index
                and self._values == other._values)

    def __lt__(self, other):
        return self._values < other._values

    def __hash__(self):
        return hash((self._index, self._values))

    def __repr__(self):
        return "RationalPoint(" + ", ".join(f"{k}={v}" for k, v in self.items()) + ")"


def x_name(e):
    return f"x[{e[0]},{e[1]}]"


def z_name(j):
    return f"z[{j}]"


def solution_index(inst):
    """Canonical coordinate order: edge flows in edge order, then market rejections."""
    return [x_name(e) for e in inst.edges] + [z_name(j) for j in inst.market_ids]


def point_of_solution(inst, sol):
    return RationalPoint(solution_index(inst),
            [sol.x[e] for e in inst.edges] + [sol.z[j] for j in inst.market_ids])


def combination(points, weights):
    """The weighted sum of points."""
    assert points, "Empty combination."
    total = points[0].scaled(weights[0])
    for p, w in zip(points[1:], weights[1:]):
        total = total + p.scaled(w)
    return total
