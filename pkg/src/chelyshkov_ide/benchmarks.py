"""The five reference problems with their exact solutions and published values.

Each entry carries both native numpy callables and the equivalent problem
file expressions. The two forms are written with the same operation order
so that they agree to rounding.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .solver import ProblemSpec

SQRT_PI = math.sqrt(math.pi)

# int_0^1 cos(t) y(t)**2 dt and int_0^1 sin(t) y(t)**2 dt for the fifth
# problem's exact solution y = x^(1/2) - x^(3/2)/6 + x^(5/2)/120
_A5 = -89 / 120 + 749 * math.cos(1) / 2880 + 15581 * math.sin(1) / 14400
_B5 = 3 / 5 + 749 * math.sin(1) / 2880 - 15581 * math.cos(1) / 14400


@dataclass(frozen=True)
class BenchmarkEntry:
    id: int
    description: str
    alpha: float
    c: float
    g: object
    k: object
    f: object
    f_y: object
    exact: object
    expressions: dict
    N: int
    nu: float
    L_f: float = None
    M_k: float = None
    reference: dict = field(default_factory=dict)

    def problem(self, alpha=None):
        return ProblemSpec(
            alpha=self.alpha if alpha is None else alpha, c=self.c, g=self.g, k=self.k,
            f=self.f, f_y=self.f_y, L_f=self.L_f, M_k=self.M_k, exact=self.exact,
            name=f"example {self.id}",
        )


def _ones_like_xt(x, t):
    return np.ones(np.broadcast(x, t).shape)


def _g5(x):
    return (SQRT_PI / 2 - SQRT_PI / 8 * x + SQRT_PI / 128 * x**2
            - _A5 * np.sin(x) - _B5 * np.cos(x))


def _exact5(x):
    return np.sqrt(x) - x**1.5 / 6 + x**2.5 / 120


BENCHMARKS = {
    1: BenchmarkEntry(
        id=1,
        description="D^(1/2) y = sqrt(pi)/2 - 1/4 + (1/2) int_0^1 y(t)^2 dt, y(0) = 0",
        alpha=0.5, c=0.0,
        g=lambda x: np.full(np.shape(x), SQRT_PI / 2 - 1 / 4),
        k=_ones_like_xt,
        f=lambda t, y: y**2 / 2,
        f_y=lambda t, y: y,
        exact=np.sqrt,
        expressions={"g": "sqrt(pi)/2 - 1/4", "k": "1", "f": "y^2/2", "f_y": "y", "exact": "sqrt(x)"},
        N=1, nu=0.5, L_f=1.0, M_k=1.0,
        reference={
            "W_1_6": (0.07052369794346953586850993144509657323068, 0.2115710938304086076055297943352897196920),
            "W_1_1": (0.06109105203159421258866747384762992484681, 0.1832731560947826377660024215428897745405),
            "newton_iterations": 6,
        },
    ),
    2: BenchmarkEntry(
        id=2,
        description="D^(1/2) y = 2 sqrt(x)/sqrt(pi) + 3 x sqrt(pi)/4 - 9/10 + int_0^1 y(t) dt, y(0) = 0",
        alpha=0.5, c=0.0,
        g=lambda x: 2 * np.sqrt(x) / SQRT_PI + 3 * x * SQRT_PI / 4 - 9 / 10,
        k=_ones_like_xt,
        f=lambda t, y: y,
        f_y=lambda t, y: np.ones_like(y),
        exact=lambda x: x**1.5 + x,
        expressions={
            "g": "2*sqrt(x)/sqrt(pi) + 3*x*sqrt(pi)/4 - 9/10", "k": "1", "f": "y", "f_y": "1",
            "exact": "x^1.5 + x",
        },
        N=4, nu=0.5, L_f=1.0, M_k=1.0,
        reference={
            "points": (0.1, 0.3, 0.5, 0.7, 0.9),
            "approx_nu_half": (0.1316227766016837933199889354443271853503, 0.4643167672515498340370909348402406402096,
                               0.8535533905932737622004221810524245196736, 1.285662018573852883584720418049631242609,
                               1.753814968245462419639701256996834004134),
            "abs_error_nu_1": (1.31000e-4, 5.55703e-4, 8.97348e-4, 7.88172e-5, 5.16739e-4),
            "l2_nu_1": 2.14371e-3,
        },
    ),
    3: BenchmarkEntry(
        id=3,
        description="D^alpha y = 1 - x/4 + int_0^1 x t y(t)^2 dt, y(0) = 0 (exact y = x for alpha = 1)",
        alpha=1.0, c=0.0,
        g=lambda x: 1 - x / 4,
        k=lambda x, t: x * t,
        f=lambda t, y: y**2,
        f_y=lambda t, y: 2 * y,
        exact=lambda x: np.asarray(x, dtype=float) * 1.0,
        expressions={"g": "1 - x/4", "k": "x*t", "f": "y^2", "f_y": "2*y", "exact": "x"},
        N=2, nu=1.0, M_k=1.0,
        reference={"l2_alpha_1_N_2": 2.0525e-40},
    ),
    4: BenchmarkEntry(
        id=4,
        description="D^(1/2) y = (8/3 x^(3/2) - 2 x^(1/2))/Gamma(1/2) - x/1260 + int_0^1 x t y(t)^4 dt, y(0) = 0",
        alpha=0.5, c=0.0,
        g=lambda x: (8 / 3 * x**1.5 - 2 * x**0.5) / math.gamma(0.5) - x / 1260,
        k=lambda x, t: x * t,
        f=lambda t, y: y**4,
        f_y=lambda t, y: 4 * y**3,
        exact=lambda x: x**2 - x,
        expressions={
            "g": "(8/3*x^1.5 - 2*x^0.5)/gamma(1/2) - x/1260", "k": "x*t", "f": "y^4", "f_y": "4*y^3",
            "exact": "x^2 - x",
        },
        N=4, nu=0.5, M_k=1.0,
        reference={"l2_nu_half": 1.6792e-39, "l2_nu_1": 1.5591e-3},
    ),
    5: BenchmarkEntry(
        id=5,
        description="D^(1/2) y = g(x) + int_0^1 sin(x+t) y(t)^2 dt, y(0) = 0, y = x^(1/2) - x^(3/2)/3! + x^(5/2)/5!",
        alpha=0.5, c=0.0,
        g=_g5,
        k=lambda x, t: np.sin(x + t),
        f=lambda t, y: y**2,
        f_y=lambda t, y: 2 * y,
        exact=_exact5,
        expressions={
            "g": (
                "sqrt(pi)/2 - sqrt(pi)/8*x + sqrt(pi)/128*x^2"
                " - (-89/120 + 749*cos(1)/2880 + 15581*sin(1)/14400)*sin(x)"
                " - (3/5 + 749*sin(1)/2880 - 15581*cos(1)/14400)*cos(x)"
            ),
            "k": "sin(x+t)", "f": "y^2", "f_y": "2*y",
            "exact": "sqrt(x) - x^1.5/6 + x^2.5/120",
        },
        N=10, nu=0.5, M_k=1.0,
        reference={
            "l2": {
                0.25: dict(zip(range(2, 21, 2), (4.5944e-02, 1.4297e-03, 3.0806e-05, 6.3394e-07, 7.9853e-08,
                                                 2.8281e-09, 9.0679e-11, 1.1469e-11, 3.1578e-13, 9.2724e-15))),
                0.5: dict(zip(range(2, 21, 2), (9.1157e-03, 1.4795e-05, 6.4717e-07, 1.6866e-10, 1.1612e-10,
                                                3.4954e-13, 9.8229e-15, 4.5248e-17, 4.6602e-19, 2.7650e-21))),
                0.75: dict(zip(range(2, 21, 2), (1.3978e-02, 3.3550e-03, 1.1277e-03, 6.1575e-04, 3.4911e-04,
                                                 1.9716e-04, 1.5580e-04, 1.0786e-04, 7.0349e-05, 5.6620e-05))),
                1.0: dict(zip(range(2, 21, 2), (2.1852e-02, 6.0291e-03, 2.9305e-03, 1.5718e-03, 8.4281e-04,
                                                5.4258e-04, 4.5238e-04, 3.7783e-04, 2.8438e-04, 2.0093e-04))),
            },
            "points": (0.1, 0.3, 0.5, 0.7, 0.9),
            "abs_error_N_10": {
                0.25: (4.2857e-08, 5.7263e-09, 6.7919e-08, 6.7635e-09, 3.4723e-08),
                0.5: (3.1881e-11, 5.7105e-11, 4.0053e-11, 7.2990e-11, 7.7616e-11),
                0.75: (4.0770e-4, 3.1744e-5, 8.3869e-5, 1.2539e-5, 1.9118e-4),
                1.0: (5.6351e-4, 6.4303e-4, 4.3161e-4, 5.3821e-4, 6.8182e-4),
            },
        },
    ),
}


def get_benchmark(example_id):
    try:
        return BENCHMARKS[int(example_id)]
    except (KeyError, ValueError):
        raise KeyError(f"no benchmark with id {example_id!r}; choose from {sorted(BENCHMARKS)}") from None
