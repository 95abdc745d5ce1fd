"""Closed-form constants of the two-type branching process behind NW_n(rho).

Types are ordered (R, B).  The generator is ``Q = [[0, rho], [2, rho - 1]]``
with rows indexed by the parent type.
"""
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelConstants:
    rho: float
    lam: float
    lam2: float
    pi_R: float
    pi_B: float
    u_R: float
    u_B: float
    c: float

    @property
    def Q(self):
        return np.array([[0.0, self.rho], [2.0, self.rho - 1.0]])

    @property
    def pi(self):
        return np.array([self.pi_R, self.pi_B])

    @property
    def u(self):
        return np.array([self.u_R, self.u_B])

    @property
    def collision_factor(self):
        """Total collision intensity weight, pi_B^2 + 2 pi_B pi_R + pi_R^2/2."""
        return 1.0 - 0.5 * self.pi_R**2

    def t_n(self, n):
        """Observation time log(n) / (2 lam) at which each tree holds order sqrt(n) vertices."""
        return math.log(n) / (2.0 * self.lam)

    def as_dict(self):
        return {
            "rho": self.rho,
            "lambda": self.lam,
            "lambda2": self.lam2,
            "pi_R": self.pi_R,
            "pi_B": self.pi_B,
            "u_R": self.u_R,
            "u_B": self.u_B,
            "c": self.c,
            "c_ihrg": ihrg_constant(self),
        }


def malthusian(rho):
    """Largest root of x^2 + (1 - rho) x - 2 rho."""
    return 0.5 * (rho - 1.0 + math.sqrt(rho * rho + 6.0 * rho + 1.0))


def char_poly(rho, x):
    return x * x + (1.0 - rho) * x - 2.0 * rho


def constants(rho):
    rho = float(rho)
    if not rho > 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")
    disc = math.sqrt(rho * rho + 6.0 * rho + 1.0)
    lam = 0.5 * (rho - 1.0 + disc)
    # product of roots is -2 rho; avoids cancellation in rho - 1 - disc
    lam2 = -2.0 * rho / lam
    pi_R = 2.0 / (lam + 2.0)
    pi_B = lam / (lam + 2.0)
    # Q u = lam u gives u_R = rho u_B / lam; normalise pi . u = 1
    u_B = 1.0 / (pi_R * rho / lam + pi_B)
    u_R = rho * u_B / lam
    c = math.log(1.0 - 0.5 * pi_R**2) - math.log(lam * (lam + 1.0))
    return ModelConstants(rho, lam, lam2, pi_R, pi_B, u_R, u_B, c)


def mean_matrix(k, t):
    """M(t) = exp(Q t); entry (r, q) is E[#alive type q at t | one live type-r particle at 0]."""
    if t < 0:
        raise ValueError("t must be >= 0")
    Q = k.Q
    eye = np.eye(2)
    # spectral projectors for the two distinct eigenvalues
    P1 = (Q - k.lam2 * eye) / (k.lam - k.lam2)
    P2 = (Q - k.lam * eye) / (k.lam2 - k.lam)
    return math.exp(k.lam * t) * P1 + math.exp(k.lam2 * t) * P2


def ihrg_constant(k):
    """Additive distance constant of the matched inhomogeneous random graph, for comparison."""
    rho, lam = k.rho, k.lam
    return math.log((rho + 2.0) * (2.0 * rho + lam**2) / (rho * (lam + 2.0) ** 2 * lam * (lam + 1.0)))


def x_of_t(k, t):
    """Argument of the MGF in the epidemic curve: (1 - pi_R^2/2) e^{lam t} / (lam (lam+1))."""
    return k.collision_factor * np.exp(k.lam * np.asarray(t, dtype=float)) / (k.lam * (k.lam + 1.0))


def limit_distance(k, w_u, w_v, gumbel):
    """-(log(W_U W_V) + Lambda + c) / lam, the limit of P_n(U,V) - log(n)/lam."""
    return -(np.log(np.asarray(w_u) * np.asarray(w_v)) + np.asarray(gumbel) + k.c) / k.lam


def hopcount_centering(k, n):
    """Mean and variance (lam+1)/lam * log n of the hopcount CLT."""
    return (k.lam + 1.0) / k.lam * math.log(n)


def second_moments(k):
    """E[W^2] for the limits W^(R), W^(B) of a single live root particle.

    From W_q = e^{-lam X} * (sum of the children's limits) with X ~ Exp(1),
    E[e^{-2 lam X}] = 1 / (2 lam + 1) and Poi(rho) blue children.
    """
    rho, uR, uB = k.rho, k.u_R, k.u_B
    a = 2.0 * k.lam + 1.0
    cross = rho * rho * uB * uB
    A = np.array([[a - 1.0, -rho], [-2.0, a - rho]])
    b = np.array([2 * rho * uR * uB + cross, 2 * uR * uR + 4 * rho * uR * uB + cross])
    sR, sB = np.linalg.solve(A, b)
    return float(sR), float(sB)
