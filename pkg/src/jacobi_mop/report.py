"""Residual reports and the catalog of verified identities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

# identity name -> human readable anchor; every report entry must use one of these
CATALOG = {
    "biorthogonality": "biorthogonality <P_n^L, P_m^R> = delta_nm C_n^-1",
    "three-term-left": "three term recurrence z P_n^L = P_{n+1}^L + beta_n^L P_n^L + gamma_n^L P_{n-1}^L",
    "three-term-right": "three term recurrence z P_n^R = P_{n+1}^R + P_n^R beta_n^R + P_{n-1}^R gamma_n^R",
    "beta-similarity": "beta_n^R = C_n beta_n^L C_n^-1",
    "p1-sum": "p^1_{L,n} = -sum_{k<n} beta_k^L",
    "p2-recursion": "p^2_{L,n} - p^2_{L,n+1} = beta_n^L p^1_{L,n} + gamma_n^L",
    "p2-sum-as-printed": "p^2_{L,n} = sum_{i,j<n} beta_i beta_j - sum_{k<n} gamma_k (printed form)",
    "p2-sum-ordered": "p^2_{L,n} = sum_{j<k<n} beta_k beta_j - sum_{k<n} gamma_k",
    "q-recurrence": "three term recurrence of the second kind functions",
    "plemelj": "jump of Q_n across (0,1) equals 2 pi i P_n W",
    "q-asymptotics": "z^{n+1} C_n Q_n^L(z) -> -I",
    "p1-q1-identity": "p^1_{R,n} = -q^1_{L,n-1} and p^1_{L,n} = -q^1_{R,n-1}",
    "y-inverse": "(Y_n^L)^-1 = [[0,I],[-I,0]] Y_n^R [[0,-I],[I,0]]",
    "y-asymptotics": "Y_n^L diag(z^-n, z^n) -> I",
    "z-jump-01": "constant jump of Z_n^L on (0,1)",
    "z-jump-1inf": "constant jump of Z_n^L on (1,inf)",
    "transfer": "Y_{n+1}^L = T_n^L Y_n^L and Y_{n+1}^R = Y_n^R T_n^R",
    "transfer-det": "det T_n^L independent of z",
    "m-left-right": "M_n^R = -J M_n^L J^-1",
    "m-closed-form": "closed form of z(1-z) M_n^L versus numeric logarithmic derivative",
    "m-entire": "z(1-z) M_n^L bounded near the endpoints",
    "zero-curvature": "M_{n+1}^L T_n^L - T_n^L M_n^L = diag(I, 0)",
    "first-order-ode": "z(1-z) Y' + Y diag(h^L, -h^R) = Mt Y",
    "second-order-ode": "second order equation with N(Mt)",
    "split-relations": "split second order relations for P and Q rows",
    "scalar-jacobi-ode": "z(1-z)P'' + (1+a-(a+b+2)z)P' + n(a+b+n+1)P = 0",
    "scalar-q-ode": "scalar second kind equation",
    "pole-matching": "pole matching values of p^1_n and gamma_n",
    "dpiv-1": "first non-Abelian discrete Painleve IV equation",
    "dpiv-2": "second non-Abelian discrete Painleve IV equation",
    "dpiv-reduction-xi": "xi_{n+1}^2 - xi_0^2 = gamma_{n+1} mu_n mu_{n+1}",
    "dpiv-reduction-mu": "-mu_n beta_n = xi_n + xi_{n+1}",
    "dpiv-reduction-nu": "nu_n nu_{n+1} formula",
    "pearson": "z(1-z) W' = h^L W + W h^R",
}


@dataclass
class ResidualEntry:
    name: str
    residual: float
    tol: float
    detail: list = field(default_factory=list)  # (label, value) pairs
    anchor: str = ""

    def __post_init__(self):
        base = self.name.split("/")[0]
        if base not in CATALOG:
            raise KeyError(f"identity {base!r} is not in the catalog")
        if not self.anchor:
            self.anchor = CATALOG[base]

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual < self.tol


@dataclass
class ResidualReport:
    entries: list = field(default_factory=list)

    def add(self, name: str, values, tol: float, labels=None) -> ResidualEntry:
        """Record the maximum of ``values`` (with per-point detail) under ``name``."""
        values = [float(v) for v in values]
        labels = labels if labels is not None else list(range(len(values)))
        res = max(values) if values else 0.0
        if any(math.isnan(v) for v in values):
            res = math.nan
        e = ResidualEntry(name, res, tol, list(zip(labels, values)))
        self.entries.append(e)
        return e

    def extend(self, other: "ResidualReport") -> "ResidualReport":
        self.entries.extend(other.entries)
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name: str) -> ResidualEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def max(self, name: str) -> float:
        return self[name].residual

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(f"{flag}  {e.name:<32s} {e.residual:10.3e}  (tol {e.tol:.1e})")
        return "\n".join(lines)
