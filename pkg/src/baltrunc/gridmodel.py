"""Aggregate frequency-response model of a power network.

The aggregate swing dynamics with ``M`` turbine-governor branches have
transfer function

    G(s) = 1 / (m_hat s + d_hat + sum_i droop_inv_i / (tau_i s + 1))

and an arrowhead realization whose trailing signs all agree, so every
balanced truncation of it meets the error bound with equality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .arrowhead import ArrowheadRealization, to_state_space
from .balance import TRUNCATION, ReductionCertificate, balance, certify
from .config import DEFAULT, Tolerances
from .errors import BadConfig


@dataclass(frozen=True)
class GridConfig:
    m_hat: float                 # aggregate inertia
    d_hat: float                 # aggregate damping
    droop_inv: tuple[float, ...] = field(default_factory=tuple)  # inverse droop per branch
    tau: tuple[float, ...] = field(default_factory=tuple)        # turbine time constants [s]

    def __post_init__(self):
        object.__setattr__(self, "droop_inv", tuple(float(x) for x in np.atleast_1d(self.droop_inv)))
        object.__setattr__(self, "tau", tuple(float(x) for x in np.atleast_1d(self.tau)))
        object.__setattr__(self, "m_hat", float(self.m_hat))
        object.__setattr__(self, "d_hat", float(self.d_hat))
        self.validate()

    def validate(self):
        vals = (self.m_hat, self.d_hat) + self.droop_inv + self.tau
        if not all(np.isfinite(v) and v > 0 for v in vals):
            raise BadConfig("all grid parameters must be finite and positive")
        if len(self.droop_inv) != len(self.tau):
            raise BadConfig(f"droop_inv has {len(self.droop_inv)} entries but tau has {len(self.tau)}")
        if len(self.tau) < 1:
            raise BadConfig("need at least one turbine branch")
        if len(set(self.tau)) != len(self.tau):
            raise BadConfig("time constants must be distinct: equal tau values give equal "
                            "diagonal entries in the arrowhead, so the realization is not minimal")

    @property
    def branches(self) -> int:
        return len(self.tau)

    @classmethod
    def from_dict(cls, doc: dict) -> "GridConfig":
        keys = {"m_hat", "d_hat", "droop_inv", "tau"}
        if set(doc) != keys:
            raise BadConfig(f"grid config needs exactly the keys {sorted(keys)}")
        return cls(doc["m_hat"], doc["d_hat"], doc["droop_inv"], doc["tau"])

    @classmethod
    def from_json(cls, text: str) -> "GridConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"m_hat": self.m_hat, "d_hat": self.d_hat,
                "droop_inv": list(self.droop_inv), "tau": list(self.tau)}


def build_grid_model(cfg: GridConfig) -> ArrowheadRealization:
    r = np.asarray(cfg.droop_inv)
    tau = np.asarray(cfg.tau)
    return ArrowheadRealization(
        d=np.concatenate([[-cfg.d_hat / cfg.m_hat], -1.0 / tau]),
        alpha=np.full(cfg.branches, 1.0 / cfg.m_hat),
        beta=-r / tau,
        gamma=1.0 / cfg.m_hat,
    )


def grid_transfer(cfg: GridConfig, s: complex) -> complex:
    r = np.asarray(cfg.droop_inv)
    tau = np.asarray(cfg.tau)
    return complex(1.0 / (cfg.m_hat * s + cfg.d_hat + np.sum(r / (tau * s + 1.0))))


def grid_tightness_report(cfg: GridConfig, method: str = TRUNCATION,
                          tol: Tolerances = DEFAULT) -> list[ReductionCertificate]:
    """Certificates for every reduced order ``r = 1..M``."""
    bal = balance(to_state_space(build_grid_model(cfg)), tol)
    return [certify(bal, r, method, tol) for r in range(1, cfg.branches + 1)]
