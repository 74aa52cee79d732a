"""Threshold-activated exchange law and regime classification.

This module is the single source of truth for the piecewise right-hand side:
each country contributes its excess stock above the threshold, and the net
flow is the difference of the two excesses. The flow is continuous, so the
branch convention at the threshold never changes a trajectory.
"""

from __future__ import annotations

from .core import GoodEconomy, NormalizedState, Regime

__all__ = ["exchange_flow", "classify_regime", "regime_from_sides", "rhs"]


def _flow(eta_a: float, eta_b: float) -> float:
    """Float kernel of the exchange law; hot path for the integrator."""
    ex_a = eta_a - 1.0
    if ex_a < 0.0:
        ex_a = 0.0
    ex_b = eta_b - 1.0
    if ex_b < 0.0:
        ex_b = 0.0
    return ex_a - ex_b


def exchange_flow(state: NormalizedState) -> float:
    """Dimensionless exchange rate factor.

    Zero when both stocks are at or below threshold, the (positive) excess of
    the exporting country when only one is above, and the difference of
    excesses when both are.
    """
    return _flow(state.eta_a, state.eta_b)


def regime_from_sides(a_above: bool, b_above: bool) -> Regime:
    if a_above:
        return Regime.BILATERAL if b_above else Regime.A_EXPORTS
    return Regime.B_EXPORTS if b_above else Regime.NO_EXCHANGE


def classify_regime(state: NormalizedState) -> Regime:
    """Which exchange branch is active at ``state``.

    A stock exactly at threshold counts as below; the flow vanishes there
    under every assignment, so only determinism is at stake.
    """
    return regime_from_sides(state.eta_a > 1.0, state.eta_b > 1.0)


def _rhs(eta_a: float, eta_b: float, econ: GoodEconomy) -> tuple[float, float]:
    s = econ.sigma * _flow(eta_a, eta_b)
    return econ.p_a - econ.c_a - s, econ.p_b - econ.c_b + s


def rhs(state: NormalizedState, econ: GoodEconomy) -> tuple[float, float]:
    """Time derivatives (deta_a, deta_b) of the two stock levels.

    The exchange term cancels in the sum, so deta_a + deta_b equals the total
    net production rate regardless of sigma or the state (up to rounding).
    """
    return _rhs(state.eta_a, state.eta_b, econ)
