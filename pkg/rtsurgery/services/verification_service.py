import logging
import math
from typing import Any, Dict, Optional, Sequence, Tuple

from ..exceptions import RTSurgeryError
from ..models import FourierIndex, Precision, RootData, RTValue, SurgeryParams, Theta3
from ..numerics.asymptotics import fit_kappa, predict_rt, sweep_levels, verify_conjecture
from ..numerics.geometry import (
    complex_volume, correspondence_residual, gluing_residuals, holonomy_residuals, solve_gluing,
    volume_series
)
from ..numerics.potential import (
    asymptotic_constants, check_26, in_D0, in_DH, in_S, potential_shifted,
    real_potential, solve_critical
)
from ..numerics.quantum_inv import rt_definitional, rt_lattice
from .cache_service import CacheService

logger = logging.getLogger(__name__)

# levels at which the lattice sum is checked against the definitional sum
CROSS_CHECK_MAX_R = 31


def _failure(error: Exception, stage: str) -> Dict[str, Any]:
    logger.error("%s failed: %s", stage, error)
    return {"success": False, "errors": [f"{type(error).__name__}: {error}"], "stage": stage}


class VerificationService:
    """Runs each command's pipeline and reports the outcome as a dictionary"""

    def __init__(self, cache_path: Optional[str] = None, precision: Precision = Precision.DOUBLE,
                 threads: int = 1):
        self.cache = CacheService(cache_path) if cache_path else None
        self.precision = precision
        self.threads = threads

    def compute_rt(self, p: int, q: int, r: int) -> Dict[str, Any]:
        """
        RT_r(M_{p,q}) by the lattice sum, cross-checked against the definitional
        sum for small r.

        Returns:
            {"success", "params", "rt", "cross_check"}; cross_check is the relative
            difference of the two paths or None
        """
        try:
            params = SurgeryParams(p, q)
            root = RootData(r)
            rt = rt_lattice(params, root, precision=self.precision, threads=self.threads)
        except RTSurgeryError as e:
            return _failure(e, "rt")

        cross_check = None
        if r <= CROSS_CHECK_MAX_R:
            reference = rt_definitional(params, root)
            cross_check = abs(rt.value - reference.value) / abs(reference.value)
            logger.debug("two-path check at r = %d: relative difference %.2e", r, cross_check)
        return {"success": True, "params": params, "rt": rt, "cross_check": cross_check}

    def critical(self, p: int, q: int) -> Dict[str, Any]:
        try:
            params = SurgeryParams(p, q)
            constants = asymptotic_constants(params, solve_critical(params))
        except RTSurgeryError as e:
            return _failure(e, "critical_point")
        return {"success": True, "params": params, "constants": constants}

    def volume(self, p: int, q: int) -> Dict[str, Any]:
        try:
            params = SurgeryParams(p, q)
            critical = solve_critical(params)
            shapes = solve_gluing(params, critical)
            volume = complex_volume(params, shapes)
        except RTSurgeryError as e:
            return _failure(e, "gluing")
        return {
            "success": True,
            "params": params,
            "shapes": shapes,
            "volume": volume,
            "series": {order: volume_series(params, order) for order in (2, 3, 4)},
            "gluing_residual": float(max(abs(v) for v in gluing_residuals(shapes, params))),
            "holonomy": holonomy_residuals(shapes, params),
            "correspondence": correspondence_residual(shapes, critical),
        }

    def _lookup(self, params: SurgeryParams, levels: Sequence[int]) -> Tuple[Dict[int, RTValue], int]:
        """RT values for every level, computed only where the cache has none"""
        values: Dict[int, RTValue] = {}
        hits = 0
        for r in levels:
            cached = self.cache.get(params.p, params.q, r) if self.cache is not None else None
            if cached is not None:
                values[r] = cached
                hits += 1
                continue
            rt = rt_lattice(params, RootData(r), precision=self.precision, threads=self.threads)
            if self.cache is not None:
                self.cache.put(params.p, params.q, rt)
            values[r] = rt
        logger.info("cache hits: %d/%d", hits, len(levels))
        return values, hits

    def verify(self, p: int, q: int, levels: Sequence[int]) -> Dict[str, Any]:
        """
        The conjecture sweep over ``levels``, reusing cached RT values.

        Returns:
            {"success", "params", "report", "cache_hits", "in_S"}
        """
        stage = "setup"
        try:
            params = SurgeryParams(p, q)
            stage = "critical_point"
            constants = asymptotic_constants(params)
            stage = "gluing"
            volume = complex_volume(params, solve_gluing(params, constants.critical))
            stage = "invariants"
            values, hits = self._lookup(params, sweep_levels(levels))
            stage = "verification"
            report = verify_conjecture(params, levels, rt_lookup=values.__getitem__,
                                       constants=constants, volume=volume)
        except RTSurgeryError as e:
            return _failure(e, stage)
        return {"success": True, "params": params, "report": report, "cache_hits": hits,
                "in_S": in_S(params)}

    def fit(self, p: int, q: int, levels: Sequence[int], depth: int) -> Dict[str, Any]:
        result = self.verify(p, q, levels)
        if not result["success"]:
            return result
        report = result["report"]
        try:
            kappa = fit_kappa(report.rows, depth)
        except RTSurgeryError as e:
            return _failure(e, "fit")
        residuals = []
        for row in report.rows:
            predicted = predict_rt(report.params, report.constants, RootData(row.r), kappa)
            correction = predicted.predicted / predicted.leading if predicted.leading else 1
            residuals.append((row.r, abs(row.ratio / correction - 1)))
        result.update({"kappa": kappa, "residuals": residuals})
        return result

    def potential_eval(self, theta: Sequence[complex], real: bool = False,
                       p: Optional[int] = None, q: Optional[int] = None,
                       fourier_index: Tuple[int, int, int] = (0, 0, 0)) -> Dict[str, Any]:
        """2 pi v(theta) when ``real``, otherwise V(theta; m) and 2 pi Re V"""
        try:
            point = Theta3.of(theta)
            if real:
                value = real_potential([t.real for t in point])
                return {"success": True, "theta": point, "two_pi_v": 2 * math.pi * value}
            params = SurgeryParams(p, q)
            value = potential_shifted(params, point, FourierIndex(*fourier_index))
        except (RTSurgeryError, TypeError) as e:
            return _failure(e, "potential")
        return {"success": True, "theta": point, "params": params, "value": value,
                "two_pi_re": 2 * math.pi * value.real}

    def region_check(self, p: int, q: int, theta: Optional[Sequence[complex]] = None,
                     fourier_index: Tuple[int, int, int] = (0, 0, 0)) -> Dict[str, Any]:
        """
        Membership of (p, q) in S and of theta (the real part of the critical
        point when omitted) in D0, D_H and the growth region of ``fourier_index``.
        """
        try:
            params = SurgeryParams(p, q)
            admissible = in_S(params)
            if theta is None:
                theta_real = [t.real for t in solve_critical(params).theta]
            else:
                theta_real = [complex(t).real for t in theta]
        except RTSurgeryError as e:
            return _failure(e, "region")
        idx = FourierIndex(*fourier_index)
        return {
            "success": True,
            "params": params,
            "theta": tuple(theta_real),
            "in_S": admissible,
            "in_D0": in_D0(theta_real),
            "in_DH": in_DH(theta_real),
            "check_26": check_26(theta_real, idx, params),
            "two_pi_v": 2 * math.pi * real_potential(theta_real),
        }
