"""Summary metrics of an episode log."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import EmptyLog
from ..pattern import point_in_polygon, support_polygon
from .episode import SimLog


@dataclass(frozen=True)
class Metrics:

    samples: int
    duration: float
    dcm_error_max: tuple
    dcm_error_rms: tuple
    zmp_tracking_max: tuple
    zmp_tracking_rms: tuple
    zmp_reference_max: tuple
    zmp_reference_rms: tuple
    solve_time_mean_ms: float
    solve_time_std_ms: float
    solve_time_max_ms: float
    qp_failures: int
    polygon_violations: int

    def as_dict(self) -> dict:
        return asdict(self)


def _axis_stats(err):
    err = err[np.isfinite(err).all(axis=1)]
    if len(err) == 0:
        return (np.nan, np.nan), (np.nan, np.nan)
    mx = tuple(float(v) for v in np.abs(err).max(axis=0))
    rms = tuple(float(v) for v in np.sqrt((err ** 2).mean(axis=0)))
    return mx, rms


def polygon_violations(log: SimLog, half_length: float = 0.112, half_width: float = 0.065,
                       tol: float = 1e-6) -> int:
    """Cycles where a target CoP leaves its sole or the reference ZMP leaves the support area.

    The reference ZMP check needs the pattern and is skipped for logs read
    back from CSV.
    """
    bad = np.zeros(len(log), dtype=bool)
    for side in ("l", "r"):
        loaded = log[f"f_qp_{side}"] > 0.0
        cop = log.vec(f"cop_qp_{side}")
        out = (np.abs(cop[:, 0]) > half_length + tol) | (np.abs(cop[:, 1]) > half_width + tol)
        bad |= loaded & out
    pattern = log.pattern
    if pattern is not None:
        z_d = log.vec("z_d")
        cache = {}
        for k in range(len(log)):
            i = int(pattern.phase_index[k])
            if i not in cache:
                cache[i] = support_polygon(pattern.phases[i])
            if not point_in_polygon(*cache[i], z_d[k], tol):
                bad[k] = True
    return int(bad.sum())


def compute_metrics(log: SimLog, half_length: float = 0.112,
                    half_width: float = 0.065) -> Metrics:
    """Tracking errors, solver statistics and support violations of a log.

    ZMP tracking compares the measured ZMP with the distributed one on cycles
    where the measurement is valid; the reference error compares the
    distributed ZMP with the pattern ZMP.
    """
    if log is None or len(log) == 0:
        raise EmptyLog("log has no samples")
    dcm_max, dcm_rms = _axis_stats(log.vec("xi_m") - log.vec("xi_d"))
    valid = log["zmp_valid"] > 0.5
    trk_max, trk_rms = _axis_stats((log.vec("z_m") - log.vec("z_qp"))[valid])
    ref_max, ref_rms = _axis_stats(log.vec("z_qp") - log.vec("z_d"))
    st = np.asarray(log.solve_times, dtype=float) * 1e3
    t = log["t"]
    return Metrics(
        samples=len(log),
        duration=float(t[-1] - t[0]),
        dcm_error_max=dcm_max,
        dcm_error_rms=dcm_rms,
        zmp_tracking_max=trk_max,
        zmp_tracking_rms=trk_rms,
        zmp_reference_max=ref_max,
        zmp_reference_rms=ref_rms,
        solve_time_mean_ms=float(st.mean()) if st.size else float("nan"),
        solve_time_std_ms=float(st.std()) if st.size else float("nan"),
        solve_time_max_ms=float(st.max()) if st.size else float("nan"),
        qp_failures=int((log["qp_status"] != 0).sum()),
        polygon_violations=polygon_violations(log, half_length, half_width),
    )
