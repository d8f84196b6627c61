"""Independent reference implementations shared by the test modules."""

import numpy as np
from scipy.optimize import linprog

from dcmwalk.spatial import FrameId, Transform, Wrench6
from dcmwalk.wrenchdist import ContactSpec, DistributionWeights

MASS, G = 40.0, 9.81


def cwc_analytic_margin(w, X, Y, mu):
    """Largest violation of the friction, CoP and yaw-moment conditions (<= 0 inside)."""
    fx, fy, fz, tx, ty, tz = w
    tau_min = -mu * (X + Y) * fz + abs(Y * fx - mu * tx) + abs(X * fy - mu * ty)
    tau_max = mu * (X + Y) * fz - abs(Y * fx + mu * tx) - abs(X * fy + mu * ty)
    return max(abs(fx) - mu * fz, abs(fy) - mu * fz, abs(tx) - Y * fz, abs(ty) - X * fz,
               tau_min - tz, tz - tau_max)


def corner_span_feasible(w, X, Y, mu):
    """Is ``w`` a nonnegative combination of friction-pyramid edges at the sole corners?"""
    gens = []
    for cx, cy in ((X, Y), (X, -Y), (-X, -Y), (-X, Y)):
        for ex, ey in ((mu, mu), (mu, -mu), (-mu, -mu), (-mu, mu)):
            f = np.array([ex, ey, 1.0])
            gens.append(np.concatenate([f, np.cross([cx, cy, 0.0], f)]))
    A = np.array(gens).T
    res = linprog(np.zeros(16), A_eq=A, b_eq=w, bounds=[(0, None)] * 16, method="highs")
    return res.status == 0


def adjoint(pose: Transform):
    R, t = pose.rotation, pose.translation
    M = np.zeros((6, 6))
    M[:3, :3] = R
    M[3:, 3:] = R
    for i in range(3):
        M[3:, i] = np.cross(t, R[:, i])
    return M


def random_ds_instance(rng):
    """Random feet placement, pressure ratio and an achievable-looking net wrench."""
    yaw_l, yaw_r = rng.uniform(-0.3, 0.3, 2)
    left = ContactSpec(Transform.from_pose([rng.uniform(-0.2, 0.2), rng.uniform(0.06, 0.2),
                                            rng.uniform(0.0, 0.2)], yaw=yaw_l),
                       frame=FrameId.LEFT_SOLE)
    right = ContactSpec(Transform.from_pose([rng.uniform(-0.2, 0.2), rng.uniform(-0.2, -0.06),
                                             rng.uniform(0.0, 0.2)], yaw=yaw_r),
                        frame=FrameId.RIGHT_SOLE)
    rho = rng.uniform(0.0, 1.0)
    s = rng.uniform(0, 1)
    p = s * left.pose.translation + (1 - s) * right.pose.translation
    p = p + np.array([rng.uniform(-0.15, 0.15), rng.uniform(-0.05, 0.05), 0.0])
    c = p + np.array([rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03), 0.78])
    f = np.array([MASS * 12.0 * (c[0] - p[0]), MASS * 12.0 * (c[1] - p[1]),
                  MASS * G * rng.uniform(0.8, 1.2)])
    w = Wrench6(f, np.cross(c, f))
    return w, left, right, rho


def ds_cost(x, w_net, left, right, rho, weights=DistributionWeights()):
    """Distribution objective written out term by term."""
    wl, wr = x[:6], x[6:]
    net = adjoint(left.pose) @ wl + adjoint(right.pose) @ wr - w_net.vector()
    eps = weights.epsilon
    ankle = sum(eps * (v[0] ** 2 + v[1] ** 2 + v[2] ** 2 + v[5] ** 2) + v[3] ** 2 + v[4] ** 2
                for v in (wl, wr))
    ratio = (1 - rho) * wl[2] - rho * wr[2]
    return weights.net_wrench * net @ net + weights.ankle_torque * ankle \
        + weights.pressure_ratio * ratio ** 2


def ds_constraints(x, left, right):
    """Stacked constraint residuals (<= 0 feasible) by direct evaluation."""
    out = []
    for v, spec in ((x[:6], left), (x[6:], right)):
        X, Y, mu = spec.half_length, spec.half_width, spec.friction
        out.append(cwc_analytic_margin(v, X, Y, mu))
        out.append(spec.p_min - v[2])
    return max(out)


def ds_cvxpy(w_net, left, right, rho, weights=DistributionWeights()):
    import cvxpy as cp
    from dcmwalk.wrenchdist import build_cwc
    x = cp.Variable(12)
    M = np.hstack([adjoint(left.pose), adjoint(right.pose)])
    eps = weights.epsilon
    D = np.sqrt(np.array([eps, eps, eps, 1.0, 1.0, eps]))
    a = np.zeros(12)
    a[2], a[8] = 1 - rho, -rho
    obj = (weights.net_wrench * cp.sum_squares(M @ x - w_net.vector())
           + weights.ankle_torque * (cp.sum_squares(cp.multiply(D, x[:6]))
                                     + cp.sum_squares(cp.multiply(D, x[6:])))
           + weights.pressure_ratio * cp.square(a @ x))
    cons = [build_cwc(left) @ x[:6] <= 0, build_cwc(right) @ x[6:] <= 0,
            x[2] >= left.p_min, x[8] >= right.p_min]
    prob = cp.Problem(cp.Minimize(obj), cons)
    prob.solve(solver=cp.CLARABEL)
    return x.value, prob.value


def rejection_sample_best(rng, x_star, w_net, left, right, rho, n=10 ** 6, chunk=100_000):
    """Lowest cost among ``n`` random feasible points drawn around ``x_star``.

    Perturbation scales span several decades so that both local and distant
    points are tried.
    """
    from dcmwalk.wrenchdist import build_cwc
    U = np.zeros((34, 12))
    U[:16, :6] = build_cwc(left)
    U[16:32, 6:] = build_cwc(right)
    U[32, 2] = U[33, 8] = -1.0
    b = np.zeros(34)
    b[32], b[33] = -left.p_min, -right.p_min
    M = np.hstack([adjoint(left.pose), adjoint(right.pose)])
    weights = DistributionWeights()
    eps = weights.epsilon
    d = np.array([eps, eps, eps, 1.0, 1.0, eps] * 2)
    a = np.zeros(12)
    a[2], a[8] = 1 - rho, -rho
    w0 = w_net.vector()
    best = np.inf
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        scale = 10.0 ** rng.uniform(-4, 2, size=(m, 1))
        X = x_star + scale * rng.normal(size=(m, 12))
        ok = np.all(X @ U.T <= b, axis=1)
        X = X[ok]
        if len(X) == 0:
            continue
        r = X @ M.T - w0
        cost = (weights.net_wrench * np.einsum("ij,ij->i", r, r)
                + weights.ankle_torque * (X ** 2) @ d + weights.pressure_ratio * (X @ a) ** 2)
        best = min(best, float(cost.min()))
    return best
