"""SMO solver for the soft-margin SVM dual.

    min_a  1/2 a' Q a - e' a   s.t.  0 <= a_i <= C,  y' a = 0,
    Q_ij = y_i y_j K_ij

Working pairs are chosen with the second-order rule of Fan, Chen & Lin
(JMLR 2005) and the pair update follows LIBSVM. The loop stops when the
maximal KKT violation ``m(a) - M(a)`` drops below ``tol``.
"""

import numba
import numpy as np

TAU = 1e-12


@numba.njit(cache=True, nogil=True)
def smo(K, y, C, tol, max_iter):
    n = K.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    gap = np.inf
    it = 0
    while it < max_iter:
        # i: maximal violator in I_up
        gmax = -np.inf
        i = -1
        for t in range(n):
            if y[t] > 0:
                if alpha[t] < C and -G[t] >= gmax:
                    gmax = -G[t]
                    i = t
            else:
                if alpha[t] > 0 and G[t] >= gmax:
                    gmax = G[t]
                    i = t
        gmax2 = -np.inf
        j = -1
        obj_min = np.inf
        for t in range(n):
            if y[t] > 0:
                if alpha[t] > 0:
                    if G[t] >= gmax2:
                        gmax2 = G[t]
                    grad_diff = gmax + G[t]
                    if grad_diff > 0 and i >= 0:
                        quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if quad <= 0:
                            quad = TAU
                        obj = -(grad_diff * grad_diff) / quad
                        if obj <= obj_min:
                            obj_min = obj
                            j = t
            else:
                if alpha[t] < C:
                    if -G[t] >= gmax2:
                        gmax2 = -G[t]
                    grad_diff = gmax - G[t]
                    if grad_diff > 0 and i >= 0:
                        quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if quad <= 0:
                            quad = TAU
                        obj = -(grad_diff * grad_diff) / quad
                        if obj <= obj_min:
                            obj_min = obj
                            j = t
        gap = gmax + gmax2
        if gap < tol or j == -1 or i == -1:
            return alpha, _rho(alpha, G, y, C), it, True, gap

        old_ai = alpha[i]
        old_aj = alpha[j]
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = TAU
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            s = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if s > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = s - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = s
            if s > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = s - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = s

        dai = alpha[i] - old_ai
        daj = alpha[j] - old_aj
        for t in range(n):
            G[t] += y[t] * (y[i] * K[t, i] * dai + y[j] * K[t, j] * daj)
        it += 1
    return alpha, _rho(alpha, G, y, C), it, False, gap


@numba.njit(cache=True, nogil=True)
def _rho(alpha, G, y, C):
    ub = np.inf
    lb = -np.inf
    n_free = 0
    s = 0.0
    for t in range(alpha.shape[0]):
        yg = y[t] * G[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            s += yg
    if n_free > 0:
        return s / n_free
    return 0.5 * (ub + lb)


def kkt_violations(K, y, alpha, b, C):
    """Per-sample KKT violation of a dual solution with bias ``b``.

    Uses the margin ``m_i = y_i f(x_i)``: free vectors need ``m = 1``, zero
    multipliers ``m >= 1``, bounded ones ``m <= 1``.
    """
    f = K @ (alpha * y) + b
    m = y * f
    v = np.zeros_like(m)
    at0 = alpha <= 0
    atC = alpha >= C
    free = ~(at0 | atC)
    v[at0] = np.maximum(0.0, 1.0 - m[at0])
    v[atC] = np.maximum(0.0, m[atC] - 1.0)
    v[free] = np.abs(m[free] - 1.0)
    return v
