"""Simulate Johansen trace-statistic quantiles for a given deterministic case.

Draws m-dimensional Gaussian random walks of length T, runs the trace test
for the null of no cointegration with lag_diff = 0, and reports the 90/95/99%
quantiles. Used to build the restricted-constant column of
crates/core/data/johansen_trace_cv.json (the other two cases come from the
MacKinnon-Haug-Michelis tables). Run with the unrestricted case to check the
simulation against the published numbers.

usage: python3 simulate_trace_cv.py {restricted_constant|unrestricted_constant|none} [reps] [T]
"""
import sys
import numpy as np


def trace_stats(case, m, T, reps, rng, batch=250):
    out = []
    for start in range(0, reps, batch):
        b = min(batch, reps - start)
        eps = rng.standard_normal((b, T + 1, m))
        y = np.cumsum(eps, axis=1)
        dy = y[:, 1:, :] - y[:, :-1, :]
        ylag = y[:, :-1, :]
        if case == "restricted_constant":
            r0 = dy
            r1 = np.concatenate([ylag, np.ones((b, T, 1))], axis=2)
        elif case == "unrestricted_constant":
            r0 = dy - dy.mean(axis=1, keepdims=True)
            r1 = ylag - ylag.mean(axis=1, keepdims=True)
        else:
            r0, r1 = dy, ylag
        s00 = np.einsum("bti,btj->bij", r0, r0) / T
        s01 = np.einsum("bti,btj->bij", r0, r1) / T
        s11 = np.einsum("bti,btj->bij", r1, r1) / T
        a = np.einsum("bji,bjk->bik", s01, np.linalg.solve(s00, s01))
        lam = np.linalg.eigvals(np.linalg.solve(s11, a)).real
        lam = np.sort(lam, axis=1)[:, ::-1][:, :m]
        lam = np.clip(lam, 0.0, 1.0 - 1e-12)
        out.append(-T * np.log1p(-lam).sum(axis=1))
    return np.concatenate(out)


def main():
    case = sys.argv[1]
    reps = int(sys.argv[2]) if len(sys.argv) > 2 else 40000
    T = int(sys.argv[3]) if len(sys.argv) > 3 else 2000
    rng = np.random.default_rng(20240801)
    for m in range(1, 13):
        s = trace_stats(case, m, T, reps, rng)
        q = np.quantile(s, [0.90, 0.95, 0.99])
        print(f"{m} {q[0]:.3f} {q[1]:.3f} {q[2]:.3f}", flush=True)


if __name__ == "__main__":
    main()
