"""One test per acceptance criterion, each run through the verification suite."""

import time

import pytest

from ancrc.report import emit_report, exit_status
from ancrc.suite import SuiteConfig, run_suite

SEED = 0


def run(only, n_values=(1, 2, 3), samples=3, seed=SEED):
    cfg = SuiteConfig(n_values=n_values, samples=samples, seed=seed, only=tuple(only))
    t0 = time.perf_counter()
    reports, status = run_suite(cfg)
    return reports, status, time.perf_counter() - t0


def select(reports, identity):
    out = [r for r in reports if r.identity == identity or r.identity.startswith(identity + ".")]
    assert out, f"no records for {identity}"
    return out


def check(reports, requirements):
    """requirements: identity -> (tolerance, minimum record count); returns failure messages."""
    problems = []
    for ident, (tol, count) in requirements.items():
        recs = select(reports, ident)
        if len(recs) < count:
            problems.append(f"{ident}: {len(recs)} records < {count}")
        for r in recs:
            if r.tolerance != tol:
                problems.append(f"{ident}: tolerance {r.tolerance} != {tol}")
            if not r.passed:
                problems.append(f"{r.identity} n={r.n} {r.param}: residual {r.residual:.3e} vs {r.tolerance:.1e}")
    return problems


def finish(line, k, title, problems, elapsed, limit):
    if elapsed > limit:
        problems = problems + [f"runtime {elapsed:.1f}s > {limit}s"]
    status = "PASS" if not problems else "FAIL"
    line(f"{status} criterion {k}: {title} ({elapsed:.1f}s)")
    assert not problems, "\n".join(problems)


def test_criterion_1_mirror_correlators(acceptance_line):
    reps, _, dt = run(["mirror"], n_values=(1, 2, 3, 4))
    probs = check(reps, {
        "mirror.residues_closed_vs_contour": (1e-9, 36),
        "mirror.three_point_vs_quantum": (1e-9, 36),
    })
    finish(acceptance_line, 1, "residue correlators and quantum correlators agree", probs, dt, 10)


def test_criterion_2_qde_flatness(acceptance_line):
    reps, _, dt = run(["qde"])
    probs = check(reps, {"qde.flatness": (1e-4, 9)})
    finish(acceptance_line, 2, "J-function flat sections solve the QDE", probs, dt, 30)


def test_criterion_3_u_matrix(acceptance_line):
    reps, _, dt = run(["u"])
    probs = check(reps, {
        "u.symplectic": (1e-9, 15),
        "u.large_z_limit": (1e-4, 3),
        "u.factorization_scalar": (1e-9, 15),
        "u.factorization_shift": (1e-9, 15),
    })
    finish(acceptance_line, 3, "U symplectic, large-z limit, A B = c U", probs, dt, 10)


def test_criterion_4_open_crc(acceptance_line):
    reps, _, dt = run(["ocrc"])
    probs = check(reps, {
        "ocrc.routes_agree": (1e-8, 15),
        "ocrc.ineffective_specialization": (1e-8, 18),
        "ocrc.column_sums": (1e-10, 18),
        "ocrc.effective_selection": (1e-10, 18),
    })
    finish(acceptance_line, 4, "open CRC map routes and specializations", probs, dt, 10)


def test_criterion_5_lauricella_engine(acceptance_line):
    reps, _, dt = run(["special"])
    probs = check(reps, {
        "special.fd_series_vs_bruteforce": (1e-9, 1),
        "special.fd_leading_asymptotics": (2e-2, 1),
        "special.toscano": (1e-10, 1),
        "special.beta_point": (1e-10, 6),
    })
    finish(acceptance_line, 5, "Lauricella series, asymptotics, Toscano, Beta points", probs, dt, 60)


def test_criterion_6_monodromy(acceptance_line):
    reps, _, dt = run(["monodromy"])
    probs = check(reps, {
        "monodromy.oracle.LR1": (1e-6, 3),
        "monodromy.det.CP": (1e-10, 3),
        "monodromy.det.LR1": (1e-10, 3),
    })
    finish(acceptance_line, 6, "n = 1 LR1 loop vs continuation, determinants", probs, dt, 60)


@pytest.mark.xfail(strict=True, reason="displayed CP and LR2 matrices disagree with the continued Gauss system")
def test_criterion_6_monodromy_other_loops(acceptance_line):
    reps, _, dt = run(["monodromy"])
    probs = []
    for ident in ("monodromy.oracle.CP", "monodromy.oracle.LR2"):
        for r in select(reps, ident):
            if not r.passed:
                probs.append(f"{r.identity} {r.param}: residual {r.residual:.3e} vs {r.tolerance:.1e}")
    finish(acceptance_line, "6 (CP, LR2)", "closed forms vs continuation, expected failure", probs, dt, 60)


def test_criterion_7_calibration(acceptance_line):
    reps, _, dt = run(["calib"])
    probs = check(reps, {
        "calib.normalization_diagonal": (4.5, 9),
        "calib.normalization_offdiagonal": (4.5, 9),
        "calib.epsilon_ucl_limit": (0.2, 9),
        "calib.A_diagonal_asymptotics": (4.5, 9),
    })
    finish(acceptance_line, 7, "calibration slopes and large-radius limits", probs, dt, 60)


def test_criterion_8_determinism(acceptance_line):
    t0 = time.perf_counter()
    docs = []
    for workers in (1, 4):
        cfg = SuiteConfig(n_values=(1, 2), samples=2, seed=123, workers=workers)
        reports, status = run_suite(cfg)
        docs.append(emit_report(reports, "json", seed=cfg.seed, config=cfg.as_dict()))
    probs = [] if docs[0] == docs[1] else ["reports differ between runs"]
    finish(acceptance_line, 8, "same seed gives byte-identical JSON", probs, time.perf_counter() - t0, 120)


def test_full_suite_exit_status():
    reps, status, _ = run([], n_values=(1, 2), samples=1)
    assert status == exit_status(reps) == 0
