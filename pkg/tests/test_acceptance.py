"""Acceptance criteria A1-A10, one PASS/FAIL line each."""

import itertools
import math
import time

import numpy as np

from conftest import SUITE_LIMIT_S, suite_elapsed
from qesrel.cli import main
from qesrel.elimination import eliminate_small_n
from qesrel.models import (
    Model,
    ModelSector,
    build_ode,
    dirac_energy,
    energy_candidates,
    kg_energy_roots,
    scaled_family,
    solve_scaled,
    solve_sector,
    wavefunction,
)
from qesrel.models.odes import ode_coefficients, scaled_coupling
from qesrel.polyvec import Poly, from_roots
from qesrel.qes import QesOde, certify_roots, closure_residual, closure_scale, solve_bethe
from qesrel.sl2 import assemble_H, direct_matrix, generators, qes_condition, spectrum


def report(capsys, name, checks, note=""):
    failed = [k for k, ok in checks.items() if not ok]
    line = f"{name} {'PASS' if not failed else 'FAIL'}"
    if note:
        line += f": {note}"
    if failed:
        line += f" [failed: {', '.join(failed)}]"
    with capsys.disabled():
        print("\n" + line)
    assert not failed, line


def rel(a, b, tol):
    return abs(a - b) <= tol * max(abs(b), 1e-300) if b != 0 else abs(a) <= tol


def cold_solve(sector, **kw):
    solve_scaled.cache_clear()
    t = time.perf_counter()
    sols = solve_sector(sector, **kw)
    return sols, time.perf_counter() - t


def test_a1_kg_q1_fixture(capsys):
    sec = ModelSector(Model.KLEIN_GORDON, 1, 1, 1.0, ell=0, z_s=1.0, z_v=1.0)
    sols, dt = cold_solve(sec)
    ok = len(sols) == 1
    s = sols[0] if ok else None
    lam1 = s.derived.lambda1 if ok else math.nan
    checks = {
        "one solution": ok,
        "E=3/5": ok and rel(s.derived.energy, 0.6, 1e-10),
        "xi=4/5": ok and rel(s.derived.decay, 0.8, 1e-10),
        "beta=5/4": ok and rel(s.beta, 1.25, 1e-10),
        "beta=2(nu+1)/lambda1": ok and rel(s.beta, 2 * 2 / lam1, 1e-10),
        "root {0}": ok and s.roots == (0.0,),
        "lambda2=0": ok and abs(s.derived.lambda2) <= 1e-10,
        "certified": ok and s.certified,
        "runtime<0.1s": dt < 0.1,
    }
    report(capsys, "A1", checks, f"E={s.derived.energy!r} beta={s.beta!r} t={dt * 1e3:.1f} ms" if ok else "")


def test_a2_dirac_energy_formula(capsys):
    solve_scaled.cache_clear()
    worst, missing, count = 0.0, 0, 0
    t = time.perf_counter()
    for n, kappa, z, c in itertools.product((1, 2), range(1, 5), (-1.0, -2.0, -4.0, -8.0), (0.0, 0.5)):
        sec = ModelSector(Model.DIRAC, 1, n, 1.0, kappa=kappa, z_delta=z, c=c)
        sols = solve_sector(sec)
        count += 1
        if not sols:
            missing += 1
            continue
        E = dirac_energy(1.0, c, z, n, kappa)
        worst = max(worst, max(abs(s.derived.energy - E) for s in sols))
    dt = time.perf_counter() - t
    checks = {"64 sectors": count == 64, "all solved": missing == 0, "|dE|<=1e-10": worst <= 1e-10,
              "runtime<1s": dt < 1.0}
    report(capsys, "A2", checks, f"max |dE|={worst:.1e}, {dt * 1e3:.0f} ms")


def test_a3_kg_energy_branch(capsys):
    unsquared, quad, flagged, solved = True, True, True, True
    for n, ell, z in itertools.product((1, 2), (0, 1), (0.5, 1.0, 2.0)):
        sec = ModelSector(Model.KLEIN_GORDON, 1, n, 1.0, ell=ell, z_s=z, z_v=z)
        nu = ell + 1
        cands = energy_candidates(sec)
        valid = [c for c in cands if c.valid]
        minus = [c for c in cands if c.minus_branch]
        flagged &= len(minus) == 1 and not minus[0].bound and abs(minus[0].decay) <= 1e-12
        flagged &= "minus-branch" in minus[0].flags and "decay-not-positive" in minus[0].flags
        roots = kg_energy_roots(1.0, z, z, n, nu)
        for c in valid:
            unsquared &= abs((n + nu) * c.decay - (z + c.energy * z)) <= 1e-10
            quad &= any(abs(abs(c.energy) - abs(r)) <= 1e-10 for r in roots)
        sols = solve_sector(sec)
        solved &= bool(sols) and all(any(abs(s.derived.energy - c.energy) <= 1e-12 for c in valid) for s in sols)
    checks = {"unsquared relation": unsquared, "quadratic root": quad, "minus branch flagged": flagged,
              "solver uses valid root": solved}
    report(capsys, "A3", checks, "12 lambda2=0 sectors")


def test_a4_dirac_q1_fixture(capsys):
    sec = ModelSector(Model.DIRAC, 1, 1, 1.0, kappa=1, c=0.0, z_delta=-4.0)
    sols, dt = cold_solve(sec)
    ok = len(sols) == 1
    s = sols[0] if ok else None
    d = s.derived if ok else None
    cut = abs(s.beta * (2 * d.sigma + d.gamma * sec.z_delta) + 2 * sec.kappa) if ok else math.inf
    inv = []
    for kappa in range(1, 5):
        (sk,) = solve_sector(sec.with_(kappa=kappa))
        inv.append(sk.w)
    checks = {
        "E=0": ok and abs(d.energy) <= 1e-12,
        "sigma=1": ok and rel(d.sigma, 1.0, 1e-12),
        "beta=1": ok and rel(s.beta, 1.0, 1e-12),
        "root {0}": ok and s.roots == (0.0,),
        "cutoff residual<1e-12": cut < 1e-12,
        "sigma*beta=1 for kappa 1..4": all(abs(w - 1.0) <= 1e-12 for w in inv),
        "runtime<0.1s": dt < 0.1,
    }
    report(capsys, "A4", checks, f"cutoff residual {cut:.1e}, t={dt * 1e3:.1f} ms")


def test_a5_dirac_q2_n1(capsys):
    worst_res, worst_sq, worst_u = 0.0, 0.0, 0.0
    found = 0
    for kappa in range(1, 5):
        (sc,) = solve_scaled(Model.DIRAC, 2, 1, kappa)
        worst_res = max(worst_res, sc.residual)
        worst_u = max(worst_u, abs(sc.u[0] + 1.0))
        sols = solve_sector(ModelSector(Model.DIRAC, 2, 1, 1.0, kappa=kappa, z_delta=-4.0))
        for s in sols:
            found += s.certified
            sb = s.derived.sigma * s.beta
            worst_sq = max(worst_sq, abs(sb * sb - 2 * (kappa + 1)))
            worst_res = max(worst_res, s.bethe.closure_residual_norm, s.bethe.bethe_residual_norm,
                            *(abs(v) for v in s.constraint_residuals.values()))
    checks = {"4 certified": found == 4, "residual<1e-10": worst_res < 1e-10,
              "sigma^2 beta^2 = 2(kappa+1)": worst_sq <= 1e-10, "u1 = -1": worst_u <= 1e-10}
    report(capsys, "A5", checks, f"max residual {worst_res:.1e}, |u1+1|<={worst_u:.1e}")


def test_a6_kg_q2_fixture(capsys):
    sols = solve_sector(ModelSector(Model.KLEIN_GORDON, 2, 1, 1.0, ell=0, z_s=2.0, z_v=0.0))
    ok = len(sols) == 1
    s = sols[0] if ok else None
    d = s.derived if ok else None
    checks = {
        "E=0": ok and abs(d.energy) <= 1e-10,
        "xi=1": ok and rel(d.xi, 1.0, 1e-10),
        "beta=2": ok and rel(s.beta, 2.0, 1e-10),
        "lambda2=4": ok and rel(d.lambda2, 4.0, 1e-10),
        "t1=-1": ok and rel(s.roots[0], -1.0, 1e-10),
        "beta^2 lambda1^2 = 64": ok and rel(s.beta ** 2 * d.lambda1 ** 2, 64.0, 1e-10),
        "certified": ok and s.certified,
    }
    report(capsys, "A6", checks)


def test_a7_n2_roots(capsys):
    closed, derived, nonzero = True, True, True
    alt = []
    sectors = [ModelSector(Model.DIRAC, 1, 2, 1.0, kappa=k, z_delta=z) for k in (1, 2, 3) for z in (-2.0, -4.0)]
    sectors += [ModelSector(Model.KLEIN_GORDON, 1, 2, 1.0, ell=l, z_s=z, z_v=z) for l in (0, 1) for z in (0.5, 1.0)]
    count = 0
    for sec in sectors:
        m = sec.m
        for s in solve_sector(sec):
            count += 1
            sd, w = s.derived.decay, s.w
            e = max(s.roots, key=abs)
            disc = math.sqrt((1 + m + w) ** 2 - 4 * w)
            forms = [((1 + m + w) + sg * disc) / (2 * sd) for sg in (1, -1)]
            closed &= any(abs(e - f) <= 1e-9 * max(1.0, abs(f)) for f in forms)
            closed &= 0.0 in s.roots
            derived &= abs(s.constraint_residuals["n2_quadratic"]) <= 1e-10
            a = s.constraint_residuals["n2_alternative"]
            alt.append(a)
            nonzero &= abs(a) > 1e-6
    checks = {"solutions found": count == 2 * len(sectors), "closed-form root": closed,
              "(m+1)w^2-3(m+1)w+(2m+1)=0": derived, "alternative residual nonzero": nonzero}
    report(capsys, "A7", checks,
           f"{count} solutions; alternative-form residuals range {min(map(abs, alt)):.3g}..{max(map(abs, alt)):.3g}")


def test_a8_oracle_equivalence(capsys):
    stage1, bethe = True, True
    for kind, q, n, m in itertools.product(Model, (1, 2), (1, 2), (1, 2)):
        exact = [e for e in eliminate_small_n(scaled_family(kind, q, n, m), n) if e.params["w"] > 0]
        numeric = solve_scaled(kind, q, n, m)
        stage1 &= len(exact) == len(numeric)
        for e in exact:
            match = [
                s for s in numeric
                if np.allclose(s.u, e.roots, atol=1e-9, rtol=0) and abs(s.w - e.params["w"]) <= 1e-9
                and (kind is Model.DIRAC or abs(s.lambda2 - e.params["l2"]) <= 1e-9)
            ]
            stage1 &= len(match) == 1
            P, Q, _ = ode_coefficients(kind, q, 1.0, e.params["w"], m, scaled_coupling(kind, n, m),
                                       e.params.get("l2", 0.0))
            found = solve_bethe(Poly(P), Poly(Q), n)
            bethe &= any(np.allclose(f.roots, e.roots, atol=1e-9, rtol=0) for f in found)
    checks = {"stage-1 solver = elimination": stage1, "solve_bethe reproduces roots": bethe}
    report(capsys, "A8", checks, "32 (model, q, n, m) families")


def test_a9_sl2(capsys):
    comm_err = 0.0
    for n in range(0, 7):
        jm, j0, jp = generators(n)
        for lhs in ((jp @ jm - jm @ jp) + 2 * j0, (j0 @ jp - jp @ j0) - jp, (j0 @ jm - jm @ j0) + jm):
            comm_err = max(comm_err, float(np.max(np.abs(lhs.entries))))

    rng = np.random.default_rng(2024)
    eq_err = 0.0
    for n in range(1, 6):
        for _ in range(50):
            sigma, beta = rng.uniform(0.1, 3.0, size=2)
            kappa = int(rng.integers(1, 6))
            P, Q, R = ode_coefficients(Model.DIRAC, 1, sigma, beta, kappa, -2.0 * sigma * (n + kappa))
            ode = QesOde(Poly(P), Poly(Q), Poly(R), n)
            diff = np.max(np.abs(assemble_H(ode).entries - direct_matrix(ode).entries))
            eq_err = max(eq_err, diff / (max(1.0, ode.scale()) * n * n))

    (fx,) = solve_sector(ModelSector(Model.DIRAC, 1, 1, 1.0, kappa=1, z_delta=-4.0))
    ode = build_ode(fx.sector, fx.derived)
    minus_c0 = -fx.derived.gamma * fx.sector.z_delta * fx.beta
    in_spec = spectrum(direct_matrix(ode)).contains(minus_c0, tol=1e-9)

    negatives = []
    for sec in (ModelSector(Model.DIRAC, 2, 1, 1.0, kappa=1, z_delta=-4.0),
                ModelSector(Model.KLEIN_GORDON, 1, 1, 1.0, ell=0, z_s=1.0, z_v=1.0),
                ModelSector(Model.KLEIN_GORDON, 2, 1, 1.0, ell=0, z_s=2.0, z_v=0.0)):
        (s,) = solve_sector(sec)
        negatives.append(not qes_condition(build_ode(s.sector, s.derived)))
    checks = {"commutators<=1e-14": comm_err <= 1e-14, "H = direct<=1e-12": eq_err <= 1e-12,
              "-c0 in spectrum": in_spec, "other cases fail condition": all(negatives)}
    report(capsys, "A9", checks, f"commutator err {comm_err:.1e}, H-direct {eq_err:.1e}, -c0={minus_c0!r}")


def _exact_instance(rng, n):
    while True:
        roots = np.sort(rng.uniform(-3, 3, size=n))
        if n == 1 or np.min(np.diff(roots)) > 0.3:
            break
    P = Poly(rng.uniform(-2, 2, size=4))
    y = [-2.0 * P(t) * sum(1.0 / (t - u) for u in roots if u != t) for t in roots]
    Q = Poly(np.linalg.solve(np.vander(roots, n, increasing=True), y))
    if n <= 3:
        Q = Q + rng.uniform(-2, 2) * from_roots(roots)
    return P, Q, list(roots)


def test_a10_property_suite(capsys, tmp_path):
    rng = np.random.default_rng(10)
    closure_ok = 0
    for k in range(100):
        P, Q, roots = _exact_instance(rng, 1 + k % 4)
        sol = certify_roots(P, Q, roots)
        if sol is not None:
            ode = QesOde(P, Q, sol.R, len(roots))
            closure_ok += closure_residual(ode, sol.S).max_abs() <= 1e-10 * closure_scale(ode, sol.S)

    fixtures = [
        ModelSector(Model.KLEIN_GORDON, 1, 1, 1.0, ell=0, z_s=1.0, z_v=1.0),
        ModelSector(Model.DIRAC, 1, 1, 1.0, kappa=1, z_delta=-4.0),
        ModelSector(Model.DIRAC, 2, 1, 1.0, kappa=1, z_delta=-4.0),
        ModelSector(Model.KLEIN_GORDON, 2, 1, 1.0, ell=0, z_s=2.0, z_v=0.0),
        ModelSector(Model.DIRAC, 1, 2, 1.0, kappa=1, z_delta=-4.0),
        ModelSector(Model.KLEIN_GORDON, 1, 2, 1.0, ell=0, z_s=1.0, z_v=1.0),
    ]
    slope_ok = decay_ok = True
    for sec in fixtures:
        for s in solve_sector(sec):
            wf = wavefunction(s)
            r = np.geomspace(1e-4, 1e-2, 40)
            slope = np.polyfit(np.log(r), np.log(np.abs(wf.value(r))), 1)[0]
            slope_ok &= abs(slope - wf.prefactor_power) <= 1e-3
            grid = np.linspace(1e-3, 50.0 / wf.decay_rate, 5000)
            v = np.abs(wf.value(grid))
            decay_ok &= v[-1] < 1e-12 * v.max()

    runs = [
        ["solve", "--model", "dirac", "--q", "2", "--n", "2", "--kappa", "1", "--mu", "1", "--z-delta", "-4",
         "--seed", "3"],
        ["scan", "--model", "kg", "--q", "1", "--n", "1..2", "--ell", "0..1", "--mu", "1", "--zs", "1", "--zv", "1",
         "--seed", "3"],
    ]
    deterministic = True
    for argv in runs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{argv[0]}{k}.out"
            main(argv + ["--out", str(out)])
            capsys.readouterr()
            blobs.append(out.read_bytes())
        deterministic &= blobs[0] == blobs[1]
    elapsed = suite_elapsed()
    checks = {"100 closure certificates": closure_ok == 100, "log-slope": slope_ok, "decay": decay_ok,
              "byte-determinism": deterministic, f"elapsed<{SUITE_LIMIT_S:.0f}s so far": elapsed < SUITE_LIMIT_S}
    report(capsys, "A10", checks, f"{closure_ok}/100 certified; suite elapsed {elapsed:.1f} s at this point")
