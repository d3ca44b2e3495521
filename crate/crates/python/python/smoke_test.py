"""Smoke test for the pyprepot extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python crates/python/python/smoke_test.py`.
"""

import cmath
import math

import pyprepot as pp


def close(a, b, tol):
    return all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a, b))


def main():
    x = [0.0, 1.0, 0.5, -0.3]
    r = math.sqrt(sum(c * c for c in x[1:]))

    rest = pp.Charge.rest(1.0, [0.0, 0.0, 0.0])
    system = pp.ChargeSystem([rest])
    f = system.faraday(x)
    coulomb = [c / r**3 for c in x[1:]]
    assert close(f.e, coulomb, 1e-8), (f.e, coulomb)
    assert max(abs(b) for b in f.b) < 1e-8

    via_a = system.faraday_from_potential(x)
    assert close(via_a.e, f.e, 1e-8)

    moving = pp.Charge.uniform(1.0, [0.0, 0.0, 0.0, 0.0], [0.5, 0.0, 0.0])
    fs = pp.ChargeSystem([moving]).faraday(x)
    fc = moving.faraday_closed_form(x)
    assert close(fs.e, fc.e, 1e-6) and close(fs.b, fc.b, 1e-6)

    circle = pp.Path.circle([0.0, 0.0, 0.0, 0.5], 1.0, turns=2)
    phase = pp.loop_phase(rest, circle)
    assert phase.ok and phase.winding == -2
    assert abs(phase.delta_s - 2j * math.pi * phase.winding) < 1e-8
    assert pp.winding_number(rest, circle) == -2

    value, branch = pp.continue_along(rest, pp.Path.circle([0.0, 0.0, 0.0, 0.5], 1.0))
    assert branch == -1
    start = rest.prepotential([0.0, 1.0, 0.0, 0.5])
    assert cmath.isclose(value, start - 2j * math.pi, abs_tol=1e-9)

    try:
        pp.Charge.rest(0.0, [0.0, 0.0, 0.0])
    except pp.PrePotentialError:
        pass
    else:
        raise AssertionError("zero charge accepted")

    families = {f["name"]: f for f in pp.relations()}
    assert families["sigma-sigma"]["holds"]
    assert not families["sigma-rho"]["holds"]

    boost = pp.boost(1, 0.3)
    assert abs(boost[0][0] - math.cosh(0.3)) < 1e-15

    print("pyprepot smoke test: ok")


if __name__ == "__main__":
    main()
