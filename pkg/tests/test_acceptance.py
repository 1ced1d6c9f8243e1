"""Acceptance criteria A1-A10, one test each.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary (see conftest.py). Run directly with `python tests/test_acceptance.py`
for the lines alone.
"""
import pytest

from hardyspec import acceptance

LINES = []

# mpmath Bessel oracles for -u'' = lam delta^-alpha u, Dirichlet on [1e-8, eps]:
# alpha = 1, eps = 0.1: lam = j_{1,1}^2 / (4 eps) as eps_min -> 0
ALPHA1_EPS01 = 36.7049266053097331
# alpha = 3: root of J1(xa) Y1(xb) = J1(xb) Y1(xa), xa = 2 sqrt(lam/1e-8), xb = 2 sqrt(lam/eps)
ALPHA3 = {0.1: 3.670494923251483e-08, 0.0125: 3.670510761797110e-08}


@pytest.mark.parametrize("cid", acceptance.IDS)
def test_criterion(cid):
    fn = acceptance.RUNNERS[cid]
    out = fn(seed=0) if cid in ("A4", "A5") else fn()
    line = out.line()
    LINES.append(line)
    print(line)
    assert out.passed, out.to_dict()["details"]


def test_power_one_exterior_bottom_doubles():
    # the growth mechanism probed by A10 is visible for alpha < 2
    lams = [acceptance.exterior_bottom_power(1.0, 0.1 / 2 ** k) for k in range(4)]
    assert lams[0] == pytest.approx(ALPHA1_EPS01, rel=1e-4)
    assert all(lams[k + 1] / lams[k] >= 1.8 for k in range(3))


@pytest.mark.parametrize("eps", sorted(ALPHA3))
def test_power_three_exterior_bottom_matches_bessel(eps):
    # the bottom sits at the inner cutoff and does not grow as eps shrinks
    assert acceptance.exterior_bottom_power(3.0, eps) == pytest.approx(ALPHA3[eps], rel=1e-4)


if __name__ == "__main__":
    for o in acceptance.run():
        print(o.line())
