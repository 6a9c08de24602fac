import math
from fractions import Fraction

import pytest

from hgbs import analysis
from hgbs.analysis import (
    CostModel,
    TrafficModel,
    blocked_fraction,
    compute_cost,
    connectivity_order,
    connectivity_pz,
    ctf_weights,
    expected_random_break_budget,
    highest_order_blocked,
    memory_cost,
    resiliency_pr,
    resiliency_pr_exact,
    scheme_connectivity,
    zone_break_exact,
)
from hgbs.errors import ParamDomain
from hgbs.keying import DegreePolicy


class TestTraffic:
    def test_n3(self):
        t = ctf_weights(3)
        assert t.weights == (Fraction(4, 7), Fraction(2, 7), Fraction(1, 7))

    def test_n1(self):
        assert ctf_weights(1).weights == (1,)

    def test_n2(self):
        assert ctf_weights(2).weights == (Fraction(2, 3), Fraction(1, 3))

    @pytest.mark.parametrize("n", range(1, 16))
    def test_sums_to_one(self, n):
        assert sum(ctf_weights(n).weights) == 1

    def test_normalization_enforced(self):
        with pytest.raises(ParamDomain):
            TrafficModel(2, "geometric", (Fraction(1), Fraction(1, 2)))


class TestConnectivity:
    def test_pz_top(self):
        assert connectivity_pz(4, 4, 16)[0] == 1

    def test_pz_example(self):
        assert connectivity_pz(1, 2, 4) == (Fraction(3, 14), Fraction(1, 4))

    def test_pz_single_zone(self):
        assert connectivity_pz(1, 1, 4)[0] == 1

    def test_bound_sweep(self):
        for n in range(1, 9):
            for z in range(1, n + 1):
                for m in (4, 16, 36):
                    pz, bound = connectivity_pz(z, n, m)
                    assert pz <= bound == Fraction(1, 4 ** (n - z))

    def test_order_top(self):
        for beta in (1.0, 1.3, 2.0):
            assert connectivity_order(5, 5, beta) == 1.0

    def test_order_values(self):
        assert connectivity_order(1, 4, 1) == 0.125
        assert connectivity_order(1, 4, 2) == 0.015625

    def test_beta_domain(self):
        with pytest.raises(ParamDomain):
            connectivity_order(1, 4, 2.5)


class TestMemory:
    def test_m1_exact(self):
        assert memory_cost(64, 3, 0.6, 61, "M1").bits_exact == 1837

    def test_m1_literal(self):
        assert memory_cost(64, 3, 0.6, 61, "M1").bits == pytest.approx(1946.8, abs=1e-9)

    def test_m2_m3_values(self):
        # M2: 7 + 7 * 10.6 * 61; M3: 0.6*64*61*(2 - 1/8); M3_EXACT: ... *(2 - 1/4)
        assert memory_cost(64, 3, 0.6, 61, "M2").bits == pytest.approx(7 + 7 * 10.6 * 61)
        assert memory_cost(64, 3, 0.6, 61, "M3").bits == pytest.approx(0.6 * 64 * 61 * 1.875)
        assert memory_cost(64, 3, 0.6, 61, "M3_EXACT").bits == pytest.approx(0.6 * 64 * 61 * 1.75)
        assert memory_cost(64, 3, 0.6, 61, "M3_EXACT").bits_exact == 7 * 9 * 61

    def test_dominance_sweep(self):
        for n in range(1, 11):
            for k in (1, 2, 3):
                N = 2 ** (n - 1) * (2 * k) ** 2
                for alpha in (0.2, 0.4, 0.6, 0.8, 1.0):
                    c = {m: memory_cost(N, n, alpha, 61, m) for m in analysis.MEMORY_MODELS}
                    assert c["M2"].bits >= c["M1"].bits and c["M2"].bits_exact >= c["M1"].bits_exact
                    assert c["M3_EXACT"].bits <= c["M3"].bits
                    assert c["M3_EXACT"].bits_exact <= c["M3"].bits_exact

    def test_unknown_model(self):
        with pytest.raises(ParamDomain):
            memory_cost(64, 3, 0.6, 61, "M4")


class TestCompute:
    def test_example(self):
        r = compute_cost(DegreePolicy("doubling", 9), ctf_weights(2), CostModel(cmp_cost=1))
        assert r.field_mults == 25
        assert r.word_mults == 675

    def test_single_order(self):
        assert compute_cost(DegreePolicy("flat", 9), ctf_weights(1), CostModel()).field_mults == 18

    def test_word_constants(self):
        assert analysis.WORD_MULTS == {"schoolbook_64": 64, "karatsuba_64": 27, "mixed_16x64": 16}
        for name, c in analysis.WORD_MULTS.items():
            assert compute_cost(DegreePolicy("flat", 9), ctf_weights(1), CostModel(), name).word_mults == 18 * c


class TestResiliency:
    def test_empty_attack(self):
        assert resiliency_pr(0, 3, 16, 64) == 0.0

    def test_below_threshold(self):
        assert resiliency_pr(5, 9, 16, 64) == 0.0
        assert resiliency_pr(9, 9, 16, 64, threshold=10) == 0.0

    def test_example(self):
        assert resiliency_pr(2, 2, 1, 2) == pytest.approx(0.25, rel=1e-15)

    def test_against_rational(self):
        for N_c in range(0, 31):
            for t0 in (1, 3, 9):
                for thr in (t0, t0 + 1):
                    exact = resiliency_pr_exact(N_c, t0, 16, 64, thr)
                    got = resiliency_pr(N_c, t0, 16, 64, thr)
                    if exact == 0:
                        assert got == 0
                    else:
                        assert abs(got - float(exact)) / float(exact) < 1e-12

    def test_monotone(self):
        vals = [resiliency_pr(nc, 60, 256, 204800) for nc in range(0, 90001, 5000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0.99

    def test_hypergeometric_brute_force(self):
        # N=8, m=4: enumerate every capture set
        import itertools

        for N_c in range(0, 9):
            for thr in range(0, 5):
                hits = sum(sum(v < 4 for v in s) >= thr for s in itertools.combinations(range(8), N_c))
                assert zone_break_exact(N_c, thr, 4, 8) == Fraction(hits, math.comb(8, N_c))

    def test_expected_budget(self):
        assert expected_random_break_budget(10, 16, 64) == Fraction(650, 17)


class TestBlocked:
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_normalized_constant(self, i):
        assert blocked_fraction(i, 4, ctf_weights(4)) == Fraction(1, 15)

    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_raw_constant(self, i):
        assert blocked_fraction(i, 4, ctf_weights(4, normalized=False)) == Fraction(1, 8)

    def test_single_order(self):
        assert blocked_fraction(1, 1, ctf_weights(1)) == 1

    @pytest.mark.parametrize("n", range(1, 10))
    def test_constancy(self, n):
        t = ctf_weights(n)
        assert {blocked_fraction(i, n, t) for i in range(1, n + 1)} == {Fraction(2 ** (n - 1), 2**n - 1) / 2 ** (n - 1)}

    def test_highest_order(self):
        h = highest_order_blocked(4, ctf_weights(4))
        assert h == {"half_p_n": Fraction(1, 30), "raw_p_n": Fraction(1, 8)}


def _falling(pool, ring):
    return math.factorial(pool - ring) ** 2 / (math.factorial(pool - 2 * ring) * math.factorial(pool))


class TestSchemes:
    def test_hgbs(self):
        assert scheme_connectivity("hgbs") == 1
        assert scheme_connectivity("HGBS", N=1000) == 1

    def test_eg(self):
        assert scheme_connectivity("eg", P=2, k=1) == 0.5

    def test_ddhv(self):
        assert scheme_connectivity("ddhv", omega=2, tau=1) == 0.5

    def test_gbs(self):
        assert scheme_connectivity("gbs", N=9) == 1.0

    def test_others(self):
        assert scheme_connectivity("gbs3d", N=27) == pytest.approx(3 / 13)
        assert scheme_connectivity("plat", N=27) == pytest.approx(1.0)
        assert scheme_connectivity("cps", m=16, N=64) == 0.25

    def test_factorial_agreement(self):
        for P in range(2, 21):
            for k in range(1, P // 2 + 1):
                want = 1 - Fraction(math.factorial(P - k) ** 2, math.factorial(P - 2 * k) * math.factorial(P))
                for got in (scheme_connectivity("eg", P=P, k=k), scheme_connectivity("ddhv", omega=P, tau=k)):
                    assert abs(got - float(want)) <= 1e-12 * float(want)

    def test_large_pool_log_space(self):
        want = 1 - Fraction(math.comb(5000 - 60, 60), math.comb(5000, 60))
        assert scheme_connectivity("eg", P=5000, k=60) == pytest.approx(float(want), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ParamDomain):
            scheme_connectivity("eg", P=3, k=2)
        with pytest.raises(ParamDomain):
            scheme_connectivity("gbs")
        with pytest.raises(ParamDomain):
            scheme_connectivity("blom", N=4)
