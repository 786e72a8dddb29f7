import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genelab.core import FitnessDatabase, GenotypeDomain, RandomSource
from genelab.selection import (
    FPS,
    ExponentialRanking,
    LinearRanking,
    NoValidGenotype,
    exponential_rank_weights,
    filter_population,
    fps_weights,
    generational_select,
    linear_rank_weights,
    ranking_weights,
    roulette_wheel,
    select_from_generations,
    sort_by_fitness,
    sus_indices,
    sus_select,
)

NEG = -math.inf
D = GenotypeDomain.box(0, 100, 1)


def members(*values):
    return [D.genotype((float(v),)) for v in values]


def fps_oracle(fitness):
    # Exact rational evaluation of 1/mu' + f - f_min over 1 - mu' f_min + sum f.
    valid = [Fraction(f) for f in fitness if f != NEG]
    mu = len(valid)
    f_min = min(valid)
    den = 1 - mu * f_min + sum(valid)
    return [
        (Fraction(1, mu) + Fraction(f) - f_min) / den if f != NEG else Fraction(0)
        for f in fitness
    ]


class TestFPS:
    def test_equal_fitness_uniform(self):
        assert fps_weights([7.0] * 4) == pytest.approx([0.25] * 4, abs=1e-15)

    def test_two_members(self):
        w = fps_weights([1.0, 3.0])
        assert w == pytest.approx([1 / 6, 5 / 6], abs=1e-15)
        assert [Fraction(x).limit_denominator(100) for x in w] == fps_oracle([1, 3])

    def test_invalid_gets_zero(self):
        assert fps_weights([5.0, NEG]) == [1.0, 0.0]

    def test_all_invalid(self):
        with pytest.raises(NoValidGenotype):
            fps_weights([NEG, NEG])

    @settings(max_examples=200)
    @given(st.lists(st.one_of(st.integers(-50, 50), st.just(NEG)), min_size=1, max_size=30))
    def test_matches_rational_oracle(self, fitness):
        fitness = [float(f) for f in fitness]
        if all(f == NEG for f in fitness):
            return
        want = fps_oracle(fitness)
        for got, exact in zip(fps_weights(fitness), want):
            assert got == pytest.approx(float(exact), abs=1e-12)

    def test_large_offset_is_stable(self):
        w = fps_weights([1e15, 1e15 + 2.0])
        assert w == pytest.approx([1 / 6, 5 / 6], abs=1e-12)


class TestRanking:
    def test_single_valid_member(self):
        assert linear_rank_weights(1) == [1.0]
        assert exponential_rank_weights(1) == [1.0]
        assert ranking_weights([NEG, 3.0, NEG]) == [0.0, 1.0, 0.0]

    def test_linear_closed_form(self):
        assert linear_rank_weights(4, 2.0) == pytest.approx([0, 1 / 6, 2 / 6, 3 / 6], abs=1e-15)

    def test_linear_rational_oracle(self):
        for n in (2, 3, 7, 20):
            for s in (Fraction(3, 2), Fraction(2)):
                exact = [(2 - s) / n + 2 * j * (s - 1) / (n * (n - 1)) for j in range(n)]
                got = linear_rank_weights(n, float(s))
                assert got == pytest.approx([float(e) for e in exact], abs=1e-15)

    def test_linear_pressure_range(self):
        with pytest.raises(ValueError):
            linear_rank_weights(3, 1.0)
        with pytest.raises(ValueError):
            LinearRanking(2.5)

    def test_exponential_n3(self):
        w = exponential_rank_weights(3)
        total = 2 - math.exp(-1) - math.exp(-2)
        assert w == pytest.approx([0.0, 0.42232, 0.57768], abs=1e-5)
        assert w[1] == pytest.approx((1 - math.exp(-1)) / total, abs=1e-15)

    def test_weights_follow_rank_not_position(self):
        w = ranking_weights([3.0, 1.0, 2.0])
        assert w == pytest.approx([2 / 3, 0.0, 1 / 3], abs=1e-15)

    def test_ties_get_distinct_weights(self):
        w = ranking_weights([1.0, 1.0, 1.0])
        assert len(set(w)) == 3
        assert w == pytest.approx([0.0, 1 / 3, 2 / 3], abs=1e-15)

    def test_callables(self):
        f = [1.0, NEG, 4.0]
        assert FPS()(f) == fps_weights(f)
        assert LinearRanking()(f) == ranking_weights(f, "linear")
        assert ExponentialRanking()(f) == ranking_weights(f, "exponential")
        assert (FPS().name, LinearRanking().name, ExponentialRanking().name) == (
            "fps", "lin-rs", "exp-rs",
        )


class TestSortAndFilter:
    def test_sort(self):
        assert sort_by_fitness([3.0, 1.0, 2.0]) == [1, 2, 0]
        assert sort_by_fitness([1.0] * 4) == [0, 1, 2, 3]
        assert sort_by_fitness([NEG, 5.0, NEG]) == [0, 2, 1]

    def test_filter(self):
        p = GenotypeDomain.permutation(2)
        g0, g1, g2 = p.genotype((0, 1)), p.genotype((1, 1)), p.genotype((1, 0))
        assert filter_population([g0, g1, g2], lambda g: p.predicate(g.values)) == [g0, g2]
        assert filter_population([g0, g2], lambda g: True) == [g0, g2]
        assert filter_population([g0, g2], lambda g: False) == []


class TestWheels:
    def test_roulette_certain(self):
        pop = members(1, 2)
        rng = RandomSource(0)
        assert all(roulette_wheel(pop, [0.0, 1.0], rng) is pop[1] for _ in range(200))

    def test_roulette_frequency(self):
        pop = members(1, 2)
        rng = RandomSource(1)
        hits = sum(roulette_wheel(pop, [0.5, 0.5], rng) is pop[0] for _ in range(10_000))
        assert abs(hits / 10_000 - 0.5) <= 0.02

    def test_roulette_skips_zero_weight(self):
        pop = members(1, 2, 3)
        rng = RandomSource(2)
        assert all(roulette_wheel(pop, [0.5, 0.0, 0.5], rng) is not pop[1] for _ in range(2000))

    def test_sus_half_half(self):
        pop = members(1, 2)
        for seed in range(50):
            assert sorted(sus_indices([0.5, 0.5], 2, RandomSource(seed))) == [0, 1]

    def test_sus_all_mass_on_first(self):
        pop = members(1, 2, 3)
        assert sus_select(pop, [1.0, 0.0, 0.0], 3, RandomSource(0)) == [pop[0]] * 3

    def test_sus_roundoff_falls_to_last_positive(self, scripted):
        # cumulative sum 0.3 + 0.6 < 1 leaves a gap past the last cell
        idx = sus_indices([0.3, 0.6, 0.0], 1, scripted(random=[0.95]))
        assert idx == [1]

    @settings(max_examples=300)
    @given(
        st.lists(st.floats(0, 1), min_size=1, max_size=40),
        st.sampled_from([2, 10, 100]),
        st.integers(0, 2**32),
    )
    def test_sus_count_bounds(self, raw, mu, seed):
        total = sum(raw)
        if total <= 0:
            return
        w = [x / total for x in raw]
        counts = Counter(sus_indices(w, mu, RandomSource(seed)))
        for i, wi in enumerate(w):
            assert math.floor(mu * wi - 1e-9) <= counts[i] <= math.ceil(mu * wi + 1e-9)


class TestGenerational:
    def test_replaces(self):
        a, b = members(1, 2), members(3, 4)
        assert generational_select(a, b) == b
        assert generational_select(a, a) == a

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            generational_select(members(1, 2, 3), members(1, 2))

    def test_select_from_generations(self):
        db = FitnessDatabase(lambda x: x[0])
        pop = members(1, 2, 3)
        assert select_from_generations([pop], FPS(), 5, RandomSource(3), db) == sus_select(
            pop, FPS()(db.many(pop)), 5, RandomSource(3)
        )
        assert select_from_generations([pop, []], FPS(), 5, RandomSource(3), db) == sus_select(
            pop, FPS()(db.many(pop)), 5, RandomSource(3)
        )

    def test_invalid_generation_never_selected(self):
        d = GenotypeDomain.box(0, 100, 1, predicate=lambda x: x[0] >= 50)
        db = FitnessDatabase(lambda x: x[0])
        bad = [d.genotype((float(v),)) for v in (1, 2, 3)]
        good = [d.genotype((float(v),)) for v in (60, 70)]
        picked = select_from_generations([bad, good], LinearRanking(), 50, RandomSource(0), db)
        assert set(picked) <= set(good)
