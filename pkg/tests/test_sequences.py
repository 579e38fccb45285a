import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrlab.sequences import (
    Factor,
    GTable,
    IidRandom,
    PrimeGRS,
    SpecError,
    SquarefreeGRS,
    ThueMorse,
    admissibility_violation,
    block_count_oracle,
    digit_expansion,
    eval_a,
    generate_prefix,
    is_prime,
    load_spec,
    spec_from_dict,
    standard_squarefree,
    validate_admissible,
)

from conftest import prime_specs, recurrence_prefix


class TestAdmissible:
    def test_rudin_shapiro_table(self):
        assert validate_admissible(GTable.from_function(2, lambda j, n: j * (n % 2)))

    def test_ternary_diagonal(self):
        assert validate_admissible(GTable.from_function(3, lambda j, n: int(j == n % 3)))

    def test_standard_table_k4_fails(self):
        g = GTable.from_function(4, lambda j, n: j * n)
        assert not validate_admissible(g)
        # u = 0, i = 1 is fine (n -> n is onto); first failure is at i = 2
        assert admissibility_violation(g) == (0, 2)

    @pytest.mark.parametrize("k", range(2, 51))
    def test_standard_table_iff_prime(self, k):
        assert validate_admissible(GTable.standard(k)) == is_prime(k)

    def test_entries_reduced_on_load(self):
        g = GTable.from_rows([[2, -2], [5, 3]])
        assert g.values == ((0, 0), (1, 1))

    def test_table_shape_checked(self):
        with pytest.raises(SpecError):
            GTable.from_rows([[0, 0], [0]])


class TestDigits:
    @given(st.integers(0, 10 ** 30), st.integers(2, 40))
    def test_roundtrip(self, n, base):
        exp = digit_expansion(n, base)
        assert exp.value == n
        assert all(0 <= d < base for d in exp.digits)
        assert exp.digits[-1] != 0 or n == 0

    def test_block_oracle_examples(self):
        assert block_count_oracle(2, (1, 1), 3) == 1
        assert block_count_oracle(3, (1, 1), 13) == 2
        assert block_count_oracle(5, (2, 3), 0) == 0
        # "0110" has no leading zero: 6 = "110" -> one "11", one "10"
        assert block_count_oracle(2, (1, 1), 6) == 1
        assert block_count_oracle(2, (0, 1), 5) == 1


class TestEval:
    def test_rs_n3(self, rs):
        assert eval_a(rs, 3) == 1

    def test_n0_is_init(self):
        spec = PrimeGRS(3, GTable.standard(3), (2, 1, 0))
        assert eval_a(spec, 0) == 2

    def test_ternary_13(self, ex3):
        assert eval_a(ex3, 13) == 2

    def test_rs_prefix(self, rs):
        assert generate_prefix(rs, 8).tolist() == [0, 0, 0, 1, 0, 0, 1, 0]

    def test_empty_prefix(self, rs):
        assert generate_prefix(rs, 0).size == 0

    def test_block01_prefix(self, ex2):
        expected = [block_count_oracle(2, (0, 1), n) % 2 for n in range(8)]
        assert expected == [0, 0, 0, 0, 0, 1, 0, 0]
        assert generate_prefix(ex2, 8).tolist() == expected

    def test_huge_index(self, rs):
        n = 3 ** 80 + 12345
        expected = block_count_oracle(2, (1, 1), n) % 2
        assert eval_a(rs, n) == expected


class TestExampleSemantics:
    N = 10 ** 4

    def test_rs_counts_11(self, rs):
        x = generate_prefix(rs, self.N)
        assert all(x[n] == block_count_oracle(2, (1, 1), n) % 2 for n in range(self.N))

    def test_block01_counts_01(self, ex2):
        x = generate_prefix(ex2, self.N)
        assert all(x[n] == block_count_oracle(2, (0, 1), n) % 2 for n in range(self.N))

    def test_ternary_counts_pairs(self, ex3):
        x = generate_prefix(ex3, self.N)
        for n in range(self.N):
            total = sum(block_count_oracle(3, (c, c), n) for c in range(3))
            assert x[n] == total % 3


class TestRecurrence:
    @pytest.mark.parametrize("k", [2, 3, 5, 7])
    def test_exhaustive_consistency(self, k):
        spec = PrimeGRS(k, GTable.standard(k), tuple(range(k)))
        x = generate_prefix(spec, 10 ** 5)
        n = np.arange(1, (10 ** 5) // k)
        for j in range(k):
            idx = n * k + j
            idx = idx[idx < 10 ** 5]
            q = idx // k
            g = np.array([spec.g(j, int(v)) for v in range(k)])[q % k]
            assert np.all((x[idx] - x[q] - g) % k == 0)

    @given(prime_specs())
    @settings(max_examples=40, deadline=None)
    def test_prefix_matches_forward_fill(self, spec):
        N = 3000
        ref = recurrence_prefix(spec.k, spec.g, spec.init, N)
        assert np.array_equal(generate_prefix(spec, N), ref)

    @given(prime_specs(), st.integers(0, 10 ** 6), st.integers(0, 5000))
    @settings(max_examples=40, deadline=None)
    def test_window_matches_random_access(self, spec, lo, length):
        w = spec.window(lo, lo + length)
        picks = range(0, length, max(1, length // 20))
        assert all(w[i] == eval_a(spec, lo + i) for i in picks)


class TestSquarefree:
    def test_single_factor_matches_prime(self):
        g = GTable.standard(5)
        sq = SquarefreeGRS((Factor(5, g, (1, 2, 3, 4, 0)),))
        pr = PrimeGRS(5, g, (1, 2, 3, 4, 0))
        assert np.array_equal(generate_prefix(sq, 20000), generate_prefix(pr, 20000))

    def test_composition_formula(self):
        spec = standard_squarefree([2, 3, 5])
        assert spec.k == 30 and spec.weights == (1, 2, 6)
        # a_i is not reduced mod p_i: forward fill with plain integers, g entries in [0, p)
        N = 5000
        raw = []
        for p in (2, 3, 5):
            a = [0] * p
            for n in range(p, N):
                q, j = divmod(n, p)
                a.append(a[q] + (j * q) % p)
            raw.append(np.array(a))
        expected = (raw[0] + 2 * raw[1] + 6 * raw[2]) % 30
        assert np.array_equal(generate_prefix(spec, N), expected)
        assert all(eval_a(spec, n) == expected[n] for n in range(0, N, 97))
        # reducing each a_i mod p_i first would give a different word
        wrong = (raw[0] % 2 + 2 * (raw[1] % 3) + 6 * (raw[2] % 5)) % 30
        assert not np.array_equal(wrong, expected)

    def test_repeated_prime_rejected(self):
        with pytest.raises(SpecError, match="distinct"):
            standard_squarefree([3, 3])

    def test_non_prime_factor_rejected(self):
        with pytest.raises(SpecError, match="not prime"):
            Factor(4, GTable.from_function(4, lambda j, n: j * n))


class TestBaselines:
    def test_thue_morse_digit_sum(self):
        spec = ThueMorse(3)
        x = generate_prefix(spec, 3000)
        assert all(x[n] == sum(digit_expansion(n, 3).digits) % 3 for n in range(3000))

    def test_iid_random_access_agrees(self):
        spec = IidRandom(5, seed=1234)
        x = generate_prefix(spec, 10000)
        assert all(x[n] == eval_a(spec, n) for n in range(0, 10000, 37))
        assert np.array_equal(spec.window(4321, 9999), x[4321:9999])
        assert set(np.unique(x)) == set(range(5))

    def test_iid_seed_changes_word(self):
        a = generate_prefix(IidRandom(2, 1), 256)
        b = generate_prefix(IidRandom(2, 2), 256)
        assert not np.array_equal(a, b)


class TestSpecFiles:
    def test_rs_file(self, tmp_path):
        path = tmp_path / "rs2.json"
        path.write_text(json.dumps({"type": "prime-grs", "k": 2, "g": [[0, 0], [0, 1]]}))
        spec = load_spec(path)
        assert isinstance(spec, PrimeGRS) and spec.init == (0, 0)
        assert generate_prefix(spec, 8).tolist() == [0, 0, 0, 1, 0, 0, 1, 0]

    def test_k4_prime_rejected(self):
        with pytest.raises(SpecError, match="k is not prime"):
            spec_from_dict({"type": "prime-grs", "k": 4, "g": [[0] * 4] * 4})

    def test_k4_squarefree_rejected(self):
        g = [[(j * n) % 4 for n in range(4)] for j in range(4)]
        with pytest.raises(SpecError, match="not squarefree"):
            spec_from_dict({"type": "squarefree-grs", "factors": [{"p": 4, "g": g}]})

    def test_non_admissible_names_pair(self):
        with pytest.raises(SpecError, match=r"\(u, i\) = \(0, 1\)"):
            spec_from_dict({"type": "prime-grs", "k": 3, "g": [[0] * 3] * 3})

    def test_bad_init(self):
        with pytest.raises(SpecError):
            spec_from_dict({"type": "prime-grs", "k": 2, "g": [[0, 0], [0, 1]], "init": [0, 2]})

    def test_roundtrip(self):
        for spec in [standard_squarefree([2, 3]), ThueMorse(4), IidRandom(3, 9),
                     PrimeGRS(3, GTable.standard(3), (1, 0, 2))]:
            assert spec_from_dict(json.loads(json.dumps(spec.to_dict()))) == spec

    def test_unknown_type(self):
        with pytest.raises(SpecError):
            spec_from_dict({"type": "nope"})
