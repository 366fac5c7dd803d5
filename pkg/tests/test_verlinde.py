from __future__ import annotations

import math
import random
import unittest
from pathlib import Path
import sys

ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = ROOT / "scripts"
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))

from errors import PreconditionError
from lattice_core import polarization, rank2_model
from mukai import MukaiVector, admissibility_check
from verlinde import (
    PicExpr,
    build_L,
    pushforward_rank,
    reverse_twist,
    sd_counts,
    theta_correction,
    theta_normalization,
    twist_T,
    twist_equivalent,
    verlinde_pair,
)


def _pair_on(ell: int, r: int, a: int, s: int, b: int) -> tuple[MukaiVector, MukaiVector]:
    h = polarization(rank2_model(ell))
    return MukaiVector(r, h, a), MukaiVector(s, h, b)


S1 = (21, 3, -7, 3, -7)
S2 = (19, 3, -5, 4, -6)


class BuildLTests(unittest.TestCase):
    def test_s1_and_s2(self) -> None:
        fiberwise, universal = build_L(*_pair_on(*S1), 21)
        self.assertEqual(str(fiberwise), "6sigma + 20f")
        self.assertEqual(universal, {"H": 6, "O(F)": -112})
        fiberwise, universal = build_L(*_pair_on(*S2), 19)
        self.assertEqual(str(fiberwise), "7sigma + 18f")
        self.assertEqual(universal, {"H": 7, "O(F)": -122})

    def test_restriction_identity_on_a_box(self) -> None:
        rng = random.Random(11)
        models = {ell: rank2_model(ell) for ell in range(1, 41)}
        for _ in range(10_000):
            ell = rng.randint(1, 40)
            h = polarization(models[ell])
            v = MukaiVector(rng.randint(1, 20), h, rng.randint(-60, 60))
            w = MukaiVector(rng.randint(1, 20), h, rng.randint(-60, 60))
            fiberwise, universal = build_L(v, w, ell)
            self.assertEqual(fiberwise.coeffs, (v.r + w.r, v.r + w.r - v.a - w.a))
            self.assertEqual(universal["H"] * (ell + 1) + universal["O(F)"], fiberwise.coeffs[1])


class CountTests(unittest.TestCase):
    def test_s1_counts(self) -> None:
        sd = sd_counts(*_pair_on(*S1), 21)
        self.assertEqual((sd.chi_L, sd.d_v, sd.d_w), (86, 43, 43))
        self.assertEqual(sd.h0_v, math.comb(86, 43))
        self.assertEqual(sd.h0_v, sd.h0_w)
        self.assertGreater(sd.h0_v, 2**64)

    def test_s2_counts(self) -> None:
        sd = sd_counts(*_pair_on(*S2), 19)
        self.assertEqual((sd.chi_L, sd.d_v, sd.d_w), (79, 35, 44))
        self.assertEqual(sd.h0_v, math.comb(79, 35))
        self.assertEqual(sd.h0_w, math.comb(79, 44))

    def test_requires_orthogonality(self) -> None:
        with self.assertRaises(PreconditionError):
            sd_counts(*_pair_on(21, 3, -4, 3, -7), 21)

    def test_pushforward_rank(self) -> None:
        self.assertEqual(pushforward_rank(*_pair_on(*S1), 21), math.comb(86, 43) ** 2)
        self.assertEqual(pushforward_rank(*_pair_on(*S2), 19), math.comb(79, 35) * math.comb(79, 44))

    def test_random_admissible_scenarios(self) -> None:
        rng = random.Random(2024)
        found = 0
        while found < 100:
            r, s = rng.randint(3, 7), rng.randint(3, 7)
            a, b = rng.randint(-40, -r), rng.randint(-40, -s)
            total = -r * b - s * a
            if total % 2:
                continue
            ell = total // 2
            v, w = _pair_on(ell, r, a, s, b)
            self.assertTrue(admissibility_check(v, w, ell)["passed"])
            sd = sd_counts(v, w, ell)
            self.assertEqual(sd.d_v + sd.d_w, sd.chi_L)
            self.assertEqual(2 * ell + 2 - r * a - s * b, 2 - (r + s) * (a + b))
            self.assertEqual(sd.h0_v, sd.h0_w)
            found += 1


class TwistTests(unittest.TestCase):
    def test_twist_examples(self) -> None:
        self.assertEqual(twist_T(3, 4, 1, 1), PicExpr(lambda_=-6, det_h=5, det_h2=1))
        self.assertEqual(twist_T(3, 3, 1, 1), PicExpr(lambda_=-4, det_h=4, det_h2=1))
        self.assertEqual(twist_T(5, 7, 0, 0), PicExpr(lambda_=-35))

    def test_lambda_exponent_recomputed(self) -> None:
        for r, s, d, e in ((3, 4, 1, 1), (5, 6, 2, 3), (4, 4, 0, 1)):
            self.assertEqual(twist_T(r, s, d, e).lambda_, -(r - d) * (s - e))

    def test_theta_normalization(self) -> None:
        norm = theta_normalization(*_pair_on(*S2), 19)
        self.assertEqual((norm.alpha, norm.beta), (-27, -29))
        self.assertEqual(norm.restriction_exponent, 29)
        self.assertEqual(norm.normalization_exponent, -29)
        norm = theta_normalization(*_pair_on(*S1), 21)
        self.assertEqual((norm.alpha, norm.beta), (-31, -31))
        self.assertEqual(theta_normalization(*_pair_on(*S1), 21, d=0).restriction_exponent, 0)

    def test_theta_correction(self) -> None:
        self.assertEqual(theta_correction(*_pair_on(*S2), 19), 29 + 27)

    def test_verlinde_pair(self) -> None:
        pair = verlinde_pair(*_pair_on(*S2), 19)
        self.assertTrue(pair["W"]["twist"].is_trivial())
        self.assertEqual(pair["V"]["twist"], PicExpr(det_l=-1))
        self.assertEqual(pair["W"]["rank"], math.comb(79, 35))
        self.assertEqual(pair["rank_pi_L"], 79)

    def test_reverse_twist_equivalence(self) -> None:
        start = (PicExpr(h=2), PicExpr(lambda_=-1))
        t = PicExpr(det_l=3, h=-1)
        moved = reverse_twist(start, t)
        self.assertEqual(moved, (PicExpr(h=1, det_l=3), PicExpr(lambda_=-1, det_l=-3, h=1)))
        self.assertTrue(twist_equivalent(start, moved))
        self.assertFalse(twist_equivalent(start, (moved[0], start[1])))

    def test_picexpr_arithmetic(self) -> None:
        x = PicExpr(1, 2, 3, 4, 5)
        self.assertTrue((x - x).is_trivial())
        self.assertEqual(str(PicExpr(lambda_=-6, det_h=5)), "lambda^-6 * detH^5")
        self.assertEqual(str(PicExpr()), "1")


if __name__ == "__main__":
    unittest.main()
