"""Level-2 Eichler subgroup of PSL2 over Z[(1+sqrt-3)/2], a fixture with index 5."""
from fractions import Fraction

import numpy as np

from kleinian.ball import boost
from kleinian.basis import normalized_basis, presentation
from kleinian.cli import is_full_group
from kleinian.enumeration import EnumSchedule, Enumerator
from kleinian.field import NumberField
from kleinian.quat import covolume, make_splitting, matrix_order, order_from_zf_generators
from kleinian.reduce import GroupContext, PrecisionBudget

INDEX = 5  # N(2) + 1, with 2 inert of norm 4
CONJ = np.array([0.021, -0.013, 0.008])


def build():
    F = NumberField([1, 0, 3], integral_basis=[[1, 0], ["1/2", "1/2"]], prime_splitting={2: [2]})
    M = matrix_order(F)
    alg = M.alg
    h = Fraction(1, 2)
    # Z_F-span of e11, e22, e12 and 2 e21
    E = order_from_zf_generators(alg, [alg(h, h, 0, 0), alg(h, -h, 0, 0), alg(0, 0, h, h), alg(0, 0, 1, -1)],
                                 maximal=False)
    covol = covolume(M, 20000)[0] * INDEX
    s = make_splitting(alg, conjugator=boost(CONJ).m)
    en = Enumerator(E, s, EnumSchedule(2, covol, F.disc), np.random.default_rng(0))
    ctx = GroupContext(E, en.mats)
    S = normalized_basis(en.deterministic, lambda S: is_full_group(S, covol), ctx=ctx, budget=PrecisionBudget())
    return dict(field=F, maximal=M, eichler=E, splitting=s, covol=covol, basis=S,
                presentation=presentation(S), ctx=ctx)
