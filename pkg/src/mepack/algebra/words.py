"""Single-swap normal ordering of two-letter words.

Both operator algebras in this package reduce by the same combinatorial
scheme: a disordered adjacent pair X Y rewrites to the swapped pair plus a
contraction that deletes both letters,

    p q -> q p + (-i*hbar) * 1        (Weyl algebra)
    A Ad -> Ad A + 1                  (ladder algebra)

applied until no disordered pair remains.  Termination follows from the
strictly decreasing inversion count; the result is independent of the
rewrite order (the counts below are well defined).

`swap_counts(nl, nr)` reduces a word of `nl` "late" letters followed by
`nr` "early" letters and returns {j: multiplicity}, meaning the normal
form contains `multiplicity` copies of the word with j contracted pairs
removed, each weighted by the algebra's contraction factor to the j-th
power.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict


@lru_cache(maxsize=None)
def swap_counts(nl: int, nr: int) -> Dict[int, int]:
    if nl == 0 or nr == 0:
        return {0: 1}
    # letters: 'L' must move right of 'R'
    start = ("L",) * nl + ("R",) * nr
    pending = {start: {0: 1}}
    done: Dict[int, int] = {}
    while pending:
        word, jcounts = pending.popitem()
        for idx in range(len(word) - 1):
            if word[idx] == "L" and word[idx + 1] == "R":
                swapped = word[:idx] + ("R", "L") + word[idx + 2:]
                contracted = word[:idx] + word[idx + 2:]
                for target, shift in ((swapped, 0), (contracted, 1)):
                    slot = pending.setdefault(target, {})
                    for j, c in jcounts.items():
                        slot[j + shift] = slot.get(j + shift, 0) + c
                break
        else:
            for j, c in jcounts.items():
                done[j] = done.get(j, 0) + c
    return done
