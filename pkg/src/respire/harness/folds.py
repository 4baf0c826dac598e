"""User-grouped fold plans for nested cross-validation.

Users (never samples) are shuffled with the seed and dealt round-robin,
so every recording of a user lands in exactly one outer fold and fold
sizes differ by at most one. Each outer fold gets its own partition of
the remaining development users into inner folds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LeakageError, TooFewUsers


def _deal(users: list[str], k: int, rng: np.random.Generator) -> dict[str, int]:
    order = list(users)
    rng.shuffle(order)
    return {user: i % k for i, user in enumerate(order)}


@dataclass(frozen=True)
class FoldPlan:
    k: int
    outer: dict[str, int]  # user -> outer fold
    inner: tuple[dict[str, int], ...]  # per outer fold: dev user -> inner fold
    seed: int

    def outer_split(self, fold: int) -> tuple[set[str], set[str]]:
        """(development users, test users) of one outer fold."""
        test = {u for u, f in self.outer.items() if f == fold}
        dev = {u for u, f in self.outer.items() if f != fold}
        if dev & test:
            raise LeakageError(f"outer fold {fold}: overlapping user sets")
        return dev, test

    def inner_split(self, outer_fold: int, inner_fold: int) -> tuple[set[str], set[str]]:
        """(training users, validation users) within one development set."""
        assignment = self.inner[outer_fold]
        val = {u for u, f in assignment.items() if f == inner_fold}
        tr = {u for u, f in assignment.items() if f != inner_fold}
        if tr & val:
            raise LeakageError(
                f"inner fold {inner_fold} of outer {outer_fold}: overlapping user sets"
            )
        return tr, val


def user_grouped_folds(users, k: int = 5, seed: int = 0) -> FoldPlan:
    """Seeded round-robin fold plan over distinct users."""
    unique = sorted(set(users))
    if len(unique) < k:
        raise TooFewUsers(f"{len(unique)} users < {k} folds")
    seeds = np.random.SeedSequence(seed).spawn(k + 1)
    outer = _deal(unique, k, np.random.default_rng(seeds[0]))
    inner = []
    for fold in range(k):
        dev = sorted(u for u, f in outer.items() if f != fold)
        if len(dev) < k:
            raise TooFewUsers(
                f"outer fold {fold} leaves {len(dev)} development users < {k}"
            )
        inner.append(_deal(dev, k, np.random.default_rng(seeds[fold + 1])))
    return FoldPlan(k=k, outer=outer, inner=tuple(inner), seed=seed)
