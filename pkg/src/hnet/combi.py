"""Combined categories: AND columns across distinct parent features.

Levels are built bottom-up.  A level-k candidate is generated only by
extending a surviving level-(k-1) set whose other subsets also survived,
so supersets of any under-supported set are never materialised.
"""

from .errors import CombinatorialBudgetExceeded
from .ingest import CategoryColumn, OneHotMatrix


def expand_combinations(m, k_max=1, y_min=10, max_candidates=1_000_000):
    """Append AND-combination categories up to size k_max.

    With k_max == 1 the matrix passes through unchanged.  Member sets are
    drawn from the base (single-label) categories, must cover pairwise
    distinct parent features, and are enumerated in index order level by
    level.  A combination joins the output when its joint support reaches
    y_min; the budget counts every candidate whose bits are actually
    computed and raising CombinatorialBudgetExceeded once it passes
    max_candidates.
    """
    if k_max <= 1:
        return OneHotMatrix(columns=list(m.columns), n_rows=m.n_rows,
                            n_raw_categories=m.n_raw_categories)
    base = list(m.columns)
    out = list(base)
    budget = int(max_candidates)
    generated = 0
    # Survivors of the previous level, keyed by their sorted member tuple.
    frontier = {(i,): (c.bits, c.present) for i, c in enumerate(base)}
    for _level in range(2, k_max + 1):
        nxt = {}
        for members in sorted(frontier):
            bits, present = frontier[members]
            used = {base[i].parent_features[0] for i in members}
            for j in range(members[-1] + 1, len(base)):
                cand = base[j]
                if cand.parent_features[0] in used:
                    continue
                key = members + (j,)
                if len(members) > 1:
                    # Every other (k-1)-subset must have survived too.
                    subsets_ok = all(
                        key[:a] + key[a + 1:] in frontier
                        for a in range(len(members)))
                    if not subsets_ok:
                        continue
                generated += 1
                if generated > budget:
                    raise CombinatorialBudgetExceeded(
                        f"more than {budget} combination candidates")
                joint = bits & cand.bits
                positives = int(joint.sum())
                if positives < y_min:
                    continue
                nxt[key] = (joint, present & cand.present)
        for members in sorted(nxt):
            joint, pres = nxt[members]
            out.append(CategoryColumn(
                parent_features=tuple(base[i].parent_features[0]
                                      for i in members),
                labels=tuple(base[i].labels[0] for i in members),
                bits=joint,
                present=pres,
                positives=int(joint.sum()),
            ))
        frontier = nxt
        if not frontier:
            break
    return OneHotMatrix(columns=out, n_rows=m.n_rows,
                        n_raw_categories=m.n_raw_categories)
