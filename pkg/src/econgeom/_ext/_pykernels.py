"""Pure-Python exchange kernels; reference behaviour for ``_kernels.pyx``."""


def random_split(m, i, j, u):
    """Pool the holdings of each pair and re-split uniformly over
    ``{0, ..., pool}`` quanta. ``m`` is modified in place."""
    hold = m.tolist()
    for a, b, x in zip(i.tolist(), j.tolist(), u.tolist()):
        pool = hold[a] + hold[b]
        share = int(x * (pool + 1))
        if share > pool:
            share = pool
        hold[a] = share
        hold[b] = pool - share
    m[:] = hold


def fixed_delta(m, i, j, delta):
    """Agent ``i`` pays ``delta`` quanta to ``j`` when it can afford to."""
    hold = m.tolist()
    for a, b in zip(i.tolist(), j.tolist()):
        if hold[a] >= delta:
            hold[a] -= delta
            hold[b] += delta
    m[:] = hold
