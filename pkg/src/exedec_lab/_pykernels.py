"""Pure-Python reference versions of the hot kernels.

``_ckernels.pyx`` implements the same functions; ``kernels`` picks one at
import time. Keep the two in lock-step: the test-suite checks them against
each other.
"""

# pair-lambda codes: 0 '+', 1 '-', 2 '*', 3 'min', 4 'max'

# Arithmetic saturates at +-SAT so the compiled version cannot overflow.
# Anything that large is far outside the DSL's value range and is rejected
# by the interpreter either way.
SAT = 2 ** 31


def _sat(v):
    return SAT if v > SAT else -SAT if v < -SAT else v


def _pair(code, a, b):
    a, b = _sat(a), _sat(b)
    if code == 0:
        return _sat(a + b)
    if code == 1:
        return _sat(a - b)
    if code == 2:
        return _sat(a * b)
    if code == 3:
        return a if a < b else b
    return a if a > b else b


def scanl1(code, xs):
    out = []
    if not xs:
        return out
    acc = _sat(xs[0])
    out.append(acc)
    for x in xs[1:]:
        acc = _pair(code, acc, x)
        out.append(acc)
    return out


def zip_with(code, xs, ys):
    return [_pair(code, a, b) for a, b in zip(xs, ys)]


def lcs_length(a, b):
    """Length of the longest common subsequence of two sequences."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            if x == y:
                cur.append(prev[j] + 1)
            else:
                cur.append(cur[j] if cur[j] > prev[j + 1] else prev[j + 1])
        prev = cur
    return prev[-1]


def levenshtein(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cost = prev[j - 1] + (x != y)
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            cur.append(min(cost, ins, dele))
        prev = cur
    return prev[-1]


def common_prefix(a, b):
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i
