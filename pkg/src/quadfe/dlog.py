"""Bounded discrete logarithm in the target group via baby-step giant-step.

A table built for bound B solves gT^z -> z for every z in [-B, B].  The
centered range is mapped through z + B = u + m*v with m = ceil(sqrt(2B+1)):
baby steps store gT^(u-B) for u in [0, m), keyed by a short digest of the
canonical encoding; giant steps multiply by gT^(-m).  Build cost is O(m)
group operations; solves take at most ~m multiplications, independent of
any ciphertext or key material.
"""

import hashlib
import math
import os
import struct

from .errors import FormatError, MemoryCapError, OutOfRangeError
from .group import GTElem, GroupContext
from .group import fields as F

_DIGEST_LEN = 16
# Rough per-entry footprint of a dict[bytes16 -> int] slot, for the cap.
_ENTRY_BYTES = 120

_MAGIC = b"QFDT"
_VERSION = 1


def _digest(val):
    from .group import encoding as enc

    return hashlib.blake2b(enc.gt_to_bytes(val), digest_size=_DIGEST_LEN).digest()


class DlogTable:
    """Read-only lookup structure for exponents in [-bound, bound]."""

    def __init__(self, bound, m, baby_steps, giant_step, start):
        self.bound = bound
        self.m = m
        self._baby = baby_steps
        self._giant = giant_step      # gT^{-m}, raw Fp12 value
        self._start = start           # gT^{bound}, raw Fp12 value

    def solve(self, target) -> int:
        """Return z in [-bound, bound] with gT^z == target."""
        val = target.val if isinstance(target, GTElem) else target
        cur = F.f12_mul(val, self._start)
        baby = self._baby
        giant = self._giant
        max_v = (2 * self.bound) // self.m + 1
        for v in range(max_v + 1):
            u = baby.get(_digest(cur))
            if u is not None:
                z = u + self.m * v - self.bound
                if -self.bound <= z <= self.bound:
                    return z
            cur = F.f12_mul(cur, giant)
        raise OutOfRangeError(
            f"target is not gT^z for any z in [-{self.bound}, {self.bound}]"
        )


def memory_cap_bytes():
    cap_mb = os.environ.get("QFE_DLOG_CAP_MB")
    return int(cap_mb) * 1024 * 1024 if cap_mb else 2048 * 1024 * 1024


def build_table(group: GroupContext, bound: int) -> DlogTable:
    """Precompute a table covering [-bound, bound]."""
    bound = int(bound)
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if 2 * bound + 1 >= group.p:
        raise ValueError("bound too large for the group order")
    m = math.isqrt(2 * bound + 1)
    if m * m < 2 * bound + 1:
        m += 1
    if m * _ENTRY_BYTES > memory_cap_bytes():
        raise MemoryCapError(
            f"table for bound {bound} needs ~{m * _ENTRY_BYTES} bytes, "
            f"over the cap (set QFE_DLOG_CAP_MB to raise it)"
        )
    gt = group.gT.val
    baby = {}
    cur = F.F12_ONE
    for u in range(m):
        baby.setdefault(_digest(cur), u)
        cur = F.f12_mul(cur, gt)
    # cur is now gT^m; its conjugate is the giant step gT^{-m}.
    giant = F.f12_conj(cur)
    start = group.exp("T", group.gT, bound).val
    group.counter.add_exp("T", m)  # account the build as O(m) exponentiations
    return DlogTable(bound, m, baby, giant, start)


# ---------------------------------------------------------------------------
# Persistence: versioned binary file of (bound, m, sorted digest/value pairs)
# ---------------------------------------------------------------------------

def save_table(table: DlogTable, path):
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQ", _VERSION, table.bound, table.m))
        from .group import encoding as enc

        fh.write(enc.gt_to_bytes(table._giant))
        fh.write(enc.gt_to_bytes(table._start))
        for key in sorted(table._baby):
            fh.write(key)
            fh.write(struct.pack("<Q", table._baby[key]))


def load_table(path) -> DlogTable:
    from .group import encoding as enc

    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 + 20 or data[:4] != _MAGIC:
        raise FormatError("bad magic", section="dlog-table header")
    version, bound, m = struct.unpack_from("<IQQ", data, 4)
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}", section="dlog-table header")
    off = 4 + 20
    if len(data) < off + 2 * enc.GT_ENC_LEN:
        raise FormatError("truncated", section="dlog-table giant step")
    giant = enc.gt_from_bytes(data[off:off + enc.GT_ENC_LEN])
    off += enc.GT_ENC_LEN
    start = enc.gt_from_bytes(data[off:off + enc.GT_ENC_LEN])
    off += enc.GT_ENC_LEN
    entry = _DIGEST_LEN + 8
    baby = {}
    while off < len(data):
        if len(data) - off < entry:
            raise FormatError("truncated", section="dlog-table entries")
        baby[data[off:off + _DIGEST_LEN]] = struct.unpack_from("<Q", data, off + _DIGEST_LEN)[0]
        off += entry
    if len(baby) > m:
        raise FormatError("entry count exceeds declared m", section="dlog-table entries")
    return DlogTable(bound, m, baby, giant, start)
