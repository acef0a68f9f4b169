"""Stable seed derivation.

Python's builtin hash() is salted per process, so child seeds are derived
through sha256 instead: same inputs, same seed, on any platform.
"""

import hashlib


def derive_seed(root_seed, *parts):
    """Derive a child seed from a root seed and a label path.

    Returns a non-negative int below 2**63 suitable for numpy PCG64.
    """
    text = repr(int(root_seed)) + "\x1f" + "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
