from collections import OrderedDict
from copy import deepcopy
import os
from typing import Any

# Probability vectors must sum to one within this tolerance
SUM_TOLERANCE = 1e-12

# Slack on e^epsilon when auditing a channel matrix
AUDIT_SLACK = 1e-9

# Full-matrix RAPPOR audit enumerates 2^k outputs
MAX_RAPPOR_AUDIT_K = 16
MAX_RAPPOR_LB_K = 10
MAX_HADAMARD_LB_K = 256

# Exhaustive oracles; beyond these sizes the oracles switch to Monte-Carlo
MAX_SUBSET_ENUMERATION_K = 16
MAX_PAIR_ENUMERATION_K = 8
MAX_RAPPOR_OUTCOMES = 2**24
MONTE_CARLO_DRAWS = 10**6
MONTE_CARLO_CHUNK = 10**5

# Constant of the subset-perturbation corollary
SUBSET_COROLLARY_CONSTANT = 1 / 477

MAX_CACHE_SIZE = 64


class LRUDict(OrderedDict):
    """
    OrderedDict bounded to `maxkeys` entries.

    Reading a key with [] or get() marks it as recently used; once an insert
    pushes the size past `maxkeys`, the stalest keys are evicted first.
    """

    def __init__(self, *args, maxkeys: int = MAX_CACHE_SIZE, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.maxkeys = maxkeys
        self.evict()

    def evict(self) -> None:
        while len(self) > self.maxkeys:
            self.popitem(last=False)

    def __getitem__(self, key: Any) -> Any:
        value = super().__getitem__(key)
        self.move_to_end(key)
        return value

    def get(self, key: Any, default: Any = None) -> Any:
        if key in self:
            return self[key]
        return default

    def __setitem__(self, key: Any, value: Any) -> None:
        super().__setitem__(key, value)
        self.move_to_end(key)
        self.evict()


class Cache(dict):
    """
    Package-wide memo tables. clear() restores the empty layout rather
    than dropping the keys, so callers can always index the sub-caches.
    """

    layout: dict = {
        'calibration': {},
        'hadamard_codes': LRUDict(),
        'subsets': LRUDict(maxkeys=8),
    }

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        kwargs.update(deepcopy(self.layout))
        super().__init__(*args, **kwargs)

    def clear(self) -> None:
        super().clear()
        self.update(deepcopy(self.layout))


ROOT = os.path.dirname(os.path.abspath(__file__))

LTCache = Cache()

__all__ = (
    'AUDIT_SLACK',
    'Cache',
    'LRUDict',
    'LTCache',
    'MAX_CACHE_SIZE',
    'MAX_HADAMARD_LB_K',
    'MAX_PAIR_ENUMERATION_K',
    'MAX_RAPPOR_AUDIT_K',
    'MAX_RAPPOR_LB_K',
    'MAX_RAPPOR_OUTCOMES',
    'MAX_SUBSET_ENUMERATION_K',
    'MONTE_CARLO_CHUNK',
    'MONTE_CARLO_DRAWS',
    'ROOT',
    'SUBSET_COROLLARY_CONSTANT',
    'SUM_TOLERANCE',
)
