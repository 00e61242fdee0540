"""Test support: the brute-force oracle and seeded dataset generators."""
from .generators import duplicate, onehot_surrogate, planted_tree_dataset, random_dataset, random_small_dataset, xor_dataset
from .oracle import OracleResult, oracle_score, oracle_solve

__all__ = ["OracleResult", "oracle_solve", "oracle_score", "xor_dataset", "random_dataset",
           "random_small_dataset", "planted_tree_dataset", "onehot_surrogate", "duplicate"]
from .checks import tree_violations  # noqa: E402

__all__ += ["tree_violations"]
