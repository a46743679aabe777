"""Kernel selection: the compiled extension when built, else pure Python.

Both backends are transcript-identical (same operations, same order, all
randomness drawn by the caller); the benchmark in benchmarks/ measures the
speed gap.
"""

from __future__ import annotations

from types import ModuleType

try:
    from . import _speedups as _impl  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
keep_pass = _impl.keep_pass
apply_removals = _impl.apply_removals
brute_force_search = _impl.brute_force_search


def get_backend(name: str | None = None) -> ModuleType:
    """Fetch a kernel module by name: 'compiled', 'python', or the default."""
    if name is None:
        return _impl
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "compiled":
        from . import _speedups  # raises ImportError when not built

        return _speedups
    raise ValueError(f"unknown kernel backend {name!r}")
