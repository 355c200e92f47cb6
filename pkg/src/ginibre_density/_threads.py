"""Single-threaded LAPACK policy for sweep and sampling loops.

Process-level parallelism owns the cores here. Per-call BLAS threading both
oversubscribes worker pools and changes summation order between worker
counts, which would break the bit-reproducibility contract (identical output
for any --workers value). Sweep kernels therefore always run single-threaded,
serial and pooled alike; at the matrix sizes involved this is also faster.
"""

from threadpoolctl import threadpool_limits

_WORKER_LIMITER = None


def limit_blas_threads_in_worker() -> None:
    """Pin BLAS to one thread for the lifetime of a pool worker."""
    global _WORKER_LIMITER
    if _WORKER_LIMITER is None:
        _WORKER_LIMITER = threadpool_limits(limits=1)


def single_thread_blas():
    """Context manager pinning BLAS to one thread for a serial sweep."""
    return threadpool_limits(limits=1)
