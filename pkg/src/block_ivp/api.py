from .services import BenchmarkService
from .validation import RunRequest, OrderRequest

# Singleton instance of the benchmark service
_benchmark_service = None


def get_benchmark_service():
    """
    Get or create the BenchmarkService singleton
    """
    global _benchmark_service
    if _benchmark_service is None:
        _benchmark_service = BenchmarkService()
    return _benchmark_service


def list_problems():
    """
    Get the names of the registered benchmark problems

    Returns:
        list: e.g. ['example1', ..., 'example5']
    """
    return get_benchmark_service().names()


def run_benchmark(problem, **options):
    """
    Solve a registered benchmark and compare it against its reference

    Args:
        problem (str): Benchmark name
        **options: Any RunRequest field (blocks, points, newton_tol, max_iter,
            compare, oracle_steps, output_format)

    Returns:
        RunResult: trajectory, error report and solver statistics
    """
    return get_benchmark_service().run(RunRequest.with_defaults(problem, **options))


def estimate_order(problem, points=5, refinements=3, **options):
    """
    Estimate the convergence order of a benchmark by doubling its block count

    Args:
        problem (str): Benchmark name
        points (int): Nodes per block N
        refinements (int): Number of runs (at least 2)
        **options: blocks, oracle_steps, workers, newton_tol, max_iter

    Returns:
        tuple: (BenchmarkEntry, OrderEstimate)
    """
    options = {k: v for k, v in options.items() if v is not None}
    request = OrderRequest(problem=problem, points=points, refinements=refinements, **options)
    return get_benchmark_service().order(request)
