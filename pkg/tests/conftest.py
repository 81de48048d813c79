import time

import pytest

from truncarch.experiment import ExperimentConfig, run_experiment


@pytest.fixture(scope="session")
def smoke_run(tmp_path_factory):
    """One timed smoke-scale grid (N=300, mu=21, 5 shuffles), shared by the
    runtime-budget check and the figure pipeline tests. A micro grid runs
    first so compiled kernels are warm before the clock starts."""
    run_experiment(ExperimentConfig(
        n_solutions=60, mu=10, n_shuffles=1,
        output_dir=str(tmp_path_factory.mktemp("warmup"))))
    cfg = ExperimentConfig(n_solutions=300, mu=21, n_shuffles=5,
                           output_dir=str(tmp_path_factory.mktemp("smoke")))
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    return result, time.perf_counter() - t0
