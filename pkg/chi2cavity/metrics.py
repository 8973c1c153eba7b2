from prometheus_client import Counter, Histogram

simulations_total = Counter(
    "chi2cavity_simulations_total",
    "Total number of time evolutions run",
    ["integrator"],
)

integration_steps = Histogram(
    "chi2cavity_integration_steps",
    "Fixed RK4 steps taken per time evolution",
    ["integrator"],
    buckets=(1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8),
)

feasibility_reports_total = Counter(
    "chi2cavity_feasibility_reports_total",
    "Total number of platform feasibility reports built",
    ["platform"],
)

sweep_points_total = Counter(
    "chi2cavity_sweep_points_total",
    "Total number of parameter sweep points evaluated",
)
