from prometheus_client import Counter, Histogram

cavity_requests_total = Counter(
    "cavity_api_requests_total",
    "Total requests per endpoint and outcome",
    ["endpoint", "status"],
)

cavity_latency_seconds = Histogram(
    "cavity_api_latency_seconds",
    "Request latency per endpoint",
    ["endpoint"],
    buckets=(0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0),
)

cavity_rejected_total = Counter(
    "cavity_api_rejected_total",
    "Requests rejected by a step or grid limit",
    ["endpoint"],
)
